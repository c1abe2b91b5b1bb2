#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "collapselab/errors.hpp"

namespace collapselab {

// A [0,1]-valued per-step rate: the fresh-data fraction alpha_t of a
// training loop, or the coverage phi_t of a correction operator.
class RateSchedule {
 public:
  enum class Kind { constant, geometric, harmonic, custom_table };

  static RateSchedule constant(double value) {
    RateSchedule s;
    s.kind_ = Kind::constant;
    s.base_ = checked(value, "constant rate");
    return s;
  }

  // value * ratio^t, ratio in (0,1): decays geometrically to 0.
  static RateSchedule geometric(double value, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0))
      throw InvariantError("geometric schedule: ratio must be in (0,1)");
    RateSchedule s;
    s.kind_ = Kind::geometric;
    s.base_ = checked(value, "geometric base");
    s.ratio_ = ratio;
    return s;
  }

  // value / (1 + t).
  static RateSchedule harmonic(double value) {
    RateSchedule s;
    s.kind_ = Kind::harmonic;
    s.base_ = checked(value, "harmonic base");
    return s;
  }

  static RateSchedule custom(std::vector<double> table) {
    if (table.empty())
      throw InvariantError("custom schedule: table must be non-empty");
    for (double v : table) checked(v, "custom table entry");
    RateSchedule s;
    s.kind_ = Kind::custom_table;
    s.table_ = std::move(table);
    return s;
  }

  Kind kind() const { return kind_; }

  double at(std::size_t t) const {
    switch (kind_) {
      case Kind::constant:
        return base_;
      case Kind::geometric:
        return base_ * std::pow(ratio_, static_cast<double>(t));
      case Kind::harmonic:
        return base_ / (1.0 + static_cast<double>(t));
      case Kind::custom_table:
        if (t >= table_.size())
          throw InvariantError("custom schedule: step " + std::to_string(t) +
                               " beyond table of size " +
                               std::to_string(table_.size()));
        return table_[t];
    }
    throw InvariantError("schedule: unknown kind");
  }

 private:
  static double checked(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
      throw InvariantError(std::string(what) + " outside [0,1]");
    return v;
  }

  Kind kind_ = Kind::constant;
  double base_ = 0.0;
  double ratio_ = 0.5;
  std::vector<double> table_;
};

using AlphaSchedule = RateSchedule;

}  // namespace collapselab

#pragma once

#include <cmath>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"

namespace collapselab {

// A joint distribution p(u, v) on a pair of finite supports, row-major.
class JointTable {
 public:
  JointTable(SupportPtr row_labels, SupportPtr col_labels,
             std::vector<double> joint)
      : rows_(std::move(row_labels)),
        cols_(std::move(col_labels)),
        joint_(std::move(joint)) {
    validate();
  }

  const SupportPtr& row_labels() const { return rows_; }
  const SupportPtr& col_labels() const { return cols_; }
  std::size_t n_rows() const { return rows_->size(); }
  std::size_t n_cols() const { return cols_->size(); }
  double at(std::size_t r, std::size_t c) const {
    return joint_[r * n_cols() + c];
  }
  const std::vector<double>& values() const { return joint_; }

  Categorical row_marginal() const {
    std::vector<double> m(n_rows(), 0.0);
    for (std::size_t r = 0; r < n_rows(); ++r)
      for (std::size_t c = 0; c < n_cols(); ++c) m[r] += at(r, c);
    return Categorical(rows_, std::move(m));
  }

  Categorical col_marginal() const {
    std::vector<double> m(n_cols(), 0.0);
    for (std::size_t r = 0; r < n_rows(); ++r)
      for (std::size_t c = 0; c < n_cols(); ++c) m[c] += at(r, c);
    return Categorical(cols_, std::move(m));
  }

 private:
  void validate() {
    if (!rows_ || !cols_ || rows_->empty() || cols_->empty())
      throw InvariantError("JointTable: empty labels");
    if (joint_.size() != rows_->size() * cols_->size())
      throw InvariantError("JointTable: matrix shape mismatch");
    double total = 0.0;
    for (double v : joint_) {
      if (!(v >= 0.0)) throw InvariantError("JointTable: negative entry");
      total += v;
    }
    const double drift = std::abs(total - 1.0);
    if (drift <= kSimplexTolerance) return;
    if (drift <= kRenormalizeLimit) {
      for (double& v : joint_) v /= total;
      return;
    }
    throw InvariantError("JointTable: entries sum outside tolerance");
  }

  SupportPtr rows_;
  SupportPtr cols_;
  std::vector<double> joint_;
};

// I(U;V) in bits. Zero cells contribute nothing (0 log 0 = 0).
inline double mutual_information(const JointTable& j) {
  const Categorical pu = j.row_marginal();
  const Categorical pv = j.col_marginal();
  double mi = 0.0;
  for (std::size_t r = 0; r < j.n_rows(); ++r) {
    for (std::size_t c = 0; c < j.n_cols(); ++c) {
      const double puv = j.at(r, c);
      if (puv == 0.0) continue;
      mi += puv * std::log2(puv / (pu.prob(r) * pv.prob(c)));
    }
  }
  if (mi < 0.0) {
    if (mi < -1e-9)
      throw InvariantError("mutual_information: negative beyond rounding");
    mi = 0.0;
  }
  return mi;
}

}  // namespace collapselab

#pragma once

#include <cmath>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/joint_table.hpp"

namespace collapselab {

struct TvBoundCheck {
  double lhs = 0.0;   // TV(alpha*P + (1-alpha)*Q, Q)
  double rhs = 0.0;   // alpha * TV(P, Q)
  bool holds = false; // lhs == rhs within 1e-12 and lhs <= alpha
};

// The mixture moves away from Q by exactly alpha * TV(P,Q), and never by
// more than alpha: P' - Q = alpha (P - Q).
inline TvBoundCheck tv_mixture_bound_check(const Categorical& p,
                                           const Categorical& q,
                                           double alpha) {
  TvBoundCheck check;
  check.lhs = tv_distance(mix(alpha, p, q), q);
  check.rhs = alpha * tv_distance(p, q);
  check.holds = std::abs(check.lhs - check.rhs) <= 1e-12 &&
                check.lhs <= alpha + 1e-12;
  return check;
}

// A row-stochastic channel X -> Y.
class Channel {
 public:
  Channel(std::size_t n_in, std::size_t n_out, std::vector<double> rows)
      : n_in_(n_in), n_out_(n_out), rows_(std::move(rows)) {
    if (rows_.size() != n_in_ * n_out_)
      throw InvariantError("Channel: matrix shape mismatch");
    for (std::size_t x = 0; x < n_in_; ++x) {
      double total = 0.0;
      for (std::size_t y = 0; y < n_out_; ++y) {
        const double v = at(x, y);
        if (!(v >= 0.0)) throw InvariantError("Channel: negative entry");
        total += v;
      }
      if (std::abs(total - 1.0) > kRenormalizeLimit)
        throw InvariantError("Channel: row " + std::to_string(x) +
                             " is not stochastic");
    }
  }

  static Channel identity(std::size_t n) {
    std::vector<double> rows(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rows[i * n + i] = 1.0;
    return Channel(n, n, std::move(rows));
  }

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  double at(std::size_t x, std::size_t y) const { return rows_[x * n_out_ + y]; }

 private:
  std::size_t n_in_;
  std::size_t n_out_;
  std::vector<double> rows_;
};

struct DpiResult {
  double i_mx_bits = 0.0;
  double i_my_bits = 0.0;
};

// Pushes X through the channel to get the joint of (M, Y) and returns both
// mutual informations. For the Markov chain M -> X -> Y, I(M;Y) <= I(M;X).
inline DpiResult dpi_chain(const JointTable& joint_mx, const Channel& channel) {
  if (channel.n_in() != joint_mx.n_cols())
    throw InvariantError("dpi_chain: channel input does not match X");
  const std::size_t n_m = joint_mx.n_rows();
  const std::size_t n_y = channel.n_out();
  std::vector<double> joint_my(n_m * n_y, 0.0);
  for (std::size_t m = 0; m < n_m; ++m)
    for (std::size_t x = 0; x < joint_mx.n_cols(); ++x) {
      const double pmx = joint_mx.at(m, x);
      if (pmx == 0.0) continue;
      for (std::size_t y = 0; y < n_y; ++y)
        joint_my[m * n_y + y] += pmx * channel.at(x, y);
    }

  DpiResult result;
  result.i_mx_bits = mutual_information(joint_mx);
  result.i_my_bits = mutual_information(
      JointTable(joint_mx.row_labels(), indexed_support(n_y),
                 std::move(joint_my)));
  return result;
}

}  // namespace collapselab

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/sim/loop.hpp"

namespace collapselab {

// Fit of the one-step bound y <= c*x + delta. `c` and `delta` are the least
// squares estimates constrained to c in (0,1], delta >= 0;
// `delta_certified` additionally absorbs the worst positive residual, so
// y_t <= c*x_t + delta_certified holds at every observed step and the
// iterated geometric bound built from it is a true envelope.
struct ContractionReport {
  std::string component;        // "symbolic" | "causal" | "statistical" | "overall"
  std::vector<double> inputs;   // x_t
  std::vector<double> outputs;  // y_t
  double c = 1.0;
  double delta = 0.0;
  double delta_certified = 0.0;
  double residual_rms = 0.0;
  double residual_max = 0.0;    // max |y - (c x + delta)|
  std::vector<double> bound;    // iterated envelope over a series (when set)
  bool bound_satisfied = false;
};

inline double iterated_bound(double c, double delta, double d0,
                             std::uint64_t n) {
  if (!(c > 0.0 && c <= 1.0))
    throw InvariantError("iterated_bound: c must be in (0,1]");
  if (!(delta >= 0.0)) throw InvariantError("iterated_bound: delta must be >= 0");
  if (!(d0 >= 0.0)) throw InvariantError("iterated_bound: d0 must be >= 0");
  const double nd = static_cast<double>(n);
  if (c == 1.0) return d0 + nd * delta;
  const double cn = std::pow(c, nd);
  return cn * d0 + delta * (1.0 - cn) / (1.0 - c);
}

namespace detail {

inline constexpr double kMinContraction = 1e-12;

inline void fit_affine_contraction(const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   ContractionReport* report) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2)
    throw InvariantError("contraction fit: need at least 2 (x,y) pairs");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]) || xs[i] < 0.0 ||
        ys[i] < 0.0)
      throw InvariantError("contraction fit: infinite or negative value");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double nd = static_cast<double>(n);
  const double var_x = sxx - sx * sx / nd;

  double c = 1.0, delta = 0.0;
  if (var_x <= 1e-30) {
    // constant predictor: the slope is unidentified, report no contraction
    c = 1.0;
    delta = std::max(0.0, (sy - sx) / nd);
  } else {
    const auto clamp_c = [](double v) {
      return v < kMinContraction ? kMinContraction : (v > 1.0 ? 1.0 : v);
    };
    const auto sse = [&](double cc, double dd) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (cc * xs[i] + dd);
        s += r * r;
      }
      return s;
    };
    // unconstrained optimum, then the active-constraint corners
    const double c_free = (sxy - sx * sy / nd) / var_x;
    const double c0 = clamp_c(c_free);
    const double d0 = std::max(0.0, (sy - c0 * sx) / nd);
    const double c1 = sxx > 0.0 ? clamp_c(sxy / sxx) : 1.0;  // delta pinned at 0
    const double c2 = 1.0;
    const double d2 = std::max(0.0, (sy - sx) / nd);
    c = c0;
    delta = d0;
    double best = sse(c0, d0);
    if (sse(c1, 0.0) < best) {
      c = c1;
      delta = 0.0;
      best = sse(c1, 0.0);
    }
    if (sse(c2, d2) < best) {
      c = c2;
      delta = d2;
    }
  }

  double rss = 0.0, max_abs = 0.0, max_pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (c * xs[i] + delta);
    rss += r * r;
    max_abs = std::max(max_abs, std::abs(r));
    max_pos = std::max(max_pos, r);
  }
  report->inputs = xs;
  report->outputs = ys;
  report->c = c;
  report->delta = delta;
  report->delta_certified = delta + max_pos;
  report->residual_rms = std::sqrt(rss / nd);
  report->residual_max = max_abs;
}

}  // namespace detail

// Fits D^{t+1} ~ c D^t + delta over a divergence series D^0..D^n and checks
// the series against the iterated envelope built from (c, delta_certified).
inline ContractionReport estimate_contraction(const std::vector<double>& series,
                                              std::string component = "overall") {
  if (series.size() < 3)
    throw InvariantError("estimate_contraction: series needs >= 3 values");
  std::vector<double> xs(series.begin(), series.end() - 1);
  std::vector<double> ys(series.begin() + 1, series.end());
  ContractionReport report;
  report.component = std::move(component);
  detail::fit_affine_contraction(xs, ys, &report);
  report.bound.resize(series.size());
  report.bound_satisfied = true;
  for (std::size_t i = 0; i < series.size(); ++i) {
    report.bound[i] = iterated_bound(report.c, report.delta_certified,
                                     series[0], i);
    if (series[i] > report.bound[i] + 1e-9) report.bound_satisfied = false;
  }
  return report;
}

// Measures the statistical one-step factor: across seeds, the mean of
// KL(P || step_finite(P,Q,alpha,n,seed)) against (1-alpha) KL(P||Q), with
// the finite-sample excess reported as delta.
inline ContractionReport stat_factor_check(const Categorical& p,
                                           const Categorical& q, double alpha,
                                           std::size_t n, std::size_t n_seeds,
                                           std::uint64_t master_seed = 0) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvariantError("stat_factor_check: alpha must be in [0,1]");
  if (n_seeds < 1)
    throw InvariantError("stat_factor_check: need at least one seed");
  const double d0 = kl_divergence(p, q);

  ContractionReport report;
  report.component = "statistical";
  report.c = 1.0 - alpha;
  double sum = 0.0, rss = 0.0, max_pos = 0.0, max_abs = 0.0;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const Categorical next =
        step_finite(p, q, alpha, n, derive_seed(master_seed, s, 0x5F));
    const double d = kl_divergence(p, next);
    report.inputs.push_back(d0);
    report.outputs.push_back(d);
    sum += d;
  }
  const double mean = sum / static_cast<double>(n_seeds);
  if (!std::isfinite(mean) || !std::isfinite(d0)) {
    // a dropped symbol makes the raw divergence infinite; record that
    // honestly rather than folding it into residual arithmetic
    const double inf = std::numeric_limits<double>::infinity();
    report.delta = inf;
    report.delta_certified = inf;
    report.residual_rms = inf;
    report.residual_max = inf;
    report.bound = {d0, inf};
    report.bound_satisfied = true;
    return report;
  }
  report.delta = std::max(0.0, mean - report.c * d0);
  for (double d : report.outputs) {
    const double r = d - (report.c * d0 + report.delta);
    rss += r * r;
    max_abs = std::max(max_abs, std::abs(r));
    max_pos = std::max(max_pos, r);
  }
  report.delta_certified = report.delta + max_pos;
  report.residual_rms = std::sqrt(rss / static_cast<double>(n_seeds));
  report.residual_max = max_abs;
  report.bound = {d0, report.c * d0 + report.delta};
  report.bound_satisfied = mean <= report.c * d0 + report.delta + 1e-12;
  return report;
}

}  // namespace collapselab

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "collapselab/errors.hpp"

namespace collapselab {

inline double median(std::vector<double> values) {
  if (values.empty()) throw InvariantError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2]
               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2)
    throw InvariantError("linear_fit: need at least 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double nd = static_cast<double>(n);
  const double var_x = sxx - sx * sx / nd;
  if (var_x <= 0.0) throw InvariantError("linear_fit: degenerate x values");
  LinearFit fit;
  fit.slope = (sxy - sx * sy / nd) / var_x;
  fit.intercept = (sy - fit.slope * sx) / nd;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / nd;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss_res += r * r;
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace collapselab

#pragma once

#include <cstdint>
#include <vector>

#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/schedule.hpp"

namespace collapselab {

struct NoiseModel {
  enum class Kind { none, gaussian_embedding };
  Kind kind = Kind::none;
  double sigma = 0.0;  // std-dev of the per-step mean perturbation

  void validate() const {
    if (!(sigma >= 0.0)) throw InvariantError("NoiseModel: sigma must be >= 0");
    if (kind == Kind::none && sigma != 0.0)
      throw InvariantError("NoiseModel: kind none requires sigma = 0");
  }
};

struct DriftConfig {
  double mu_true = 0.0;  // mu_P, the restoring target
  double mu0 = 0.0;      // common starting mean across seeds
  RateSchedule schedule = RateSchedule::constant(0.0);
  NoiseModel noise;
  std::size_t steps = 1;
  std::size_t n_seeds = 2;
  std::uint64_t master_seed = 0;
};

struct DriftResult {
  std::vector<double> mean;      // cross-seed mean of mu_t, size steps+1
  std::vector<double> variance;  // cross-seed sample variance, size steps+1
};

// Simulates the scalar recursion mu_{t+1} = (1-a_t) mu_t + a_t mu_true + xi_t
// directly, one walker per seed, and aggregates across seeds per step.
inline DriftResult mean_drift_sim(const DriftConfig& config) {
  config.noise.validate();
  if (config.n_seeds < 2)
    throw InvariantError("mean_drift_sim: need at least 2 seeds");
  if (config.steps < 1)
    throw InvariantError("mean_drift_sim: steps must be >= 1");

  const std::size_t rows = config.steps + 1;
  // accumulate sum and sum-of-squares per t; cross-seed order is fixed by
  // the seed index, so results never depend on scheduling
  std::vector<double> sum(rows, 0.0), sumsq(rows, 0.0);
  for (std::size_t s = 0; s < config.n_seeds; ++s) {
    Rng rng(derive_seed(config.master_seed, s, 0xD21F));
    double mu = config.mu0;
    for (std::size_t t = 0; t < rows; ++t) {
      sum[t] += mu;
      sumsq[t] += mu * mu;
      if (t == config.steps) break;
      const double alpha = config.schedule.at(t);
      const double xi = config.noise.kind == NoiseModel::Kind::gaussian_embedding
                            ? config.noise.sigma * rng.normal()
                            : 0.0;
      mu = (1.0 - alpha) * mu + alpha * config.mu_true + xi;
    }
  }

  DriftResult result;
  result.mean.resize(rows);
  result.variance.resize(rows);
  const double n = static_cast<double>(config.n_seeds);
  for (std::size_t t = 0; t < rows; ++t) {
    const double m = sum[t] / n;
    result.mean[t] = m;
    double var = (sumsq[t] - n * m * m) / (n - 1.0);
    result.variance[t] = var > 0.0 ? var : 0.0;
  }
  return result;
}

}  // namespace collapselab

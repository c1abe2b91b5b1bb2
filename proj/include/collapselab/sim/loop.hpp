#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/schedule.hpp"

namespace collapselab {

// One idealised update: Q' = alpha*P + (1-alpha)*Q, no sampling.
inline Categorical step_ideal(const Categorical& p, const Categorical& q,
                              double alpha) {
  return mix(alpha, p, q);
}

// Q_t = (1 - (1-alpha)^t) P + (1-alpha)^t Q0, for constant alpha in (0,1].
inline Categorical closed_form_ideal(const Categorical& p,
                                     const Categorical& q0, double alpha,
                                     std::uint64_t t) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvariantError("closed_form_ideal: alpha must be in (0,1]");
  const double residual = std::pow(1.0 - alpha, static_cast<double>(t));
  return mix(1.0 - residual, p, q0);
}

// One finite-sample update: fit n draws from the alpha-mixture.
inline Categorical step_finite(const Categorical& p, const Categorical& q,
                               double alpha, std::size_t n,
                               std::uint64_t seed) {
  const Categorical target = mix(alpha, p, q);
  return fit_empirical(sample(target, n, seed), target.support());
}

enum class Capacity { infinite, finite_sample };

struct LoopConfig {
  Categorical true_dist;      // P
  Categorical initial_model;  // Q0
  RateSchedule schedule = RateSchedule::constant(0.0);
  std::size_t sample_size = 1;  // ignored under infinite capacity
  std::size_t steps = 1;
  std::uint64_t master_seed = 0;
  Capacity capacity = Capacity::finite_sample;
  std::optional<FeatureMap> embedding;  // defaults to the index embedding

  void validate() const {
    require_same_support(true_dist, initial_model, "LoopConfig");
    if (steps < 1) throw InvariantError("LoopConfig: steps must be >= 1");
    if (capacity == Capacity::finite_sample && sample_size < 1)
      throw InvariantError("LoopConfig: sample_size must be >= 1");
  }
};

struct TrajectoryRecord {
  std::size_t t = 0;
  double alpha = 0.0;         // schedule value at this t
  double entropy_bits = 0.0;  // H(Q_t)
  double kl_bits = 0.0;       // KL(P||Q_t), may be +inf
  double kl_smoothed_bits = 0.0;
  double tv = 0.0;            // TV(P, Q_t)
  std::vector<double> mu;     // mean embedding of Q_t
  std::size_t support_size = 0;
  double entropy_drop = 0.0;  // H(Q_t) - H(Q_{t+1}); NaN on the final record
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // size steps + 1, t = 0..steps
};

using StateObserver = std::function<void(std::size_t t, const Categorical&)>;

// Runs the self-training loop and records metrics at every t including t=0.
// Per-step sampling seeds derive from (master_seed, t), so two runs of the
// same config are bit-identical.
inline Trajectory run_trajectory(const LoopConfig& config,
                                 const StateObserver& observer = nullptr) {
  config.validate();
  const Categorical& p = config.true_dist;
  const FeatureMap phi = config.embedding.has_value()
                             ? *config.embedding
                             : FeatureMap::index_embedding(p.support());
  // Smoothing only matters when states can lose support, i.e. under finite
  // samples; ideal mixtures keep the raw KL finite and the smoothed copy
  // equal to it.
  const double pseudocount =
      config.capacity == Capacity::finite_sample
          ? 1.0 / (10.0 * static_cast<double>(config.sample_size))
          : 0.0;

  Trajectory trajectory;
  trajectory.records.reserve(config.steps + 1);
  Categorical q = config.initial_model;
  for (std::size_t t = 0; t <= config.steps; ++t) {
    if (observer) observer(t, q);
    TrajectoryRecord rec;
    rec.t = t;
    rec.alpha = config.schedule.at(t);
    rec.entropy_bits = entropy(q);
    rec.kl_bits = kl_divergence(p, q);
    rec.kl_smoothed_bits = kl_divergence_smoothed(p, q, pseudocount);
    rec.tv = tv_distance(p, q);
    rec.mu = mean_embed(q, phi);
    rec.support_size = q.support_size();
    rec.entropy_drop = std::numeric_limits<double>::quiet_NaN();
    trajectory.records.push_back(std::move(rec));
    if (t == config.steps) break;

    const double alpha = config.schedule.at(t);
    q = config.capacity == Capacity::infinite
            ? step_ideal(p, q, alpha)
            : step_finite(p, q, alpha, config.sample_size,
                          derive_seed(config.master_seed, t, 0));
    trajectory.records.back().entropy_drop =
        trajectory.records.back().entropy_bits - entropy(q);
  }
  return trajectory;
}

}  // namespace collapselab

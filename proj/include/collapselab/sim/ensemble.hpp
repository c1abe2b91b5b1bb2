#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/schedule.hpp"
#include "collapselab/sim/loop.hpp"

namespace collapselab {

struct EnsembleConfig {
  std::vector<Categorical> models;  // Q_0^i
  std::vector<double> weights;      // omega_i, non-negative, sum 1
  RateSchedule schedule = RateSchedule::constant(0.0);
  std::size_t sample_size = 1;
  std::size_t steps = 1;
  std::uint64_t master_seed = 0;

  void validate(const Categorical& p) const {
    if (models.empty()) throw InvariantError("EnsembleConfig: no models");
    if (weights.size() != models.size())
      throw InvariantError("EnsembleConfig: weight/model count mismatch");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InvariantError("EnsembleConfig: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance)
      throw InvariantError("EnsembleConfig: weights must sum to 1");
    for (const Categorical& q : models)
      require_same_support(p, q, "EnsembleConfig");
    if (sample_size < 1 || steps < 1)
      throw InvariantError("EnsembleConfig: sample_size and steps must be >= 1");
  }
};

inline Categorical ensemble_mixture(const std::vector<Categorical>& models,
                                    const std::vector<double>& weights) {
  std::vector<double> probs(models.front().size(), 0.0);
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t x = 0; x < probs.size(); ++x)
      probs[x] += weights[i] * models[i].prob(x);
  return Categorical(models.front().support(), std::move(probs));
}

// One synchronous ensemble update: every model retrains on the same mixture
// alpha*P + (1-alpha)*R with its own sampling noise, R = sum_i omega_i Q^i.
// Model j's seed is derive_seed(master, step_index, j), which is exactly the
// single-model convention when j = 0.
inline std::vector<Categorical> ensemble_step(const EnsembleConfig& config,
                                              const Categorical& p,
                                              double alpha,
                                              std::size_t step_index) {
  config.validate(p);
  const Categorical r = ensemble_mixture(config.models, config.weights);
  std::vector<Categorical> next;
  next.reserve(config.models.size());
  for (std::size_t j = 0; j < config.models.size(); ++j)
    next.push_back(step_finite(p, r, alpha, config.sample_size,
                               derive_seed(config.master_seed, step_index, j)));
  return next;
}

struct EnsembleRecord {
  std::size_t t = 0;
  double alpha = 0.0;
  double entropy_mixture_bits = 0.0;     // H(R_t)
  double kl_mixture_bits = 0.0;          // KL(P||R_t), may be +inf
  double kl_mixture_smoothed_bits = 0.0;
  double tv_true = 0.0;                  // TV(P, R_t)
  double tv_step = 0.0;                  // TV(R_{t-1}, R_t); NaN at t = 0
  double max_pairwise_tv = 0.0;          // consensus spread across models
  std::size_t support_size = 0;          // of R_t
};

struct EnsembleTrajectory {
  std::vector<EnsembleRecord> records;  // size steps + 1
};

using EnsembleObserver =
    std::function<void(std::size_t t, const std::vector<Categorical>&)>;

inline EnsembleTrajectory run_ensemble(const EnsembleConfig& config,
                                       const Categorical& p,
                                       const EnsembleObserver& observer = nullptr) {
  config.validate(p);
  const double pseudocount =
      1.0 / (10.0 * static_cast<double>(config.sample_size));

  EnsembleTrajectory trajectory;
  trajectory.records.reserve(config.steps + 1);
  EnsembleConfig state = config;
  Categorical mixture = ensemble_mixture(state.models, state.weights);
  double arriving_tv = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t t = 0; t <= config.steps; ++t) {
    if (observer) observer(t, state.models);
    EnsembleRecord rec;
    rec.t = t;
    rec.alpha = config.schedule.at(t);
    rec.entropy_mixture_bits = entropy(mixture);
    rec.kl_mixture_bits = kl_divergence(p, mixture);
    rec.kl_mixture_smoothed_bits =
        kl_divergence_smoothed(p, mixture, pseudocount);
    rec.tv_true = tv_distance(p, mixture);
    rec.tv_step = arriving_tv;  // TV(R_{t-1}, R_t), NaN at t = 0
    rec.support_size = mixture.support_size();
    for (std::size_t i = 0; i < state.models.size(); ++i)
      for (std::size_t j = i + 1; j < state.models.size(); ++j)
        rec.max_pairwise_tv = std::max(
            rec.max_pairwise_tv, tv_distance(state.models[i], state.models[j]));
    trajectory.records.push_back(std::move(rec));
    if (t == config.steps) break;

    state.models = ensemble_step(state, p, config.schedule.at(t), t);
    Categorical next_mixture = ensemble_mixture(state.models, state.weights);
    arriving_tv = tv_distance(mixture, next_mixture);
    mixture = std::move(next_mixture);
  }
  return trajectory;
}

}  // namespace collapselab

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/neurosym/causal.hpp"
#include "collapselab/neurosym/projection.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/schedule.hpp"
#include "collapselab/sim/loop.hpp"

namespace collapselab {

// One composed update, rightmost operator first:
//   Q_{t+1} = statistical_fit_alpha( causal_correct( project_symbolic(Q_t) ) )
// A disabled projection acts as the identity (full-simplex feasible set);
// a disabled corrector likewise.
inline Categorical pipeline_step(const Categorical& q, const Categorical& p,
                                 double alpha,
                                 const SymbolicConstraintSet* constraints,
                                 const CausalCorrector* corrector,
                                 std::size_t n, std::uint64_t seed,
                                 std::size_t t) {
  Categorical state = constraints ? project_symbolic(q, *constraints).dist : q;
  if (corrector) state = causal_correct(state, p, *corrector, t);
  return step_finite(p, state, alpha, n, seed);
}

struct PipelineConfig {
  Categorical true_dist;
  Categorical initial_model;
  RateSchedule schedule = RateSchedule::constant(0.0);
  std::size_t sample_size = 1;
  std::size_t steps = 1;
  std::uint64_t master_seed = 0;
  std::optional<SymbolicConstraintSet> constraints;
  std::optional<CausalCorrector> corrector;

  void validate() const {
    require_same_support(true_dist, initial_model, "PipelineConfig");
    if (sample_size < 1 || steps < 1)
      throw InvariantError("PipelineConfig: sample_size and steps must be >= 1");
    if (corrector.has_value()) corrector->validate();
  }
};

struct PipelineStateRecord {
  std::size_t t = 0;
  double alpha = 0.0;
  double entropy_bits = 0.0;
  double kl_bits = 0.0;  // KL(P||Q_t)
  double kl_smoothed_bits = 0.0;
  double tv = 0.0;
  std::size_t support_size = 0;
};

// Divergences to P through the stages of step t -> t+1.
struct PipelineStageRecord {
  std::size_t t = 0;
  double d_state = 0.0;      // KL(P||Q_t)
  double d_projected = 0.0;  // KL(P||Pi(Q_t))
  double d_corrected = 0.0;  // KL(P||C(Pi(Q_t)))
  double d_next = 0.0;       // KL(P||Q_{t+1})
  double d_state_smoothed = 0.0;
  double d_projected_smoothed = 0.0;
  double d_corrected_smoothed = 0.0;
  double d_next_smoothed = 0.0;
};

struct PipelineTrajectory {
  std::vector<PipelineStateRecord> states;  // size steps + 1
  std::vector<PipelineStageRecord> stages;  // size steps

  std::vector<double> kl_series(bool smoothed = false) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const PipelineStateRecord& rec : states)
      out.push_back(smoothed ? rec.kl_smoothed_bits : rec.kl_bits);
    return out;
  }
};

// Per-step sampling seed is derive_seed(master, t, 0) — the run_trajectory
// convention — so the pipeline with both operators disabled reproduces the
// plain finite-sample loop bit for bit.
inline PipelineTrajectory run_pipeline(const PipelineConfig& config,
                                       const StateObserver& observer = nullptr) {
  config.validate();
  const Categorical& p = config.true_dist;
  const double pseudocount =
      1.0 / (10.0 * static_cast<double>(config.sample_size));
  const SymbolicConstraintSet* constraints =
      config.constraints.has_value() ? &*config.constraints : nullptr;
  const CausalCorrector* corrector =
      config.corrector.has_value() ? &*config.corrector : nullptr;

  PipelineTrajectory trajectory;
  trajectory.states.reserve(config.steps + 1);
  trajectory.stages.reserve(config.steps);
  Categorical q = config.initial_model;
  for (std::size_t t = 0; t <= config.steps; ++t) {
    if (observer) observer(t, q);
    PipelineStateRecord rec;
    rec.t = t;
    rec.alpha = config.schedule.at(t);
    rec.entropy_bits = entropy(q);
    rec.kl_bits = kl_divergence(p, q);
    rec.kl_smoothed_bits = kl_divergence_smoothed(p, q, pseudocount);
    rec.tv = tv_distance(p, q);
    rec.support_size = q.support_size();
    trajectory.states.push_back(rec);
    if (t == config.steps) break;

    PipelineStageRecord stage;
    stage.t = t;
    stage.d_state = rec.kl_bits;
    stage.d_state_smoothed = rec.kl_smoothed_bits;
    Categorical projected = constraints
                                ? project_symbolic(q, *constraints).dist
                                : q;
    stage.d_projected = kl_divergence(p, projected);
    stage.d_projected_smoothed =
        kl_divergence_smoothed(p, projected, pseudocount);
    Categorical corrected =
        corrector ? causal_correct(projected, p, *corrector, t) : projected;
    stage.d_corrected = kl_divergence(p, corrected);
    stage.d_corrected_smoothed =
        kl_divergence_smoothed(p, corrected, pseudocount);
    q = step_finite(p, corrected, config.schedule.at(t), config.sample_size,
                    derive_seed(config.master_seed, t, 0));
    stage.d_next = kl_divergence(p, q);
    stage.d_next_smoothed = kl_divergence_smoothed(p, q, pseudocount);
    trajectory.stages.push_back(stage);
  }
  return trajectory;
}

}  // namespace collapselab

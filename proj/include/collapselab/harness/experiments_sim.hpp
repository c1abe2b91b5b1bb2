#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "collapselab/harness/experiment_context.hpp"
#include "collapselab/harness/stats.hpp"
#include "collapselab/joint_table.hpp"
#include "collapselab/sim/bounds.hpp"
#include "collapselab/sim/drift.hpp"
#include "collapselab/sim/ensemble.hpp"
#include "collapselab/sim/loop.hpp"

namespace collapselab {

namespace detail {

inline std::string mu_field(const std::vector<double>& mu) {
  std::string out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i) out += ";";
    out += csv_double(mu[i]);
  }
  return out;
}

// one-sided 99% normal quantile
inline constexpr double kZ99 = 2.3263478740408408;

// an inline {"labels": ..., "probs": ...} block, if the config carries one
inline std::optional<Categorical> dist_param(const Json& params,
                                             const char* key,
                                             const std::string& context) {
  if (!params.contains(key)) return std::nullopt;
  return categorical_from_json(params.at(key), context + "." + key);
}

}  // namespace detail

// Idealised loop vs the closed form, per alpha.
inline RunManifest run_prop1_convergence(const ExperimentConfig& config) {
  check_keys(config.params,
             {"support", "alphas", "steps", "true_dist", "initial_model"},
             "prop1-convergence.params");
  const std::size_t support = param_size(config.params, "support", 16);
  const std::vector<double> alphas =
      param_double_list(config.params, "alphas", {0.01, 0.1, 0.5});
  const std::size_t steps = param_size(config.params, "steps", 1000);
  const std::optional<Categorical> given_p =
      detail::dist_param(config.params, "true_dist", "prop1-convergence");
  const std::optional<Categorical> given_q0 =
      detail::dist_param(config.params, "initial_model", "prop1-convergence");
  if (given_p.has_value() != given_q0.has_value())
    throw ConfigError(
        "prop1-convergence: give both 'true_dist' and 'initial_model' or "
        "neither");

  ExperimentContext context(config);
  SupportPtr labels = given_p ? given_p->support() : indexed_support(support);
  const Categorical p =
      given_p ? *given_p
              : Categorical::random_simplex(
                    labels, derive_seed(config.master_seed, 0xA1));
  const Categorical q0 =
      given_q0 ? *given_q0
               : Categorical::random_simplex(
                     labels, derive_seed(config.master_seed, 0xA2));
  require_same_support(p, q0, "prop1-convergence");
  const double tv0 = tv_distance(p, q0);

  auto csv = context.make_csv(
      "convergence.csv",
      {"alpha", "t", "coord_error", "tv_error", "entropy_bits", "kl_bits", "tv"});
  Json per_alpha = Json::object();
  double worst_coord = 0.0, worst_tv = 0.0;
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw ConfigError("prop1-convergence: alphas must lie in (0,1]");
    Categorical q = q0;
    double max_coord = 0.0, max_tv = 0.0;
    for (std::size_t t = 0; t <= steps; ++t) {
      const Categorical reference = closed_form_ideal(p, q0, alpha, t);
      double coord_error = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i)
        coord_error = std::max(coord_error,
                               std::abs(q.prob(i) - reference.prob(i)));
      const double tv = tv_distance(p, q);
      const double tv_error = std::abs(
          tv - std::pow(1.0 - alpha, static_cast<double>(t)) * tv0);
      csv->row()
          .add(alpha)
          .add(t)
          .add(coord_error)
          .add(tv_error)
          .add(entropy(q))
          .add(kl_divergence(p, q))
          .add(tv);
      max_coord = std::max(max_coord, coord_error);
      max_tv = std::max(max_tv, tv_error);
      if (t < steps) q = step_ideal(p, q, alpha);
    }
    Json entry;
    entry["max_coord_error"] = max_coord;
    entry["max_tv_error"] = max_tv;
    per_alpha[csv_double(alpha)] = entry;
    worst_coord = std::max(worst_coord, max_coord);
    worst_tv = std::max(worst_tv, max_tv);
  }
  csv.reset();

  Json summary;
  summary["per_alpha"] = per_alpha;
  summary["max_coord_error"] = worst_coord;
  summary["max_tv_error"] = worst_tv;
  summary["within_1e-10"] = worst_coord <= 1e-10 && worst_tv <= 1e-10;
  context.write_summary(summary);
  context.add_series("coord_error", "convergence.csv", "alpha", "coord_error");
  context.add_series("tv", "convergence.csv", "alpha", "tv");
  context.add_series("entropy", "convergence.csv", "alpha", "entropy_bits");
  return context.finish();
}

// Pure self-reference at finite sample size: entropy decay, support loss,
// absorption into point masses.
inline RunManifest run_thm1_entropy(const ExperimentConfig& config) {
  check_keys(config.params,
             {"support", "sample_size", "steps", "seeds", "initial_model"},
             "thm1-entropy.params");
  const std::size_t support = param_size(config.params, "support", 50);
  const std::size_t sample_size = param_size(config.params, "sample_size", 100);
  const std::size_t steps = param_size(config.params, "steps", 500);
  const std::size_t seeds = param_size(config.params, "seeds", 200);
  const std::optional<Categorical> given_q0 =
      detail::dist_param(config.params, "initial_model", "thm1-entropy");

  ExperimentContext context(config);
  SupportPtr labels = given_q0 ? given_q0->support() : indexed_support(support);
  // alpha is pinned to zero here, so the authentic distribution only anchors
  // the metric columns; the uniform reference keeps them interpretable
  const Categorical p = Categorical::uniform(labels);
  const Categorical q0 = given_q0 ? *given_q0 : p;

  auto csv = context.make_csv(
      "trajectory.csv",
      {"seed", "t", "alpha", "entropy_bits", "kl_bits", "kl_smoothed_bits",
       "tv", "mu", "support_size", "entropy_drop"});

  std::vector<double> drop_sum(steps, 0.0), drop_sumsq(steps, 0.0);
  std::vector<std::size_t> final_support;
  std::size_t absorption_violations = 0;

  for (std::size_t s = 0; s < seeds; ++s) {
    // absorption check: once a state hits support 1, every later state must
    // be the identical point mass
    bool absorbed = false;
    std::vector<double> absorbed_probs;
    const LoopConfig loop{
        .true_dist = p,
        .initial_model = q0,
        .schedule = RateSchedule::constant(0.0),
        .sample_size = sample_size,
        .steps = steps,
        .master_seed = derive_seed(config.master_seed, s, 0x7E),
        .capacity = Capacity::finite_sample,
        .embedding = {}};
    const Trajectory trajectory = run_trajectory(
        loop, [&](std::size_t, const Categorical& q) {
          if (absorbed) {
            if (q.probs() != absorbed_probs) ++absorption_violations;
          } else if (q.is_point_mass()) {
            absorbed = true;
            absorbed_probs = q.probs();
          }
        });
    for (const TrajectoryRecord& rec : trajectory.records) {
      csv->row()
          .add(s)
          .add(rec.t)
          .add(rec.alpha)
          .add(rec.entropy_bits)
          .add(rec.kl_bits)
          .add(rec.kl_smoothed_bits)
          .add(rec.tv)
          .add(detail::mu_field(rec.mu))
          .add(rec.support_size)
          .add(rec.entropy_drop);
      if (rec.t < steps) {
        drop_sum[rec.t] += rec.entropy_drop;
        drop_sumsq[rec.t] += rec.entropy_drop * rec.entropy_drop;
      }
    }
    final_support.push_back(trajectory.records.back().support_size);
  }
  csv.reset();

  const double n = static_cast<double>(seeds);
  Json mean_drop = Json::array();
  Json se_drop = Json::array();
  std::size_t supermartingale_violations = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double mean = drop_sum[t] / n;
    double var = (drop_sumsq[t] - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    const double se = std::sqrt(var / n);
    mean_drop.push_back(mean);
    se_drop.push_back(se);
    if (mean < -detail::kZ99 * se) ++supermartingale_violations;
  }

  Json histogram = Json::object();
  std::size_t collapsed = 0;
  for (std::size_t size : final_support) {
    histogram[std::to_string(size)] =
        histogram.value(std::to_string(size), 0) + 1;
    if (size == 1) ++collapsed;
  }

  Json summary;
  summary["mean_entropy_drop"] = mean_drop;
  summary["se_entropy_drop"] = se_drop;
  summary["supermartingale_violations"] = supermartingale_violations;
  summary["supermartingale_ok"] = supermartingale_violations == 0;
  summary["final_support_histogram"] = histogram;
  summary["frac_final_support_one"] = static_cast<double>(collapsed) / n;
  summary["absorption_violations"] = absorption_violations;
  context.write_summary(summary);
  context.add_series("entropy", "trajectory.csv", "seed", "entropy_bits");
  context.add_series("support_size", "trajectory.csv", "seed", "support_size");
  context.add_series("kl_smoothed", "trajectory.csv", "seed",
                     "kl_smoothed_bits");
  return context.finish();
}

// Scalar mean recursion: random walk without a restoring force, saturating
// variance with one.
inline RunManifest run_thm3_drift(const ExperimentConfig& config) {
  check_keys(config.params,
             {"sigma", "steps", "seeds", "alphas", "mu_true", "mu0"},
             "thm3-drift.params");
  const double sigma = param_double(config.params, "sigma", 0.01);
  const std::size_t steps = param_size(config.params, "steps", 10000);
  const std::size_t seeds = param_size(config.params, "seeds", 1000);
  const std::vector<double> alphas =
      param_double_list(config.params, "alphas", {0.0, 0.1});
  const double mu_true = param_double(config.params, "mu_true", 0.0);
  const double mu0 = param_double(config.params, "mu0", 0.0);

  ExperimentContext context(config);
  auto csv = context.make_csv("drift.csv", {"alpha", "t", "mean_mu", "var_mu"});
  Json per_alpha = Json::object();
  for (double alpha : alphas) {
    const DriftConfig drift{
        .mu_true = mu_true,
        .mu0 = mu0,
        .schedule = RateSchedule::constant(alpha),
        .noise = {NoiseModel::Kind::gaussian_embedding, sigma},
        .steps = steps,
        .n_seeds = seeds,
        .master_seed = config.master_seed};
    const DriftResult result = mean_drift_sim(drift);
    for (std::size_t t = 0; t <= steps; ++t)
      csv->row().add(alpha).add(t).add(result.mean[t]).add(result.variance[t]);

    Json entry;
    if (alpha == 0.0) {
      std::vector<double> ts(steps + 1);
      for (std::size_t t = 0; t <= steps; ++t) ts[t] = static_cast<double>(t);
      const LinearFit fit = linear_fit(ts, result.variance);
      entry["variance_slope"] = fit.slope;
      entry["variance_intercept"] = fit.intercept;
      entry["r2"] = fit.r2;
      entry["sigma_sq"] = sigma * sigma;
      entry["slope_over_sigma_sq"] =
          sigma > 0.0 ? fit.slope / (sigma * sigma) : 0.0;
    } else {
      // stationary variance of the AR(1) recursion
      const double rho = 1.0 - alpha;
      const double prediction = sigma * sigma / (1.0 - rho * rho);
      double tail = 0.0;
      const std::size_t tail_start = steps - steps / 10;
      for (std::size_t t = tail_start; t <= steps; ++t)
        tail += result.variance[t];
      tail /= static_cast<double>(steps - tail_start + 1);
      entry["plateau_mean"] = tail;
      entry["stationary_prediction"] = prediction;
      entry["plateau_over_prediction"] =
          prediction > 0.0 ? tail / prediction : 0.0;
    }
    per_alpha[csv_double(alpha)] = entry;
  }
  csv.reset();

  Json summary;
  summary["per_alpha"] = per_alpha;
  context.write_summary(summary);
  context.add_series("var_mu", "drift.csv", "alpha", "var_mu");
  context.add_series("mean_mu", "drift.csv", "alpha", "mean_mu");
  return context.finish();
}

// The mixture never moves further from the state than alpha, and moves
// exactly alpha * TV(P,Q).
inline RunManifest run_lemma_tv(const ExperimentConfig& config) {
  check_keys(config.params, {"trials", "max_support"}, "lemma-tv.params");
  const std::size_t trials = param_size(config.params, "trials", 1000);
  const std::size_t max_support = param_size(config.params, "max_support", 16);
  if (max_support < 2) throw ConfigError("lemma-tv: max_support must be >= 2");

  ExperimentContext context(config);
  auto csv = context.make_csv(
      "bound.csv", {"trial", "support", "alpha", "tv_pq", "lhs", "rhs", "holds"});
  Rng rng(derive_seed(config.master_seed, 0x17));
  double max_abs_diff = 0.0, max_lhs_minus_alpha = -1.0;
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t support = 2 + rng.below(max_support - 1);
    SupportPtr labels = indexed_support(support);
    const Categorical p = Categorical::random_simplex(labels, rng.next_u64());
    const Categorical q = Categorical::random_simplex(labels, rng.next_u64());
    const double alpha = rng.uniform();
    const TvBoundCheck check = tv_mixture_bound_check(p, q, alpha);
    csv->row()
        .add(trial)
        .add(support)
        .add(alpha)
        .add(tv_distance(p, q))
        .add(check.lhs)
        .add(check.rhs)
        .add(check.holds);
    max_abs_diff = std::max(max_abs_diff, std::abs(check.lhs - check.rhs));
    max_lhs_minus_alpha = std::max(max_lhs_minus_alpha, check.lhs - alpha);
    if (!check.holds) ++violations;
  }
  csv.reset();

  Json summary;
  summary["trials"] = trials;
  summary["max_abs_diff"] = max_abs_diff;
  summary["max_lhs_minus_alpha"] = max_lhs_minus_alpha;
  summary["violations"] = violations;
  summary["all_hold"] = violations == 0;
  context.write_summary(summary);
  return context.finish();
}

// Closed-loop ensemble: consensus settling and drift away from the truth.
inline RunManifest run_thm4_ensemble(const ExperimentConfig& config) {
  check_keys(config.params,
             {"support", "n_models", "sample_size", "steps", "seeds", "models",
              "weights"},
             "thm4-ensemble.params");
  const std::size_t support = param_size(config.params, "support", 30);
  std::size_t n_models = param_size(config.params, "n_models", 3);
  const std::size_t sample_size = param_size(config.params, "sample_size", 200);
  const std::size_t steps = param_size(config.params, "steps", 300);
  const std::size_t seeds = param_size(config.params, "seeds", 100);

  // an explicit model list overrides the sampled-portrait initialization
  std::vector<Categorical> given_models;
  if (config.params.contains("models")) {
    if (!config.params.at("models").is_array() ||
        config.params.at("models").empty())
      throw ConfigError("thm4-ensemble: 'models' must be a non-empty array");
    std::size_t i = 0;
    for (const Json& dist : config.params.at("models"))
      given_models.push_back(categorical_from_json(
          dist, "thm4-ensemble.models[" + std::to_string(i++) + "]"));
    n_models = given_models.size();
  }
  std::vector<double> weights = param_double_list(
      config.params, "weights",
      std::vector<double>(n_models, 1.0 / static_cast<double>(n_models)));
  if (weights.size() != n_models)
    throw ConfigError("thm4-ensemble: weights/models count mismatch");
  if (n_models < 1) throw ConfigError("thm4-ensemble: n_models must be >= 1");

  ExperimentContext context(config);
  SupportPtr labels = given_models.empty() ? indexed_support(support)
                                           : given_models.front().support();
  const Categorical p = Categorical::uniform(labels);

  auto csv = context.make_csv(
      "ensemble.csv",
      {"seed", "t", "alpha", "tv_step", "kl_bits", "kl_smoothed_bits",
       "entropy_bits", "support_size", "max_pairwise_tv"});
  std::vector<double> tv_step_t1, tv_step_final, kl_first, kl_final;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t run_seed = derive_seed(config.master_seed, s, 0xE5);
    // each model starts as an independent finite-sample portrait of P
    std::vector<Categorical> models = given_models;
    if (models.empty())
      for (std::size_t j = 0; j < n_models; ++j)
        models.push_back(fit_empirical(
            sample(p, sample_size, derive_seed(run_seed, 0xA11, j)), labels));
    const EnsembleConfig ensemble{
        .models = std::move(models),
        .weights = weights,
        .schedule = RateSchedule::constant(0.0),
        .sample_size = sample_size,
        .steps = steps,
        .master_seed = run_seed};
    const EnsembleTrajectory trajectory = run_ensemble(ensemble, p);
    for (const EnsembleRecord& rec : trajectory.records)
      csv->row()
          .add(s)
          .add(rec.t)
          .add(rec.alpha)
          .add(rec.tv_step)
          .add(rec.kl_mixture_bits)
          .add(rec.kl_mixture_smoothed_bits)
          .add(rec.entropy_mixture_bits)
          .add(rec.support_size)
          .add(rec.max_pairwise_tv);
    tv_step_t1.push_back(trajectory.records[1].tv_step);
    tv_step_final.push_back(trajectory.records[steps].tv_step);
    kl_first.push_back(trajectory.records[0].kl_mixture_smoothed_bits);
    kl_final.push_back(trajectory.records[steps].kl_mixture_smoothed_bits);
  }
  csv.reset();

  Json summary;
  summary["median_tv_step_t1"] = median(tv_step_t1);
  summary["median_tv_step_final"] = median(tv_step_final);
  summary["consensus_settled"] = median(tv_step_final) < median(tv_step_t1);
  summary["median_kl_smoothed_t0"] = median(kl_first);
  summary["median_kl_smoothed_final"] = median(kl_final);
  summary["kl_grew"] = median(kl_final) > median(kl_first);
  context.write_summary(summary);
  context.add_series("tv_step", "ensemble.csv", "seed", "tv_step");
  context.add_series("kl_smoothed", "ensemble.csv", "seed", "kl_smoothed_bits");
  context.add_series("entropy", "ensemble.csv", "seed", "entropy_bits");
  return context.finish();
}

namespace detail {

inline JointTable random_joint(Rng& rng, std::size_t n_rows, std::size_t n_cols) {
  for (;;) {
    std::vector<double> values(n_rows * n_cols, 0.0);
    double total = 0.0;
    for (double& v : values) {
      const double u = rng.uniform();
      const bool zero = rng.uniform() < 0.2;  // exact zeros exercise 0 log 0
      v = zero ? 0.0 : u * u;
      total += v;
    }
    if (total <= 0.0) continue;
    for (double& v : values) v /= total;
    return JointTable(indexed_support(n_rows), indexed_support(n_cols),
                      std::move(values));
  }
}

inline Channel random_channel(Rng& rng, std::size_t n_in, std::size_t n_out) {
  std::vector<double> rows(n_in * n_out, 0.0);
  for (std::size_t x = 0; x < n_in; ++x) {
    double total = 0.0;
    while (total <= 0.0) {
      total = 0.0;
      for (std::size_t y = 0; y < n_out; ++y) {
        const double u = rng.uniform();
        rows[x * n_out + y] = rng.uniform() < 0.2 ? 0.0 : u * u;
        total += rows[x * n_out + y];
      }
    }
    for (std::size_t y = 0; y < n_out; ++y) rows[x * n_out + y] /= total;
  }
  return Channel(n_in, n_out, std::move(rows));
}

}  // namespace detail

// Pushing data through any channel can only lose information about the
// mechanism behind it.
inline RunManifest run_dpi_demo(const ExperimentConfig& config) {
  check_keys(config.params, {"trials", "m_size", "x_size", "y_size"},
             "dpi-demo.params");
  const std::size_t trials = param_size(config.params, "trials", 1000);
  const std::size_t m_size = param_size(config.params, "m_size", 4);
  const std::size_t x_size = param_size(config.params, "x_size", 4);
  const std::size_t y_size = param_size(config.params, "y_size", 4);

  ExperimentContext context(config);
  auto csv = context.make_csv("dpi.csv", {"trial", "i_mx", "i_my", "slack"});
  Rng rng(derive_seed(config.master_seed, 0xD9));
  double max_violation = -1.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const JointTable joint = detail::random_joint(rng, m_size, x_size);
    const Channel channel = detail::random_channel(rng, x_size, y_size);
    const DpiResult result = dpi_chain(joint, channel);
    csv->row()
        .add(trial)
        .add(result.i_mx_bits)
        .add(result.i_my_bits)
        .add(result.i_mx_bits - result.i_my_bits);
    max_violation = std::max(max_violation, result.i_my_bits - result.i_mx_bits);
  }
  csv.reset();

  // identity channel preserves everything; a constant channel destroys it
  const JointTable joint = detail::random_joint(rng, m_size, x_size);
  const DpiResult id_result = dpi_chain(joint, Channel::identity(x_size));
  std::vector<double> const_rows(x_size * y_size,
                                 1.0 / static_cast<double>(y_size));
  const DpiResult const_result =
      dpi_chain(joint, Channel(x_size, y_size, std::move(const_rows)));

  Json summary;
  summary["trials"] = trials;
  summary["max_violation"] = max_violation;
  summary["all_within_1e-12"] = max_violation <= 1e-12;
  summary["identity_abs_gap"] =
      std::abs(id_result.i_my_bits - id_result.i_mx_bits);
  summary["constant_channel_i_my"] = const_result.i_my_bits;
  context.write_summary(summary);
  return context.finish();
}

}  // namespace collapselab

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "collapselab/complexity/aid.hpp"
#include "collapselab/complexity/bdm.hpp"
#include "collapselab/complexity/ctm.hpp"
#include "collapselab/harness/experiment_context.hpp"
#include "collapselab/harness/stats.hpp"
#include "collapselab/harness/table_cache.hpp"
#include "collapselab/neurosym/contraction.hpp"
#include "collapselab/neurosym/pipeline.hpp"
#include "collapselab/neurosym/selection.hpp"

namespace collapselab {

namespace detail {

inline unsigned resolve_workers(std::size_t requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 16u);
}

inline MissPolicy parse_miss_policy(const std::string& name) {
  if (name == "error") return MissPolicy::error;
  if (name == "max-plus-one") return MissPolicy::max_plus_one;
  throw ConfigError("miss_policy must be 'error' or 'max-plus-one', got '" +
                    name + "'");
}

inline TableRequest table_request_from_params(const Json& params,
                                              std::uint64_t default_budget) {
  TableRequest request;
  request.n_states = static_cast<int>(param_size(params, "states", 2));
  request.n_symbols = static_cast<int>(param_size(params, "symbols", 2));
  request.budget = param_size(params, "budget", default_budget);
  request.mode.workers = resolve_workers(param_size(params, "workers", 0));
  const std::size_t sample = param_size(params, "sample", 0);
  if (sample > 0) {
    request.mode.sampled = true;
    request.mode.sample_size = sample;
    request.mode.sample_seed = param_size(params, "sample_seed", 1);
  }
  return request;
}

}  // namespace detail

// Builds (or reuses) a halting-output census and records its summary.
inline RunManifest run_ctm_census(const ExperimentConfig& config) {
  check_keys(config.params,
             {"states", "symbols", "budget", "workers", "sample",
              "sample_seed", "exhaustive_limit"},
             "ctm-census.params");
  TableRequest request = detail::table_request_from_params(config.params, 1000);
  request.mode.exhaustive_limit =
      param_size(config.params, "exhaustive_limit", 100'000'000);

  ExperimentContext context(config);
  const std::filesystem::path table_path = table_cache_ensure(request);
  const OutputFrequencyTable table = load_table(table_path);
  context.add_table_checksum(table_path);

  auto csv = context.make_csv("census.csv", {"output", "count"});
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.counts.begin(),
                                                          table.counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [output, count] : rows) csv->row().add(output).add(count);
  csv.reset();

  Json top = Json::array();
  for (std::size_t i = 0; i < rows.size() && i < 10; ++i)
    top.push_back({{"output", rows[i].first}, {"count", rows[i].second}});

  Json summary;
  summary["space_id"] = table.space_id.to_string();
  summary["total_machines"] = table.total_machines;
  summary["halted_machines"] = table.halted_machines;
  summary["halted_fraction"] =
      static_cast<double>(table.halted_machines) /
      static_cast<double>(table.total_machines);
  summary["distinct_outputs"] = table.counts.size();
  summary["top_outputs"] = top;
  summary["table_path"] = table_path.string();
  context.write_summary(summary);
  return context.finish();
}

// Scores every string of a fixed length against a census.
inline RunManifest run_bdm_scan(const ExperimentConfig& config) {
  check_keys(config.params,
             {"states", "symbols", "budget", "workers", "k", "length",
              "miss_policy"},
             "bdm-scan.params");
  const TableRequest request =
      detail::table_request_from_params(config.params, 500);
  const std::size_t k = param_size(config.params, "k", 4);
  const std::size_t length = param_size(config.params, "length", 8);
  const MissPolicy miss_policy = detail::parse_miss_policy(
      param_string(config.params, "miss_policy", "max-plus-one"));
  const std::size_t n_symbols = static_cast<std::size_t>(request.n_symbols);
  double n_objects_d = 1.0;
  for (std::size_t i = 0; i < length; ++i) n_objects_d *= n_symbols;
  if (n_objects_d > 1e6)
    throw ConfigError("bdm-scan: symbols^length too large to scan");
  const std::size_t n_objects = static_cast<std::size_t>(n_objects_d);

  ExperimentContext context(config);
  const std::filesystem::path table_path = table_cache_ensure(request);
  const OutputFrequencyTable table = load_table(table_path);
  context.add_table_checksum(table_path);

  BdmConfig cfg;
  cfg.block_size = k;
  cfg.ctm.miss_policy = miss_policy;

  auto csv = context.make_csv("scan.csv", {"object", "bdm_bits", "miss_flag"});
  std::vector<double> values;
  values.reserve(n_objects);
  std::vector<std::pair<std::string, double>> constants;
  for (std::size_t code = 0; code < n_objects; ++code) {
    std::string object(length, '0');
    std::size_t v = code;
    for (std::size_t i = length; i-- > 0;) {
      object[i] = static_cast<char>('0' + v % n_symbols);
      v /= n_symbols;
    }
    const ComplexityEstimate estimate = bdm(object, cfg, table);
    csv->row().add(object).add(estimate.value_bits).add(estimate.miss_policy_applied);
    values.push_back(estimate.value_bits);
    bool constant = true;
    for (char c : object)
      if (c != object[0]) constant = false;
    if (constant) constants.emplace_back(object, estimate.value_bits);
  }
  csv.reset();

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t decile_index =
      n_objects / 10 == 0 ? 0 : n_objects / 10 - 1;
  const double decile_threshold = sorted[decile_index];

  Json constants_json = Json::object();
  bool all_in_decile = true;
  for (const auto& [object, value] : constants) {
    std::size_t rank = 0;
    for (double v : sorted)
      if (v < value - 1e-12) ++rank;
    Json entry;
    entry["bdm_bits"] = value;
    entry["rank"] = rank;
    entry["in_lowest_decile"] = value <= decile_threshold + 1e-12;
    if (!(value <= decile_threshold + 1e-12)) all_in_decile = false;
    constants_json[object] = entry;
  }

  Json summary;
  summary["n_objects"] = n_objects;
  summary["k"] = k;
  summary["decile_threshold"] = decile_threshold;
  summary["constants"] = constants_json;
  summary["constants_in_lowest_decile"] = all_in_decile;
  context.write_summary(summary);
  return context.finish();
}

// Ranks a perturbation batch by absolute complexity shift.
inline RunManifest run_aid_rank(const ExperimentConfig& config) {
  check_keys(config.params,
             {"states", "symbols", "budget", "workers", "k", "object",
              "perturbations", "miss_policy"},
             "aid-rank.params");
  const TableRequest request =
      detail::table_request_from_params(config.params, 500);
  const std::size_t k = param_size(config.params, "k", 2);
  const std::string object =
      param_string(config.params, "object", "01011011");
  const std::string spec =
      param_string(config.params, "perturbations", "flip@all");
  const MissPolicy miss_policy = detail::parse_miss_policy(
      param_string(config.params, "miss_policy", "max-plus-one"));

  ExperimentContext context(config);
  const std::filesystem::path table_path = table_cache_ensure(request);
  const OutputFrequencyTable table = load_table(table_path);
  context.add_table_checksum(table_path);

  BdmConfig cfg;
  cfg.block_size = k;
  cfg.ctm.miss_policy = miss_policy;
  const std::vector<Perturbation> taus =
      parse_perturbation_spec(spec, object.size());
  const std::vector<RankedPerturbation> ranked =
      rank_perturbations(object, taus, cfg, table);

  auto csv = context.make_csv(
      "rank.csv", {"rank", "perturbation", "delta_bits", "abs_delta_bits"});
  for (std::size_t i = 0; i < ranked.size(); ++i)
    csv->row()
        .add(i)
        .add(ranked[i].tau.to_string())
        .add(ranked[i].delta_bits)
        .add(std::abs(ranked[i].delta_bits));
  csv.reset();

  Json summary;
  summary["object"] = object;
  summary["n_perturbations"] = ranked.size();
  summary["top_perturbation"] = ranked.front().tau.to_string();
  summary["top_delta_bits"] = ranked.front().delta_bits;
  context.write_summary(summary);
  return context.finish();
}

namespace detail {

// A low-complexity target with mass on every symbol but a pronounced tail.
inline Categorical dyadic_tail_dist(const SupportPtr& labels) {
  std::vector<double> probs(labels->size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::pow(2.0, -static_cast<double>(std::min<std::size_t>(i, 12)));
    total += probs[i];
  }
  for (double& v : probs) v /= total;
  return Categorical(labels, std::move(probs));
}

inline Json contraction_to_json(const ContractionReport& report,
                                bool include_series) {
  Json j;
  j["component"] = report.component;
  j["c"] = report.c;
  j["delta"] = report.delta;
  j["delta_certified"] = report.delta_certified;
  j["residual_rms"] = report.residual_rms;
  j["residual_max"] = report.residual_max;
  j["bound_satisfied"] = report.bound_satisfied;
  j["n_points"] = report.inputs.size();
  if (include_series) {
    j["inputs"] = report.inputs;
    j["outputs"] = report.outputs;
    j["bound"] = report.bound;
  }
  return j;
}

}  // namespace detail

// Composed neurosymbolic update with measured per-component contraction.
inline RunManifest run_pipeline_contraction(const ExperimentConfig& config) {
  check_keys(config.params,
             {"support", "sample_size", "steps", "seeds", "alpha", "eta_c",
              "phi", "corrector_mode", "projection", "projection_order",
              "member_complexity_true", "member_complexity_uniform",
              "member_complexity_point"},
             "pipeline-contraction.params");
  const std::size_t support = param_size(config.params, "support", 16);
  const std::size_t sample_size =
      param_size(config.params, "sample_size", 10000);
  const std::size_t steps = param_size(config.params, "steps", 40);
  const std::size_t seeds = param_size(config.params, "seeds", 20);
  const double alpha = param_double(config.params, "alpha", 0.05);
  const double eta_c = param_double(config.params, "eta_c", 0.8);
  const double phi = param_double(config.params, "phi", 1.0);
  const std::string corrector_mode =
      param_string(config.params, "corrector_mode", "exact");
  const std::string projection =
      param_string(config.params, "projection", "members");
  const std::string projection_order =
      param_string(config.params, "projection_order", "member-given-state");

  ExperimentContext context(config);
  SupportPtr labels = indexed_support(support);
  const Categorical p = detail::dyadic_tail_dist(labels);
  const Categorical q0 = Categorical::uniform(labels);

  std::optional<SymbolicConstraintSet> constraints;
  if (projection == "members") {
    // the feasible set a low-complexity generator family would induce: the
    // target law itself, the uniform law, and every single-symbol degeneracy
    std::vector<ConstraintMember> members;
    members.push_back(
        {p, param_double(config.params, "member_complexity_true", 4.0),
         "true-law"});
    members.push_back(
        {Categorical::uniform(labels),
         param_double(config.params, "member_complexity_uniform", 6.0),
         "uniform-law"});
    const double point_bits =
        param_double(config.params, "member_complexity_point", 12.0);
    for (std::size_t i = 0; i < support; ++i)
      members.push_back({Categorical::point_mass(labels, i), point_bits,
                         "const-" + (*labels)[i]});
    const ProjectionOrder order =
        projection_order == "state-given-member"
            ? ProjectionOrder::kl_state_given_member
            : ProjectionOrder::kl_member_given_state;
    constraints.emplace(std::move(members), order);
  } else if (projection != "off") {
    throw ConfigError("pipeline-contraction: projection must be 'members' or 'off'");
  }

  std::optional<CausalCorrector> corrector;
  if (corrector_mode == "exact" || corrector_mode == "sampled") {
    corrector = CausalCorrector{
        eta_c, RateSchedule::constant(phi),
        derive_seed(config.master_seed, 0xCE),
        corrector_mode == "exact" ? CausalCorrector::Mode::exact
                                  : CausalCorrector::Mode::sampled};
  } else if (corrector_mode != "off") {
    throw ConfigError(
        "pipeline-contraction: corrector_mode must be exact|sampled|off");
  }

  auto states_csv = context.make_csv(
      "pipeline_states.csv",
      {"seed", "t", "alpha", "entropy_bits", "kl_bits", "kl_smoothed_bits",
       "tv", "support_size"});
  auto stages_csv = context.make_csv(
      "pipeline_stages.csv",
      {"seed", "t", "d_state", "d_projected", "d_corrected", "d_next",
       "d_state_smoothed", "d_projected_smoothed", "d_corrected_smoothed",
       "d_next_smoothed"});

  std::vector<double> sym_x, sym_y, cau_x, cau_y, stat_x, stat_y;
  Json per_seed = Json::array();
  bool all_bounds = true;
  bool any_smoothed_fit = false;
  for (std::size_t s = 0; s < seeds; ++s) {
    const PipelineConfig run{
        .true_dist = p,
        .initial_model = q0,
        .schedule = RateSchedule::constant(alpha),
        .sample_size = sample_size,
        .steps = steps,
        .master_seed = derive_seed(config.master_seed, s, 0xB1),
        .constraints = constraints,
        .corrector = corrector};
    const PipelineTrajectory trajectory = run_pipeline(run);
    for (const PipelineStateRecord& rec : trajectory.states)
      states_csv->row()
          .add(s)
          .add(rec.t)
          .add(rec.alpha)
          .add(rec.entropy_bits)
          .add(rec.kl_bits)
          .add(rec.kl_smoothed_bits)
          .add(rec.tv)
          .add(rec.support_size);
    bool finite = true;
    for (const PipelineStageRecord& rec : trajectory.stages) {
      stages_csv->row()
          .add(s)
          .add(rec.t)
          .add(rec.d_state)
          .add(rec.d_projected)
          .add(rec.d_corrected)
          .add(rec.d_next)
          .add(rec.d_state_smoothed)
          .add(rec.d_projected_smoothed)
          .add(rec.d_corrected_smoothed)
          .add(rec.d_next_smoothed);
      if (!std::isfinite(rec.d_state) || !std::isfinite(rec.d_next))
        finite = false;
    }
    for (const PipelineStageRecord& rec : trajectory.stages) {
      sym_x.push_back(finite ? rec.d_state : rec.d_state_smoothed);
      sym_y.push_back(finite ? rec.d_projected : rec.d_projected_smoothed);
      cau_x.push_back(finite ? rec.d_projected : rec.d_projected_smoothed);
      cau_y.push_back(finite ? rec.d_corrected : rec.d_corrected_smoothed);
      stat_x.push_back(finite ? rec.d_corrected : rec.d_corrected_smoothed);
      stat_y.push_back(finite ? rec.d_next : rec.d_next_smoothed);
    }
    ContractionReport overall =
        estimate_contraction(trajectory.kl_series(!finite), "overall");
    if (!finite) any_smoothed_fit = true;
    Json entry = detail::contraction_to_json(overall, true);
    entry["seed"] = s;
    entry["fit_on_smoothed_series"] = !finite;
    per_seed.push_back(std::move(entry));
    if (!overall.bound_satisfied) all_bounds = false;
  }
  states_csv.reset();
  stages_csv.reset();

  ContractionReport symbolic, causal, statistical;
  symbolic.component = "symbolic";
  causal.component = "causal";
  statistical.component = "statistical";
  detail::fit_affine_contraction(sym_x, sym_y, &symbolic);
  detail::fit_affine_contraction(cau_x, cau_y, &causal);
  detail::fit_affine_contraction(stat_x, stat_y, &statistical);

  Json report;
  report["per_seed_overall"] = per_seed;
  report["components"] = Json::object();
  report["components"]["symbolic"] = detail::contraction_to_json(symbolic, false);
  report["components"]["causal"] = detail::contraction_to_json(causal, false);
  report["components"]["statistical"] =
      detail::contraction_to_json(statistical, false);
  report["all_overall_bounds_satisfied"] = all_bounds;
  report["any_fit_on_smoothed_series"] = any_smoothed_fit;
  context.write_json("contraction_report.json", report);

  Json summary;
  summary["symbolic_c"] = symbolic.c;
  summary["causal_c"] = causal.c;
  summary["causal_c_expected"] = 1.0 - eta_c * phi;
  summary["statistical_c"] = statistical.c;
  summary["statistical_c_expected"] = 1.0 - alpha;
  summary["all_overall_bounds_satisfied"] = all_bounds;
  context.write_summary(summary);
  context.add_series("kl", "pipeline_states.csv", "seed", "kl_bits");
  context.add_series("kl_smoothed", "pipeline_states.csv", "seed",
                     "kl_smoothed_bits");
  context.add_series("entropy", "pipeline_states.csv", "seed", "entropy_bits");
  return context.finish();
}

namespace detail {

// Mechanism: a low-complexity uniform generator over the whole vocabulary.
// Distractors: one point generator per symbol and a narrow range generator,
// all with higher description length.
inline ProgramPool recovery_pool(std::size_t support, double mechanism_bits,
                                 double point_bits, double partial_bits,
                                 std::size_t partial_size) {
  SupportPtr labels = indexed_support(support);
  ProgramPool pool;
  pool.programs.push_back(Program{"uniform-generator", -1, "",
                                  Categorical::uniform(labels),
                                  mechanism_bits});
  for (std::size_t i = 0; i < support; ++i)
    pool.programs.push_back(Program{"const-" + (*labels)[i], -1, "",
                                    Categorical::point_mass(labels, i),
                                    point_bits});
  if (partial_size >= 1 && partial_size <= support) {
    std::vector<double> probs(support, 0.0);
    for (std::size_t i = 0; i < partial_size; ++i)
      probs[i] = 1.0 / static_cast<double>(partial_size);
    pool.programs.push_back(Program{"range-generator", -1, "",
                                    Categorical(labels, std::move(probs)),
                                    partial_bits});
  }
  pool.validate();
  return pool;
}

}  // namespace detail

// Small-sample support recovery: frequency fitting vs penalized program
// selection.
inline RunManifest run_support_recovery(const ExperimentConfig& config) {
  check_keys(config.params,
             {"support", "n_small", "seeds", "lambda", "k_tolerance",
              "mechanism_bits", "point_bits", "partial_bits", "partial_size",
              "lambda_grid"},
             "support-recovery.params");
  const std::size_t support = param_size(config.params, "support", 16);
  const std::size_t n_small = param_size(config.params, "n_small", 4);
  const std::size_t seeds = param_size(config.params, "seeds", 100);
  const double lambda = param_double(config.params, "lambda", 1.0);
  const double k_tolerance = param_double(config.params, "k_tolerance", 0.0);
  const double mechanism_bits =
      param_double(config.params, "mechanism_bits", 10.0);
  const double point_bits = param_double(config.params, "point_bits", 18.0);
  const double partial_bits = param_double(config.params, "partial_bits", 20.0);
  const std::size_t partial_size = param_size(config.params, "partial_size", 4);
  const std::vector<double> lambda_grid = param_double_list(
      config.params, "lambda_grid", {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0});

  ExperimentContext context(config);
  const ProgramPool pool = detail::recovery_pool(
      support, mechanism_bits, point_bits, partial_bits, partial_size);

  auto csv = context.make_csv(
      "recovery.csv", {"seed", "stat_support", "algo_support", "true_support",
                       "selected_index", "selected_is_mechanism"});
  std::size_t n_mechanism = 0, n_full = 0, max_stat = 0;
  bool lambda_monotonic = true;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = derive_seed(config.master_seed, s, 0x5E);
    const SupportRecoveryReport report =
        support_recovery_experiment(0, n_small, pool, lambda, seed, k_tolerance);
    csv->row()
        .add(s)
        .add(report.statistical_support)
        .add(report.algorithmic_support)
        .add(report.true_support)
        .add(report.selected_index)
        .add(report.selected_is_mechanism);
    if (report.selected_is_mechanism) ++n_mechanism;
    if (report.algorithmic_support == report.true_support) ++n_full;
    max_stat = std::max(max_stat, report.statistical_support);

    // winner complexity must be non-increasing along the penalty grid
    const SampleSet data = sample(pool.at(0).output_dist, n_small, seed);
    double previous_k = std::numeric_limits<double>::infinity();
    for (double l : lambda_grid) {
      const SelectionResult winner = select_program(data, pool, l);
      const double k = pool.at(winner.index).complexity_bits;
      if (k > previous_k + 1e-12) lambda_monotonic = false;
      previous_k = k;
    }
  }
  csv.reset();

  Json summary;
  summary["seeds"] = seeds;
  summary["frac_selected_mechanism"] =
      static_cast<double>(n_mechanism) / static_cast<double>(seeds);
  summary["frac_algorithmic_full_support"] =
      static_cast<double>(n_full) / static_cast<double>(seeds);
  summary["max_statistical_support"] = max_stat;
  summary["n_small"] = n_small;
  summary["lambda_monotonic"] = lambda_monotonic;
  context.write_summary(summary);
  return context.finish();
}

}  // namespace collapselab

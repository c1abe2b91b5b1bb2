// Command-line surface for the collapse-dynamics laboratory: reproducible
// experiments (simulate/ensemble/drift/dpi/pipeline/recover), the machine
// census and complexity scoring tools (ctm/bdm/aid/program), and plot-data
// export (report).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collapselab/harness/experiments.hpp"
#include "collapselab/harness/report.hpp"
#include "collapselab/version.hpp"

namespace {

using namespace collapselab;

void run_config_experiment(const std::string& path,
                           const std::vector<std::string>& allowed,
                           const char* subcommand) {
  const ExperimentConfig config = load_config(path);
  bool ok = false;
  for (const std::string& id : allowed)
    if (config.experiment == id) ok = true;
  if (!ok) {
    std::string expect;
    for (const std::string& id : allowed) expect += " " + id;
    throw ConfigError(std::string(subcommand) + ": config experiment '" +
                      config.experiment + "' not in:" + expect);
  }
  const RunManifest manifest = run_experiment(config);
  std::cout << "experiment " << manifest.experiment << " done in "
            << manifest.elapsed_ms << " ms\n"
            << "outputs in " << manifest.output_dir.string() << " (";
  for (std::size_t i = 0; i < manifest.outputs.size(); ++i)
    std::cout << (i ? ", " : "") << manifest.outputs[i];
  std::cout << ")\n";
}

std::vector<std::string> read_objects(const std::string& input) {
  if (input.empty() || input[0] != '@') return {input};
  std::ifstream in(input.substr(1));
  if (!in) throw ConfigError("cannot open object file: " + input.substr(1));
  std::vector<std::string> objects;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) objects.push_back(line);
  }
  if (objects.empty()) throw ConfigError("object file is empty");
  return objects;
}

void emit(std::ostream& out, const std::string& text,
          const std::string& out_path) {
  out << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file: " + out_path);
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collapselab: self-training collapse dynamics and "
               "algorithmic-probability estimators on finite distributions"};
  app.set_version_flag("--version", std::string(kArtifactVersion));
  app.require_subcommand(1);

  // ---- experiment families driven by a config file ----
  struct {
    std::string simulate, ensemble, drift, dpi, census, scan, pipeline, recover;
  } cfg;

  auto* simulate = app.add_subcommand(
      "simulate", "Run a single-model collapse/convergence experiment");
  simulate->add_option("--config", cfg.simulate, "experiment config JSON")
      ->required();
  simulate->callback([&] {
    run_config_experiment(cfg.simulate,
                          {"prop1-convergence", "thm1-entropy", "lemma-tv"},
                          "simulate");
  });

  auto* ensemble =
      app.add_subcommand("ensemble", "Run a multi-model consensus experiment");
  ensemble->add_option("--config", cfg.ensemble, "experiment config JSON")
      ->required();
  ensemble->callback([&] {
    run_config_experiment(cfg.ensemble, {"thm4-ensemble"}, "ensemble");
  });

  auto* drift = app.add_subcommand(
      "drift", "Run the scalar mean-drift (random walk vs restored) experiment");
  drift->add_option("--config", cfg.drift, "experiment config JSON")->required();
  drift->callback(
      [&] { run_config_experiment(cfg.drift, {"thm3-drift"}, "drift"); });

  auto* dpi = app.add_subcommand(
      "dpi", "Run the information-loss demonstration over random channels");
  dpi->add_option("--config", cfg.dpi, "experiment config JSON")->required();
  dpi->callback([&] { run_config_experiment(cfg.dpi, {"dpi-demo"}, "dpi"); });

  // ---- ctm ----
  auto* ctm_cmd = app.add_subcommand("ctm", "Halting-output census tools");
  ctm_cmd->require_subcommand(1);
  struct {
    std::size_t states = 2, symbols = 2;
    std::uint64_t budget = 1000;
    std::size_t sample = 0;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    std::string out;
  } build;
  auto* ctm_build = ctm_cmd->add_subcommand("build", "Enumerate a machine space");
  ctm_build->add_option("--states", build.states, "machine states")->required();
  ctm_build->add_option("--symbols", build.symbols, "tape symbols (default 2)");
  ctm_build->add_option("--budget", build.budget, "step budget")->required();
  ctm_build->add_option("--sample", build.sample,
                        "sample this many machines instead of all");
  ctm_build->add_option("--seed", build.seed, "sampling seed");
  ctm_build->add_option("--workers", build.workers, "worker threads (0 = auto)");
  ctm_build->add_option("--out", build.out, "output table path")->required();
  ctm_build->callback([&] {
    CensusMode mode;
    mode.workers = detail::resolve_workers(build.workers);
    if (build.sample > 0) {
      mode.sampled = true;
      mode.sample_size = build.sample;
      mode.sample_seed = build.seed;
    }
    const OutputFrequencyTable table =
        build_frequency_table(static_cast<int>(build.states),
                              static_cast<int>(build.symbols), build.budget, mode);
    persist_table(table, build.out);
    std::cout << "census " << table.space_id.to_string() << ": "
              << table.halted_machines << "/" << table.total_machines
              << " machines halted, " << table.counts.size()
              << " distinct outputs -> " << build.out << "\n";
  });
  auto* ctm_census = ctm_cmd->add_subcommand(
      "census", "Run the cached census experiment from a config");
  ctm_census->add_option("--config", cfg.census, "experiment config JSON")
      ->required();
  ctm_census->callback(
      [&] { run_config_experiment(cfg.census, {"ctm-census"}, "ctm census"); });

  // ---- bdm ----
  auto* bdm_cmd = app.add_subcommand("bdm", "Block-decomposition scoring");
  bdm_cmd->require_subcommand(1);
  struct {
    std::string table, input, miss = "max-plus-one", out;
    std::size_t k = 1;
  } score;
  auto* bdm_score = bdm_cmd->add_subcommand("score", "Score objects from a table");
  bdm_score->add_option("--table", score.table, "census table path")->required();
  bdm_score->add_option("--k", score.k, "block size")->required();
  bdm_score->add_option("--input", score.input, "object string or @file")
      ->required();
  bdm_score->add_option("--miss-policy", score.miss, "error | max-plus-one");
  bdm_score->add_option("--out", score.out, "also write the CSV here");
  bdm_score->callback([&] {
    const OutputFrequencyTable table = load_table(score.table);
    BdmConfig config;
    config.block_size = score.k;
    config.ctm.miss_policy = detail::parse_miss_policy(score.miss);
    std::string text = "object,bdm_bits,miss_flag\n";
    for (const std::string& object : read_objects(score.input)) {
      const ComplexityEstimate estimate = bdm(object, config, table);
      text += object + "," + csv_double(estimate.value_bits) + "," +
              (estimate.miss_policy_applied ? "1" : "0") + "\n";
    }
    emit(std::cout, text, score.out);
  });
  auto* bdm_scan = bdm_cmd->add_subcommand(
      "scan", "Score every string of a fixed length (config driven)");
  bdm_scan->add_option("--config", cfg.scan, "experiment config JSON")
      ->required();
  bdm_scan->callback(
      [&] { run_config_experiment(cfg.scan, {"bdm-scan"}, "bdm scan"); });

  // ---- aid ----
  auto* aid_cmd =
      app.add_subcommand("aid", "Perturbation analysis over block scores");
  aid_cmd->require_subcommand(1);
  struct {
    std::string table, object, perturbations = "flip@all";
    std::string miss = "max-plus-one", out, config;
    std::size_t k = 1;
  } rank;
  auto* aid_rank = aid_cmd->add_subcommand("rank", "Rank perturbations by |delta|");
  aid_rank->add_option("--table", rank.table, "census table path");
  aid_rank->add_option("--k", rank.k, "block size");
  aid_rank->add_option("--object", rank.object, "object string");
  aid_rank->add_option("--perturbations", rank.perturbations,
                       "spec: flip@P;sub@P=S;del@P+L;flip@all");
  aid_rank->add_option("--miss-policy", rank.miss, "error | max-plus-one");
  aid_rank->add_option("--out", rank.out, "also write the CSV here");
  aid_rank->add_option("--config", rank.config,
                       "run as a cached experiment instead of direct flags");
  aid_rank->callback([&] {
    if (!rank.config.empty()) {
      run_config_experiment(rank.config, {"aid-rank"}, "aid rank");
      return;
    }
    if (rank.table.empty() || rank.object.empty())
      throw ConfigError("aid rank: --table and --object are required "
                        "(or use --config)");
    const OutputFrequencyTable table = load_table(rank.table);
    BdmConfig config;
    config.block_size = rank.k;
    config.ctm.miss_policy = detail::parse_miss_policy(rank.miss);
    const std::vector<RankedPerturbation> ranked = rank_perturbations(
        rank.object, parse_perturbation_spec(rank.perturbations, rank.object.size()),
        config, table);
    std::string text = "rank,perturbation,delta_bits\n";
    for (std::size_t i = 0; i < ranked.size(); ++i)
      text += std::to_string(i) + "," + ranked[i].tau.to_string() + "," +
              csv_double(ranked[i].delta_bits) + "\n";
    emit(std::cout, text, rank.out);
  });

  // ---- pipeline ----
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "Composed projection/correction/fit update loop");
  pipeline_cmd->require_subcommand(1);
  auto* pipeline_run = pipeline_cmd->add_subcommand("run", "Run from a config");
  pipeline_run->add_option("--config", cfg.pipeline, "experiment config JSON")
      ->required();
  pipeline_run->callback([&] {
    run_config_experiment(cfg.pipeline, {"pipeline-contraction"}, "pipeline run");
  });

  // ---- program ----
  auto* program_cmd =
      app.add_subcommand("program", "Penalized program selection over a pool");
  program_cmd->require_subcommand(1);
  struct {
    std::string pool, data;
    double lambda = 1.0;
  } select;
  auto* program_select = program_cmd->add_subcommand(
      "select", "Pick argmin[nll + lambda * K] for observed draws");
  program_select->add_option("--pool", select.pool, "program pool JSON")
      ->required();
  program_select->add_option("--data", select.data, "draws JSON")->required();
  program_select->add_option("--lambda", select.lambda, "complexity penalty")
      ->required();
  program_select->callback([&] {
    std::ifstream pool_in(select.pool);
    if (!pool_in) throw ConfigError("cannot open pool: " + select.pool);
    Json pool_json;
    std::ifstream data_in(select.data);
    if (!data_in) throw ConfigError("cannot open data: " + select.data);
    Json data_json;
    try {
      pool_in >> pool_json;
      data_in >> data_json;
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("invalid JSON input: ") + e.what());
    }
    const ProgramPool pool = pool_from_json(pool_json, "pool");
    const SampleSet data = draws_from_json(data_json, "data");
    const SelectionResult result = select_program(data, pool, select.lambda);
    std::cout << "selected_index,name,score_bits,nll_bits,complexity_bits\n"
              << result.index << "," << pool.at(result.index).name << ","
              << csv_double(result.score_bits) << ","
              << csv_double(result.nll_bits) << ","
              << csv_double(pool.at(result.index).complexity_bits) << "\n";
  });

  // ---- recover ----
  auto* recover = app.add_subcommand(
      "recover", "Small-sample support recovery: frequency fit vs program "
                 "selection");
  recover->add_option("--config", cfg.recover, "experiment config JSON")
      ->required();
  recover->callback([&] {
    run_config_experiment(cfg.recover, {"support-recovery"}, "recover");
  });

  // ---- report ----
  struct {
    std::string manifest, series, out;
  } report;
  auto* report_cmd = app.add_subcommand(
      "report", "Emit long-format plot data for a series of a finished run");
  report_cmd->add_option("--manifest", report.manifest, "manifest.json path")
      ->required();
  report_cmd->add_option("--series", report.series, "series name")->required();
  report_cmd->add_option("--out", report.out, "output CSV path");
  report_cmd->callback([&] {
    const RunManifest manifest = load_manifest(report.manifest);
    const std::filesystem::path path = emit_plot_data(
        manifest, report.series,
        report.out.empty() ? std::filesystem::path()
                           : std::filesystem::path(report.out));
    std::cout << path.string() << "\n";
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ConfigError::exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ConfigError::exit_code;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return IntegrityError::exit_code;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return InvariantError::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

#include <string>

#include "collapselab/harness/experiments_algo.hpp"
#include "collapselab/harness/experiments_sim.hpp"

namespace collapselab {

inline RunManifest run_experiment(const ExperimentConfig& config) {
  const std::string& id = config.experiment;
  if (id == "prop1-convergence") return run_prop1_convergence(config);
  if (id == "thm1-entropy") return run_thm1_entropy(config);
  if (id == "thm3-drift") return run_thm3_drift(config);
  if (id == "lemma-tv") return run_lemma_tv(config);
  if (id == "thm4-ensemble") return run_thm4_ensemble(config);
  if (id == "dpi-demo") return run_dpi_demo(config);
  if (id == "ctm-census") return run_ctm_census(config);
  if (id == "bdm-scan") return run_bdm_scan(config);
  if (id == "aid-rank") return run_aid_rank(config);
  if (id == "pipeline-contraction") return run_pipeline_contraction(config);
  if (id == "support-recovery") return run_support_recovery(config);
  throw ConfigError("unknown experiment id: " + id);
}

// A runnable default for every registry entry; parameters are the runner
// defaults, spelled out by the runner itself.
inline ExperimentConfig default_config(const std::string& id) {
  if (!is_known_experiment(id)) throw ConfigError("unknown experiment id: " + id);
  ExperimentConfig config;
  config.experiment = id;
  config.master_seed = 1;
  config.output_dir = std::filesystem::path("out") / id;
  config.params = Json::object();
  return config;
}

}  // namespace collapselab

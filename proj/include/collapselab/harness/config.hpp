#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "collapselab/json_io.hpp"

namespace collapselab {

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "prop1-convergence", "thm1-entropy",   "thm3-drift",
      "lemma-tv",          "thm4-ensemble",  "dpi-demo",
      "ctm-census",        "bdm-scan",       "aid-rank",
      "pipeline-contraction", "support-recovery"};
  return ids;
}

inline bool is_known_experiment(const std::string& id) {
  for (const std::string& known : experiment_ids())
    if (known == id) return true;
  return false;
}

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir;
  Json params = Json::object();

  Json to_json() const {
    Json j;
    j["experiment"] = experiment;
    j["master_seed"] = master_seed;
    j["output_dir"] = output_dir.string();
    j["params"] = params;
    return j;
  }
};

inline ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, {"experiment", "master_seed", "output_dir", "params"}, "config");
  if (!j.contains("experiment") || !j.at("experiment").is_string())
    throw ConfigError("config: 'experiment' (string) is required");
  ExperimentConfig config;
  config.experiment = j.at("experiment").get<std::string>();
  if (!is_known_experiment(config.experiment)) {
    std::string known;
    for (const std::string& id : experiment_ids()) known += " " + id;
    throw ConfigError("config: unknown experiment '" + config.experiment +
                      "'; known:" + known);
  }
  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_unsigned())
      throw ConfigError("config: 'master_seed' must be a non-negative integer");
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  config.output_dir = j.contains("output_dir")
                          ? std::filesystem::path(
                                j.at("output_dir").get<std::string>())
                          : std::filesystem::path("out") / config.experiment;
  if (j.contains("params")) {
    if (!j.at("params").is_object())
      throw ConfigError("config: 'params' must be an object");
    config.params = j.at("params");
  }
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + ": invalid JSON: " + e.what());
  }
  return config_from_json(j);
}

// ---- typed param readers (strict; wrong types fail loud) ----

inline double param_double(const Json& params, const char* key, double dflt) {
  if (!params.contains(key)) return dflt;
  if (!params.at(key).is_number())
    throw ConfigError(std::string("param '") + key + "' must be a number");
  return params.at(key).get<double>();
}

inline std::size_t param_size(const Json& params, const char* key,
                              std::size_t dflt) {
  if (!params.contains(key)) return dflt;
  if (!params.at(key).is_number_unsigned())
    throw ConfigError(std::string("param '") + key +
                      "' must be a non-negative integer");
  return params.at(key).get<std::size_t>();
}

inline std::string param_string(const Json& params, const char* key,
                                const std::string& dflt) {
  if (!params.contains(key)) return dflt;
  if (!params.at(key).is_string())
    throw ConfigError(std::string("param '") + key + "' must be a string");
  return params.at(key).get<std::string>();
}

inline std::vector<double> param_double_list(const Json& params,
                                             const char* key,
                                             std::vector<double> dflt) {
  if (!params.contains(key)) return dflt;
  if (!params.at(key).is_array())
    throw ConfigError(std::string("param '") + key + "' must be an array");
  try {
    return params.at(key).get<std::vector<double>>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("param '") + key + "' must hold numbers");
  }
}

}  // namespace collapselab

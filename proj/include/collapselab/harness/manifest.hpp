#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "collapselab/harness/config.hpp"
#include "collapselab/tm/table_io.hpp"
#include "collapselab/version.hpp"

namespace collapselab {

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Identifies what an experiment run consumed and produced. Metric files are
// byte-reproducible from (config, artifact version); the manifest itself
// carries the timestamp and timings and is not.
struct RunManifest {
  std::string experiment;
  std::string artifact_version = kArtifactVersion;
  std::string config_hash;
  std::string created_utc;
  std::int64_t elapsed_ms = 0;
  Json config;
  std::filesystem::path output_dir;
  std::vector<std::string> outputs;       // relative to output_dir
  Json table_checksums = Json::object();  // table file -> fnv1a64 hex
  Json series = Json::object();           // name -> {file,key_column,value_column}

  Json to_json() const {
    Json j;
    j["experiment"] = experiment;
    j["artifact_version"] = artifact_version;
    j["config_hash"] = config_hash;
    j["created_utc"] = created_utc;
    j["elapsed_ms"] = elapsed_ms;
    j["config"] = config;
    j["output_dir"] = output_dir.string();
    j["outputs"] = outputs;
    j["table_checksums"] = table_checksums;
    j["series"] = series;
    return j;
  }
};

// Hash over the run-determining parts of the config (output location is
// excluded: it does not affect the metrics).
inline std::string config_hash_hex(const ExperimentConfig& config) {
  Json j;
  j["experiment"] = config.experiment;
  j["master_seed"] = config.master_seed;
  j["params"] = config.params;
  return hex64(fnv1a64(j.dump()));
}

inline std::filesystem::path write_manifest(const RunManifest& manifest) {
  const std::filesystem::path path = manifest.output_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << manifest.to_json().dump(2) << "\n";
  return path;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": invalid JSON: " +
                      e.what());
  }
  RunManifest manifest;
  try {
    manifest.experiment = j.at("experiment").get<std::string>();
    manifest.artifact_version = j.at("artifact_version").get<std::string>();
    manifest.config_hash = j.at("config_hash").get<std::string>();
    manifest.created_utc = j.at("created_utc").get<std::string>();
    manifest.elapsed_ms = j.value("elapsed_ms", static_cast<std::int64_t>(0));
    manifest.config = j.at("config");
    manifest.output_dir =
        std::filesystem::path(j.at("output_dir").get<std::string>());
    manifest.outputs = j.at("outputs").get<std::vector<std::string>>();
    manifest.table_checksums = j.value("table_checksums", Json::object());
    manifest.series = j.value("series", Json::object());
  } catch (const Json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": missing field: " +
                      e.what());
  }
  return manifest;
}

}  // namespace collapselab

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "collapselab/harness/config.hpp"
#include "collapselab/harness/csv.hpp"
#include "collapselab/harness/manifest.hpp"

namespace collapselab {

// Bookkeeping shared by every experiment runner: output files, the series
// registry for `report`, the summary document, and the manifest.
class ExperimentContext {
 public:
  explicit ExperimentContext(const ExperimentConfig& config)
      : config_(config), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(config.output_dir);
    manifest_.experiment = config.experiment;
    manifest_.config_hash = config_hash_hex(config);
    manifest_.created_utc = utc_timestamp();
    manifest_.config = config.to_json();
    manifest_.output_dir = config.output_dir;
  }

  const ExperimentConfig& config() const { return config_; }

  std::unique_ptr<CsvWriter> make_csv(const std::string& name,
                                      const std::vector<std::string>& columns) {
    manifest_.outputs.push_back(name);
    return std::make_unique<CsvWriter>(config_.output_dir / name, columns);
  }

  // key_column empty => the series is a single aggregate keyed "aggregate"
  void add_series(const std::string& name, const std::string& file,
                  const std::string& key_column,
                  const std::string& value_column) {
    Json spec;
    spec["file"] = file;
    spec["key_column"] = key_column;
    spec["value_column"] = value_column;
    manifest_.series[name] = std::move(spec);
  }

  void add_table_checksum(const std::filesystem::path& table_path) {
    std::ifstream in(table_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    manifest_.table_checksums[table_path.string()] = hex64(fnv1a64(buf.str()));
  }

  void write_json(const std::string& name, const Json& document) {
    const std::filesystem::path path = config_.output_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << document.dump(2) << "\n";
    manifest_.outputs.push_back(name);
  }

  void write_summary(const Json& summary) { write_json("summary.json", summary); }

  RunManifest finish() {
    manifest_.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    write_manifest(manifest_);
    return manifest_;
  }

 private:
  ExperimentConfig config_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace collapselab

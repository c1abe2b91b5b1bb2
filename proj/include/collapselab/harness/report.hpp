#pragma once

#include <filesystem>
#include <string>

#include "collapselab/harness/csv.hpp"
#include "collapselab/harness/manifest.hpp"

namespace collapselab {

// Re-emits one named series from a finished run as long-format CSV
// (series,seed,t,value) for external plotting. The seed column carries the
// run key: a seed number, an alpha label, or "aggregate".
inline std::filesystem::path emit_plot_data(
    const RunManifest& manifest, const std::string& series_name,
    const std::filesystem::path& out_path = {}) {
  if (!manifest.series.contains(series_name)) {
    std::string available;
    for (const auto& [name, spec] : manifest.series.items())
      available += " " + name;
    throw ConfigError("unknown series '" + series_name + "'; available:" +
                      (available.empty() ? " (none)" : available));
  }
  const Json& spec = manifest.series.at(series_name);
  const std::string file = spec.at("file").get<std::string>();
  const std::string key_column = spec.at("key_column").get<std::string>();
  const std::string value_column = spec.at("value_column").get<std::string>();

  const CsvTable table = read_csv(manifest.output_dir / file);
  const std::size_t value_idx = table.column_index(value_column);
  const std::size_t t_idx = table.column_index("t");
  const bool keyed = !key_column.empty();
  const std::size_t key_idx = keyed ? table.column_index(key_column) : 0;

  const std::filesystem::path path =
      out_path.empty() ? manifest.output_dir / ("series_" + series_name + ".csv")
                       : out_path;
  CsvWriter writer(path, {"series", "seed", "t", "value"});
  for (const std::vector<std::string>& row : table.rows) {
    writer.row()
        .add(series_name)
        .add(keyed ? row[key_idx] : std::string("aggregate"))
        .add(row[t_idx])
        .add(row[value_idx]);
  }
  return path;
}

}  // namespace collapselab

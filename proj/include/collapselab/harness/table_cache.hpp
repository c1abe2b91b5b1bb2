#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>

#include "collapselab/errors.hpp"
#include "collapselab/tm/census.hpp"
#include "collapselab/tm/table_io.hpp"

namespace collapselab {

inline constexpr const char* kCacheEnvVar = "COLLAPSELAB_CACHE_DIR";

inline std::filesystem::path table_cache_dir() {
  if (const char* env = std::getenv(kCacheEnvVar); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(".collapselab-cache");
}

struct TableRequest {
  int n_states = 2;
  int n_symbols = 2;
  std::uint64_t budget = 1000;
  CensusMode mode;

  SpaceId space_id() const {
    SpaceId id{n_states, n_symbols, budget, kFormalismVersion};
    if (mode.sampled)
      id.formalism += "-sample" + std::to_string(mode.sample_size) + "-seed" +
                      std::to_string(mode.sample_seed);
    return id;
  }
};

inline std::filesystem::path table_cache_path(const TableRequest& request) {
  return table_cache_dir() / ("ctm-" + request.space_id().to_string() + ".tbl");
}

namespace detail {
inline std::mutex& table_build_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Returns the path of the cached census for the requested space, building
// and persisting it on a miss. A cached file that fails its integrity check
// is rebuilt. Builds are serialized; a finished file is read-only data.
inline std::filesystem::path table_cache_ensure(const TableRequest& request,
                                                std::ostream* log = nullptr) {
  const std::filesystem::path path = table_cache_path(request);
  if (std::filesystem::exists(path)) {
    try {
      const OutputFrequencyTable cached = load_table(path);
      if (cached.space_id == request.space_id()) {
        if (log) *log << "table cache hit: " << path.string() << "\n";
        return path;
      }
      if (log)
        *log << "table cache entry has wrong space id, rebuilding: "
             << path.string() << "\n";
    } catch (const IntegrityError& e) {
      if (log)
        *log << "table cache entry corrupt (" << e.what() << "), rebuilding\n";
    }
  }

  std::lock_guard<std::mutex> guard(detail::table_build_mutex());
  std::filesystem::create_directories(path.parent_path());
  const OutputFrequencyTable table = build_frequency_table(
      request.n_states, request.n_symbols, request.budget, request.mode);
  persist_table(table, path);
  if (log) *log << "table built and cached: " << path.string() << "\n";
  return path;
}

inline OutputFrequencyTable table_cache_load(const TableRequest& request,
                                             std::ostream* log = nullptr) {
  return load_table(table_cache_ensure(request, log));
}

}  // namespace collapselab

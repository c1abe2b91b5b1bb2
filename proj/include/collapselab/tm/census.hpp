#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/tm/machine.hpp"

namespace collapselab {

// Identifies a halting-output census unambiguously. Sampled builds get the
// sample parameters folded into the formalism tag so two distinct censuses
// can never share an id.
struct SpaceId {
  int n_states = 0;
  int n_symbols = 0;
  std::uint64_t budget = 0;
  std::string formalism = kFormalismVersion;

  std::string to_string() const {
    return std::to_string(n_states) + "x" + std::to_string(n_symbols) + "-b" +
           std::to_string(budget) + "-" + formalism;
  }

  bool operator==(const SpaceId&) const = default;
};

struct OutputFrequencyTable {
  SpaceId space_id;
  std::uint64_t total_machines = 0;
  std::uint64_t halted_machines = 0;
  std::map<std::string, std::uint64_t> counts;

  bool operator==(const OutputFrequencyTable&) const = default;

  std::size_t max_output_length() const {
    std::size_t len = 0;
    for (const auto& [output, count] : counts)
      if (output.size() > len) len = output.size();
    return len;
  }
};

using CountMap = std::map<std::string, std::uint64_t>;

namespace detail {

inline void census_indices(const std::vector<std::uint64_t>& indices,
                           int n_states, int n_symbols, std::uint64_t budget,
                           CountMap* counts, std::uint64_t* halted) {
  TapeWorkspace workspace(budget);
  for (std::uint64_t index : indices) {
    const TuringMachineSpec spec = decode_machine(index, n_states, n_symbols);
    const RunOutcome outcome = workspace.run(spec);
    if (outcome.status == RunStatus::halted) {
      ++(*counts)[outcome.output];
      ++(*halted);
    }
  }
}

inline void census_span(std::uint64_t begin, std::uint64_t end, int n_states,
                        int n_symbols, std::uint64_t budget, CountMap* counts,
                        std::uint64_t* halted) {
  TapeWorkspace workspace(budget);
  for (std::uint64_t index = begin; index < end; ++index) {
    const TuringMachineSpec spec = decode_machine(index, n_states, n_symbols);
    const RunOutcome outcome = workspace.run(spec);
    if (outcome.status == RunStatus::halted) {
      ++(*counts)[outcome.output];
      ++(*halted);
    }
  }
}

inline void merge_counts(CountMap* into, const CountMap& from) {
  for (const auto& [output, count] : from) (*into)[output] += count;
}

}  // namespace detail

// Censuses the index range [begin, end) with the given worker count.
// Partitioning is irrelevant to the result: per-worker count maps merge by
// summation, so any worker count yields the identical table.
inline CountMap census_range(int n_states, int n_symbols, std::uint64_t budget,
                             std::uint64_t begin, std::uint64_t end,
                             unsigned workers, std::uint64_t* halted_out) {
  if (budget < 1) throw InvariantError("census_range: budget must be >= 1");
  if (begin > end) throw InvariantError("census_range: empty range inverted");
  if (workers < 1) workers = 1;
  const std::uint64_t span = end - begin;
  if (workers > span && span > 0) workers = static_cast<unsigned>(span);

  std::vector<CountMap> partials(workers);
  std::vector<std::uint64_t> halted(workers, 0);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = begin + span * w / workers;
    const std::uint64_t hi = begin + span * (w + 1) / workers;
    threads.emplace_back(detail::census_span, lo, hi, n_states, n_symbols,
                         budget, &partials[w], &halted[w]);
  }
  for (std::thread& t : threads) t.join();

  CountMap counts;
  std::uint64_t total_halted = 0;
  for (unsigned w = 0; w < workers; ++w) {
    detail::merge_counts(&counts, partials[w]);
    total_halted += halted[w];
  }
  if (halted_out) *halted_out = total_halted;
  return counts;
}

struct CensusMode {
  bool sampled = false;
  std::uint64_t sample_size = 0;
  std::uint64_t sample_seed = 0;
  unsigned workers = 1;
  std::uint64_t exhaustive_limit = 100'000'000;  // machines
};

inline OutputFrequencyTable build_frequency_table(int n_states, int n_symbols,
                                                  std::uint64_t budget,
                                                  const CensusMode& mode = {}) {
  const std::uint64_t total = machine_count(n_states, n_symbols);
  OutputFrequencyTable table;
  table.space_id = {n_states, n_symbols, budget, kFormalismVersion};

  if (!mode.sampled) {
    if (total > mode.exhaustive_limit)
      throw InvariantError(
          "build_frequency_table: space of " + std::to_string(total) +
          " machines exceeds the exhaustive limit; use sampled mode");
    table.total_machines = total;
    table.counts = census_range(n_states, n_symbols, budget, 0, total,
                                mode.workers, &table.halted_machines);
    return table;
  }

  if (mode.sample_size < 1)
    throw InvariantError("build_frequency_table: sample size must be >= 1");
  if (mode.sample_size > total)
    throw InvariantError("build_frequency_table: sample exceeds space size");
  table.space_id.formalism += "-sample" + std::to_string(mode.sample_size) +
                              "-seed" + std::to_string(mode.sample_seed);
  table.total_machines = mode.sample_size;

  // Uniform sample of distinct indices; k == total degenerates to the full
  // enumeration so the sampled census equals the exhaustive one.
  std::vector<std::uint64_t> indices;
  indices.reserve(mode.sample_size);
  if (mode.sample_size == total) {
    for (std::uint64_t i = 0; i < total; ++i) indices.push_back(i);
  } else {
    Rng rng(derive_seed(mode.sample_seed, 0x5A4D));
    std::map<std::uint64_t, bool> seen;
    while (indices.size() < mode.sample_size) {
      const std::uint64_t candidate = rng.below(total);
      if (!seen.emplace(candidate, true).second) continue;
      indices.push_back(candidate);
    }
  }

  const unsigned workers = mode.workers < 1 ? 1 : mode.workers;
  std::vector<CountMap> partials(workers);
  std::vector<std::uint64_t> halted(workers, 0);
  std::vector<std::thread> threads;
  const std::size_t n = indices.size();
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    std::vector<std::uint64_t> slice(indices.begin() + lo,
                                     indices.begin() + hi);
    threads.emplace_back(detail::census_indices, std::move(slice), n_states,
                         n_symbols, budget, &partials[w], &halted[w]);
  }
  for (std::thread& t : threads) t.join();
  for (unsigned w = 0; w < workers; ++w) {
    detail::merge_counts(&table.counts, partials[w]);
    table.halted_machines += halted[w];
  }
  return table;
}

}  // namespace collapselab

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/tm/census.hpp"
#include "collapselab/tm/machine.hpp"

namespace collapselab {

// A candidate generative mechanism: a distribution over output symbols plus
// a description-length proxy in bits. Census-derived programs carry the
// index of a machine producing their output; declared generator families
// carry machine_index = -1 and an explicit proxy.
struct Program {
  std::string name;
  std::int64_t machine_index = -1;
  std::string space_id;  // empty for declared generators
  Categorical output_dist;
  double complexity_bits = 1.0;
};

struct ProgramPool {
  std::vector<Program> programs;

  void validate() const {
    if (programs.empty()) throw InvariantError("ProgramPool: empty pool");
    for (const Program& p : programs)
      if (!(p.complexity_bits > 0.0))
        throw InvariantError("ProgramPool: program '" + p.name +
                             "' has non-positive complexity");
  }

  const Program& at(std::size_t i) const {
    if (i >= programs.size())
      throw InvariantError("ProgramPool: program index out of range");
    return programs[i];
  }

  std::size_t size() const { return programs.size(); }
};

// Bit length of an encoded transition table: nm entries of log2(2m(n+1))
// bits each, rounded up. The declared K proxy for machines missing from a
// census.
inline double encoded_table_bits(int n_states, int n_symbols) {
  const double per_entry =
      std::log2(2.0 * n_symbols * (n_states + 1.0));
  return std::ceil(per_entry * n_states * n_symbols);
}

// Builds a pool of point-mass programs from a halting census: one program
// per distinct output, represented by the lowest-index machine producing it,
// with K = -log2(census weight of that output). The shared support is the
// output vocabulary ordered by descending count then lexicographically,
// matching the census file row order.
inline ProgramPool pool_from_census(const OutputFrequencyTable& table,
                                    int n_states, int n_symbols,
                                    std::uint64_t budget,
                                    std::size_t max_programs = 0) {
  if (table.counts.empty())
    throw InvariantError("pool_from_census: census has no halted outputs");

  std::vector<std::pair<std::string, std::uint64_t>> rows(table.counts.begin(),
                                                          table.counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_programs > 0 && rows.size() > max_programs) rows.resize(max_programs);

  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (const auto& [output, count] : rows) labels.push_back(output);
  SupportPtr support = make_support(labels);

  std::map<std::string, std::int64_t> representative;
  for (const auto& [output, count] : rows) representative[output] = -1;
  std::size_t found = 0;
  const std::uint64_t total = machine_count(n_states, n_symbols);
  TapeWorkspace workspace(budget);
  for (std::uint64_t index = 0; index < total && found < rows.size(); ++index) {
    const RunOutcome outcome =
        workspace.run(decode_machine(index, n_states, n_symbols));
    if (outcome.status != RunStatus::halted) continue;
    auto it = representative.find(outcome.output);
    if (it == representative.end() || it->second >= 0) continue;
    it->second = static_cast<std::int64_t>(index);
    ++found;
  }

  ProgramPool pool;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [output, count] = rows[i];
    pool.programs.push_back(Program{
        "machine:" + output,
        representative.at(output),
        table.space_id.to_string(),
        Categorical::point_mass(support, i),
        -std::log2(static_cast<double>(count) /
                   static_cast<double>(table.total_machines))});
  }
  pool.validate();
  return pool;
}

}  // namespace collapselab

#pragma once

#include <cmath>
#include <string>

#include "collapselab/errors.hpp"
#include "collapselab/tm/census.hpp"

namespace collapselab {

enum class MissPolicy { error, max_plus_one };

enum class CtmNormalization {
  all_machines,      // divide counts by |M| (default)
  halted_machines,   // divide by the halting census only
};

enum class EstimateMethod { CTM, BDM };

struct ComplexityEstimate {
  double value_bits = 0.0;
  EstimateMethod method = EstimateMethod::CTM;
  SpaceId space_id;
  std::size_t block_size = 0;  // BDM only
  bool miss_policy_applied = false;
};

struct CtmOptions {
  MissPolicy miss_policy = MissPolicy::error;
  CtmNormalization normalization = CtmNormalization::all_machines;
};

namespace detail {

inline double ctm_denominator(const OutputFrequencyTable& table,
                              CtmNormalization normalization) {
  const std::uint64_t denom =
      normalization == CtmNormalization::all_machines ? table.total_machines
                                                      : table.halted_machines;
  if (denom == 0) throw InvariantError("ctm: empty census");
  return static_cast<double>(denom);
}

// CTM of the least frequent output; the miss substitute is one bit above it.
inline double max_ctm_bits(const OutputFrequencyTable& table,
                           CtmNormalization normalization) {
  std::uint64_t min_count = 0;
  for (const auto& [output, count] : table.counts)
    if (min_count == 0 || count < min_count) min_count = count;
  if (min_count == 0) throw InvariantError("ctm: census has no halted outputs");
  return -std::log2(static_cast<double>(min_count) /
                    ctm_denominator(table, normalization));
}

inline double ctm_bits(const std::string& object,
                       const OutputFrequencyTable& table,
                       const CtmOptions& options, bool* missed) {
  auto it = table.counts.find(object);
  if (it == table.counts.end()) {
    if (options.miss_policy == MissPolicy::error)
      throw InvariantError("ctm: object '" + object +
                           "' absent from census " + table.space_id.to_string());
    if (missed) *missed = true;
    return max_ctm_bits(table, options.normalization) + 1.0;
  }
  return -std::log2(static_cast<double>(it->second) /
                    ctm_denominator(table, options.normalization));
}

}  // namespace detail

// CTM(o) = -log2( count(o) / |M| ).
inline ComplexityEstimate ctm(const std::string& object,
                              const OutputFrequencyTable& table,
                              const CtmOptions& options = {}) {
  ComplexityEstimate estimate;
  estimate.method = EstimateMethod::CTM;
  estimate.space_id = table.space_id;
  estimate.value_bits =
      detail::ctm_bits(object, table, options, &estimate.miss_policy_applied);
  return estimate;
}

}  // namespace collapselab

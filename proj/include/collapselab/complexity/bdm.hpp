#pragma once

#include <cmath>
#include <map>
#include <string>

#include "collapselab/complexity/ctm.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/tm/census.hpp"

namespace collapselab {

enum class BlockBoundary {
  short_final_block,  // score the final partial block at its own length
  drop_remainder,
};

struct BdmConfig {
  std::size_t block_size = 1;
  BlockBoundary boundary = BlockBoundary::short_final_block;
  CtmOptions ctm;
};

// BDM_k(o) = sum over distinct blocks b of CTM(b) + log2(multiplicity of b).
inline ComplexityEstimate bdm(const std::string& object, const BdmConfig& cfg,
                              const OutputFrequencyTable& table) {
  if (cfg.block_size < 1) throw InvariantError("bdm: block size must be >= 1");
  if (cfg.block_size > table.max_output_length())
    throw InvariantError("bdm: block size exceeds longest census output");
  if (object.empty()) throw InvariantError("bdm: empty object");

  std::map<std::string, std::uint64_t> blocks;
  const std::size_t k = cfg.block_size;
  std::size_t pos = 0;
  for (; pos + k <= object.size(); pos += k) ++blocks[object.substr(pos, k)];
  if (pos < object.size() && cfg.boundary == BlockBoundary::short_final_block)
    ++blocks[object.substr(pos)];
  if (blocks.empty())
    throw InvariantError("bdm: object shorter than one block under drop-remainder");

  ComplexityEstimate estimate;
  estimate.method = EstimateMethod::BDM;
  estimate.space_id = table.space_id;
  estimate.block_size = k;
  for (const auto& [block, multiplicity] : blocks) {
    estimate.value_bits +=
        detail::ctm_bits(block, table, cfg.ctm,
                         &estimate.miss_policy_applied) +
        std::log2(static_cast<double>(multiplicity));
  }
  return estimate;
}

}  // namespace collapselab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/neurosym/program_pool.hpp"

namespace collapselab {

struct SelectionResult {
  std::size_t index = 0;
  double score_bits = 0.0;  // nll + lambda * K
  double nll_bits = 0.0;
};

// Negative log-likelihood of the draws under a program's distribution, in
// bits; infinite when the program cannot produce some observed symbol.
inline double program_nll_bits(const SampleSet& data, const Program& program) {
  std::unordered_map<std::string, double> prob;
  const Categorical& dist = program.output_dist;
  for (std::size_t i = 0; i < dist.size(); ++i)
    prob[dist.labels()[i]] = dist.prob(i);
  double nll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto it = prob.find(data.label(i));
    if (it == prob.end() || it->second == 0.0)
      return std::numeric_limits<double>::infinity();
    nll -= std::log2(it->second);
  }
  return nll;
}

// Penalized program selection: argmin_p [ -log2 P(D|p) + lambda * K(p) ].
// Ties within 1e-12 go to the lower-complexity program, then to pool order.
inline SelectionResult select_program(const SampleSet& data,
                                      const ProgramPool& pool, double lambda) {
  pool.validate();
  if (!(lambda >= 0.0))
    throw InvariantError("select_program: lambda must be >= 0");
  if (data.n() == 0) throw InvariantError("select_program: empty data");

  constexpr double kTie = 1e-12;
  bool found = false;
  SelectionResult best;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Program& program = pool.at(i);
    const double nll = program_nll_bits(data, program);
    if (std::isinf(nll)) continue;
    const double score = nll + lambda * program.complexity_bits;
    const bool wins =
        !found || score < best.score_bits - kTie ||
        (std::abs(score - best.score_bits) <= kTie &&
         program.complexity_bits <
             pool.at(best.index).complexity_bits - kTie);
    if (wins) {
      best = {i, score, nll};
      found = true;
    }
  }
  if (!found)
    throw InvariantError(
        "select_program: no program in the pool explains the data");
  return best;
}

// Union of the supports of every program whose complexity is within
// k_tolerance bits of the winner's: the symbols a learner committed to the
// winning complexity class considers generable.
inline std::vector<std::string> algorithmic_support(std::size_t p_star,
                                                    const ProgramPool& pool,
                                                    double k_tolerance_bits) {
  pool.validate();
  const double k_star = pool.at(p_star).complexity_bits;
  std::set<std::string> support;
  for (const Program& program : pool.programs) {
    if (std::abs(program.complexity_bits - k_star) > k_tolerance_bits) continue;
    const Categorical& dist = program.output_dist;
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (dist.prob(i) > 0.0) support.insert(dist.labels()[i]);
  }
  return {support.begin(), support.end()};
}

struct SupportRecoveryReport {
  std::size_t statistical_support = 0;  // distinct observed symbols
  std::size_t algorithmic_support = 0;
  std::size_t true_support = 0;
  std::size_t selected_index = 0;
  bool selected_is_mechanism = false;
};

// Draws a small sample from the mechanism's distribution and compares what
// the frequency learner can assert (observed symbols only) with what the
// penalized program learner recovers.
inline SupportRecoveryReport support_recovery_experiment(
    std::size_t mechanism_index, std::size_t n_small, const ProgramPool& pool,
    double lambda, std::uint64_t seed, double k_tolerance_bits = 0.0) {
  pool.validate();
  const Program& mechanism = pool.at(mechanism_index);
  const SampleSet data = sample(mechanism.output_dist, n_small, seed);

  std::set<std::string> observed;
  for (std::size_t i = 0; i < data.n(); ++i) observed.insert(data.label(i));

  const SelectionResult selected = select_program(data, pool, lambda);
  SupportRecoveryReport report;
  report.statistical_support = observed.size();
  report.algorithmic_support =
      algorithmic_support(selected.index, pool, k_tolerance_bits).size();
  report.true_support = mechanism.output_dist.support_size();
  report.selected_index = selected.index;
  report.selected_is_mechanism = selected.index == mechanism_index;
  return report;
}

}  // namespace collapselab

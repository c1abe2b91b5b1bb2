#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/neurosym/program_pool.hpp"

namespace collapselab {

struct ConstraintMember {
  Categorical dist;
  double complexity_bits = 1.0;
  std::string name;
};

enum class ProjectionOrder {
  kl_member_given_state,  // argmin_R KL(R || Q), the default
  kl_state_given_member,  // argmin_R KL(Q || R), sensitivity variant
};

// Construction-time filters on candidate members.
struct ConstraintPredicates {
  // member mass allowed only where the mask is true
  std::optional<std::vector<bool>> support_mask;
  // probs non-increasing along the support order
  bool monotone_nonincreasing = false;

  bool admits(const Categorical& dist) const {
    if (support_mask.has_value()) {
      if (support_mask->size() != dist.size())
        throw InvariantError("ConstraintPredicates: mask size mismatch");
      for (std::size_t i = 0; i < dist.size(); ++i)
        if (!(*support_mask)[i] && dist.prob(i) > 0.0) return false;
    }
    if (monotone_nonincreasing)
      for (std::size_t i = 1; i < dist.size(); ++i)
        if (dist.prob(i) > dist.prob(i - 1) + kSimplexTolerance) return false;
    return true;
  }
};

// The finite feasible set behind symbolic projection.
class SymbolicConstraintSet {
 public:
  explicit SymbolicConstraintSet(std::vector<ConstraintMember> members,
                                 ProjectionOrder order =
                                     ProjectionOrder::kl_member_given_state)
      : members_(std::move(members)), order_(order) {
    if (members_.empty())
      throw InvariantError("SymbolicConstraintSet: empty constraint set");
  }

  // Members are the output distributions of pool programs with K <= cap that
  // pass the predicates.
  static SymbolicConstraintSet from_pool(
      const ProgramPool& pool, double complexity_cap_bits,
      const ConstraintPredicates& predicates = {},
      ProjectionOrder order = ProjectionOrder::kl_member_given_state) {
    pool.validate();
    std::vector<ConstraintMember> members;
    for (const Program& p : pool.programs) {
      if (p.complexity_bits > complexity_cap_bits) continue;
      if (!predicates.admits(p.output_dist)) continue;
      members.push_back({p.output_dist, p.complexity_bits, p.name});
    }
    if (members.empty())
      throw InvariantError(
          "SymbolicConstraintSet: no pool program satisfies the constraints");
    return SymbolicConstraintSet(std::move(members), order);
  }

  const std::vector<ConstraintMember>& members() const { return members_; }
  ProjectionOrder order() const { return order_; }

 private:
  std::vector<ConstraintMember> members_;
  ProjectionOrder order_;
};

struct ProjectionResult {
  Categorical dist;
  std::size_t member_index = 0;
  double divergence_bits = 0.0;
};

// Nearest feasible member by divergence; ties (within 1e-12) go to the lower
// complexity member, then to list order.
inline ProjectionResult project_symbolic(const Categorical& q,
                                         const SymbolicConstraintSet& s) {
  constexpr double kTie = 1e-12;
  std::size_t best = 0;
  double best_div = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < s.members().size(); ++i) {
    const ConstraintMember& member = s.members()[i];
    require_same_support(member.dist, q, "project_symbolic");
    const double div = s.order() == ProjectionOrder::kl_member_given_state
                           ? kl_divergence(member.dist, q)
                           : kl_divergence(q, member.dist);
    if (std::isinf(div)) continue;
    const bool wins =
        !found || div < best_div - kTie ||
        (std::abs(div - best_div) <= kTie &&
         member.complexity_bits < s.members()[best].complexity_bits - kTie);
    if (wins) {
      best = i;
      best_div = div;
      found = true;
    }
  }
  if (!found)
    throw InvariantError(
        "project_symbolic: every member is at infinite divergence from the "
        "state (no feasible projection)");
  return {s.members()[best].dist, best, best_div};
}

}  // namespace collapselab

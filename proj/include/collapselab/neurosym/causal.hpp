#pragma once

#include <cstdint>
#include <vector>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"
#include "collapselab/schedule.hpp"

namespace collapselab {

// Moves a phi_t-fraction of the support coordinates toward the target with
// strength eta_c, contracting KL(P || .) by kappa_t = 1 - eta_c * phi_t.
// Exact mode treats phi_t as a deterministic blend weight (the contraction
// then holds with zero slack, by convexity of KL in its second argument);
// sampled mode picks a seeded Bernoulli(phi_t) coordinate subset and
// renormalizes, leaving a measurable finite-coverage slack.
struct CausalCorrector {
  enum class Mode { exact, sampled };

  double eta_c = 1.0;  // identification strength, (0, 1]
  RateSchedule phi_schedule = RateSchedule::constant(1.0);
  std::uint64_t correction_seed = 0;
  Mode mode = Mode::exact;

  void validate() const {
    if (!(eta_c > 0.0 && eta_c <= 1.0))
      throw InvariantError("CausalCorrector: eta_c must be in (0,1]");
  }

  double kappa(std::size_t t) const { return 1.0 - eta_c * phi_schedule.at(t); }
};

inline Categorical causal_correct(const Categorical& r, const Categorical& p,
                                  const CausalCorrector& corrector,
                                  std::size_t t) {
  corrector.validate();
  require_same_support(r, p, "causal_correct");
  const double phi = corrector.phi_schedule.at(t);
  if (phi == 0.0) return r;

  if (corrector.mode == CausalCorrector::Mode::exact)
    return mix(corrector.eta_c * phi, p, r);

  Rng rng(derive_seed(corrector.correction_seed, t, 0xCC));
  std::vector<double> out(r.size());
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool corrected = rng.uniform() < phi;
    out[i] = corrected
                 ? (1.0 - corrector.eta_c) * r.prob(i) +
                       corrector.eta_c * p.prob(i)
                 : r.prob(i);
    total += out[i];
  }
  if (total <= 0.0)
    throw InvariantError("causal_correct: correction erased all mass");
  // full coverage leaves the sum at 1 already; renormalizing then would only
  // churn the last bits
  if (std::abs(total - 1.0) > kSimplexTolerance)
    for (double& v : out) v /= total;
  return Categorical(r.support(), std::move(out));
}

}  // namespace collapselab

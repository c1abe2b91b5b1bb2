#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "collapselab/errors.hpp"
#include "collapselab/rng.hpp"

namespace collapselab {

using Support = std::vector<std::string>;
using SupportPtr = std::shared_ptr<const Support>;

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kRenormalizeLimit = 1e-9;

inline SupportPtr make_support(std::vector<std::string> labels) {
  return std::make_shared<const Support>(std::move(labels));
}

// Auto-generated support "x00".."xNN", zero-padded to a fixed width.
inline SupportPtr indexed_support(std::size_t size) {
  std::size_t width = 1;
  for (std::size_t v = size > 0 ? size - 1 : 0; v >= 10; v /= 10) ++width;
  std::vector<std::string> labels;
  labels.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::string digits = std::to_string(i);
    labels.push_back("x" + std::string(width - digits.size(), '0') + digits);
  }
  return make_support(std::move(labels));
}

inline bool same_support(const SupportPtr& a, const SupportPtr& b) {
  return a == b || (a && b && *a == *b);
}

// A probability distribution on a finite labelled support. Immutable after
// construction; supports are shared by pointer so a whole run agrees on one
// label ordering and no silent re-alignment ever happens.
class Categorical {
 public:
  Categorical(SupportPtr support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    validate();
  }

  static Categorical uniform(SupportPtr support) {
    const std::size_t k = support->size();
    return Categorical(std::move(support),
                       std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static Categorical point_mass(SupportPtr support, std::size_t index) {
    if (index >= support->size())
      throw InvariantError("point_mass: index out of range");
    std::vector<double> p(support->size(), 0.0);
    p[index] = 1.0;
    return Categorical(std::move(support), std::move(p));
  }

  // Random interior point of the simplex (normalized exponentials).
  static Categorical random_simplex(SupportPtr support, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> p(support->size());
    double total = 0.0;
    for (double& v : p) {
      v = -std::log(rng.uniform_open());
      total += v;
    }
    for (double& v : p) v /= total;
    return Categorical(std::move(support), std::move(p));
  }

  const SupportPtr& support() const { return support_; }
  const Support& labels() const { return *support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_[i]; }

  std::size_t support_size() const {
    std::size_t n = 0;
    for (double p : probs_)
      if (p > 0.0) ++n;
    return n;
  }

  bool is_point_mass() const { return support_size() == 1; }

 private:
  void validate() {
    if (!support_) throw InvariantError("Categorical: null support");
    if (support_->size() != probs_.size())
      throw InvariantError("Categorical: support/probs size mismatch");
    if (support_->empty()) throw InvariantError("Categorical: empty support");
    {
      std::vector<std::string> sorted(*support_);
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvariantError("Categorical: duplicate support labels");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0))
        throw InvariantError("Categorical: negative or NaN probability");
      total += p;
    }
    const double drift = std::abs(total - 1.0);
    if (drift <= kSimplexTolerance) return;  // keep bits untouched
    if (drift <= kRenormalizeLimit) {
      for (double& p : probs_) p /= total;
      return;
    }
    throw InvariantError("Categorical: probabilities sum to " +
                         std::to_string(total) + ", outside 1e-9 drift");
  }

  SupportPtr support_;
  std::vector<double> probs_;
};

inline void require_same_support(const Categorical& a, const Categorical& b,
                                 const char* op) {
  if (!same_support(a.support(), b.support()))
    throw InvariantError(std::string(op) + ": support mismatch");
}

// An i.i.d. sample, stored as indices into the generating support.
struct SampleSet {
  SupportPtr support;
  std::vector<std::uint32_t> draws;
  std::uint64_t source_seed = 0;

  std::size_t n() const { return draws.size(); }
  const std::string& label(std::size_t i) const { return (*support)[draws[i]]; }
};

// phi: label -> R^d.
class FeatureMap {
 public:
  FeatureMap(std::unordered_map<std::string, std::vector<double>> embedding,
             std::size_t dim)
      : embedding_(std::move(embedding)), dim_(dim) {
    if (dim_ < 1) throw InvariantError("FeatureMap: dimension must be >= 1");
    for (const auto& [label, vec] : embedding_)
      if (vec.size() != dim_)
        throw InvariantError("FeatureMap: inconsistent dimension at '" +
                             label + "'");
  }

  // phi(x_i) = i, the scalar index embedding.
  static FeatureMap index_embedding(const SupportPtr& support) {
    std::unordered_map<std::string, std::vector<double>> emb;
    for (std::size_t i = 0; i < support->size(); ++i)
      emb[(*support)[i]] = {static_cast<double>(i)};
    return FeatureMap(std::move(emb), 1);
  }

  std::size_t dim() const { return dim_; }

  const std::vector<double>& at(const std::string& label) const {
    auto it = embedding_.find(label);
    if (it == embedding_.end())
      throw InvariantError("FeatureMap: no embedding for label '" + label +
                           "'");
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::vector<double>> embedding_;
  std::size_t dim_;
};

// ---- information quantities (all base 2, reported in bits) ----

inline double entropy(const Categorical& p) {
  double h = 0.0;
  for (double v : p.probs())
    if (v > 0.0) h -= v * std::log2(v);
  return h < 0.0 ? 0.0 : h;  // clamp -0 / last-ulp rounding
}

// KL(P||Q). Returns +infinity when P puts mass where Q has none.
inline double kl_divergence(const Categorical& p, const Categorical& q) {
  require_same_support(p, q, "kl_divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i);
    if (pi == 0.0) continue;
    const double qi = q.prob(i);
    if (qi == 0.0) return std::numeric_limits<double>::infinity();
    d += pi * std::log2(pi / qi);
  }
  return d;
}

inline double tv_distance(const Categorical& p, const Categorical& q) {
  require_same_support(p, q, "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += std::abs(p.prob(i) - q.prob(i));
  return 0.5 * s;
}

inline Categorical mix(double alpha, const Categorical& p,
                       const Categorical& q) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvariantError("mix: alpha outside [0,1]");
  require_same_support(p, q, "mix");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = alpha * p.prob(i) + (1.0 - alpha) * q.prob(i);
  return Categorical(p.support(), std::move(out));
}

// Additive-pseudocount smoothing: q'(x) = (q(x) + c) / (1 + c*K).
inline Categorical smoothed(const Categorical& p, double pseudocount) {
  if (!(pseudocount >= 0.0))
    throw InvariantError("smoothed: pseudocount must be >= 0");
  if (pseudocount == 0.0) return p;
  const double norm = 1.0 + pseudocount * static_cast<double>(p.size());
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = (p.prob(i) + pseudocount) / norm;
  return Categorical(p.support(), std::move(out));
}

inline double kl_divergence_smoothed(const Categorical& p,
                                     const Categorical& q,
                                     double pseudocount) {
  return kl_divergence(p, smoothed(q, pseudocount));
}

inline SampleSet sample(const Categorical& p, std::size_t n,
                        std::uint64_t seed) {
  if (n < 1) throw InvariantError("sample: n must be >= 1");
  std::vector<double> cum(p.size());
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p.prob(i);
    cum[i] = acc;
    if (p.prob(i) > 0.0) last_nonzero = i;
  }
  Rng rng(seed);
  SampleSet out;
  out.support = p.support();
  out.source_seed = seed;
  out.draws.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform();
    // upper_bound skips zero-width intervals, so zero-mass labels are never
    // drawn; u >= cum.back() can only happen by rounding when the total is a
    // hair under 1, in which case the last positive label takes the slack.
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t idx =
        it == cum.end() ? last_nonzero
                        : static_cast<std::size_t>(it - cum.begin());
    out.draws.push_back(static_cast<std::uint32_t>(idx));
  }
  return out;
}

// Maximum-likelihood fit: count(x)/n on the given support. Labels never
// observed get probability exactly 0.
inline Categorical fit_empirical(const SampleSet& samples,
                                 const SupportPtr& support) {
  if (samples.n() == 0) throw InvariantError("fit_empirical: empty sample");
  std::vector<double> counts(support->size(), 0.0);
  if (same_support(samples.support, support)) {
    for (std::uint32_t d : samples.draws) counts[d] += 1.0;
  } else {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < support->size(); ++i) pos[(*support)[i]] = i;
    for (std::uint32_t d : samples.draws) {
      auto it = pos.find((*samples.support)[d]);
      if (it == pos.end())
        throw InvariantError("fit_empirical: draw '" + (*samples.support)[d] +
                             "' outside target support");
      counts[it->second] += 1.0;
    }
  }
  const double n = static_cast<double>(samples.n());
  for (double& c : counts) c /= n;
  return Categorical(support, std::move(counts));
}

inline std::vector<double> mean_embed(const Categorical& p,
                                      const FeatureMap& phi) {
  std::vector<double> mu(phi.dim(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    // phi must cover the whole support, zero-mass labels included.
    const std::vector<double>& v = phi.at(p.labels()[i]);
    const double w = p.prob(i);
    for (std::size_t d = 0; d < mu.size(); ++d) mu[d] += w * v[d];
  }
  return mu;
}

}  // namespace collapselab

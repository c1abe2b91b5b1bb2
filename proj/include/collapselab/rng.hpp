#pragma once

#include <cmath>
#include <cstdint>

namespace collapselab {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Stable across platforms;
// all reproducibility contracts in this library reduce to this function.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic seed for (stream a, substream b) of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = mix64(master ^ 0xA0761D6478BD642FULL);
  s = mix64(s ^ mix64(a ^ 0xE7037ED1A0B428DBULL));
  s = mix64(s ^ mix64(b ^ 0x8EBC6AF09C88C6E3ULL));
  return s;
}

// Counter-based SplitMix64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return mix64(state_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1), both endpoints excluded; safe under log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Always consumes exactly two uniforms,
  // so draw sequences stay reproducible regardless of call pattern.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, bound). Rejection-free modulo fold is fine here:
  // bound is tiny relative to 2^64 in every use, and determinism is what
  // matters, not equidistribution in the last ulp.
  std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace collapselab

#pragma once

#include <cstdint>

namespace hkreg {

/// Splittable counter-style random stream (splitmix64 core).
///
/// Streams for parallel trials are derived with derive_seed(base, index),
/// which hashes rather than advances, so trial t's stream is independent of
/// how many other trials ran or in which order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_positive() { return 1.0 - next_double(); }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double next_normal();

  /// Exponential with the given rate.
  double next_exponential(double rate);

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

/// Order-independent seed derivation: hash(base, stream), not stateful splitting.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace hkreg

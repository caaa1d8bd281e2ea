#include "hkreg/rng.hpp"

#include <cmath>

namespace hkreg {

double SplitMix64::next_normal() {
  const double u1 = next_positive();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double SplitMix64::next_exponential(double rate) {
  return -std::log(next_positive()) / rate;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // Two finalizer rounds over (base, stream); collision-free in practice and
  // independent of evaluation order across streams.
  std::uint64_t z = base + UINT64_C(0x9E3779B97F4A7C15) * (stream + 1);
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  z ^= z >> 31;
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

}  // namespace hkreg

#include <cmath>
#include <set>

#include "doctest.h"
#include "hkreg/rng.hpp"

using namespace hkreg;

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible") {
  SplitMix64 a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived seeds are pure and collision-free") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 4096; ++t) seen.insert(derive_seed(42, t));
  CHECK(seen.size() == 4096);
  // nested derivation stays order-independent by construction (pure hash)
  CHECK(derive_seed(derive_seed(7, 3), 5) == derive_seed(derive_seed(7, 3), 5));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
}

TEST_CASE("uniform moments") {
  SplitMix64 rng(2718);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  // SE of the mean is sqrt(1/12/n)
  CHECK(std::abs(mean - 0.5) <= 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sumsq / n - 1.0 / 3.0) <= 4.0 * std::sqrt(0.2 / n));
}

TEST_CASE("normal moments") {
  SplitMix64 rng(314);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) <= 4.0 / std::sqrt(static_cast<double>(n)));
  // var of z^2 is 2
  CHECK(std::abs(sumsq / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential mean") {
  SplitMix64 rng(161);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.next_exponential(2.0);
  CHECK(std::abs(sum / n - 0.5) <= 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

}  // TEST_SUITE

// Test-side integration oracle, independent of the library's quadrature and
// closed-form paths. Composite Simpson per smooth piece; callers must list
// the integrand's non-smooth points.
#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "hkreg/scenario.hpp"

namespace testutil {

inline double simpson_piece(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 == 0) ++n;
  const double h = (b - a) / (n - 1);
  // endpoints nudged inward so a piece boundary at a jump point picks up the
  // one-sided limit of its own piece
  const double nudge = 1e-12 * (b - a);
  double acc = f(a + nudge) + f(b - nudge);
  for (int i = 1; i < n - 1; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double simpson_split(const std::function<double(double)>& f, double a, double b,
                            std::vector<double> breaks, int n_per_piece = 80001) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(breaks[i], a);
    const double hi = std::min(breaks[i + 1], b);
    if (hi > lo) total += simpson_piece(f, lo, hi, n_per_piece);
  }
  return total;
}

/// Points where the density itself is not smooth.
inline std::vector<double> density_kinks(const hkreg::NoiseModel& m) {
  switch (m.family()) {
    case hkreg::NoiseFamily::kSymmetricPareto: return {0.0};
    case hkreg::NoiseFamily::kAsymTwoExp: return {-0.25};
    default: return {};
  }
}

}  // namespace testutil

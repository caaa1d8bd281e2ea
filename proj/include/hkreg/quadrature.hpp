#pragma once

#include <functional>
#include <vector>

#include "hkreg/kernel.hpp"

namespace hkreg {

/// Discretization of the input marginal rho_x used by every population
/// integral. Weights are a probability vector (sum 1 within 1e-12).
struct QuadratureGrid {
  Points x_nodes;
  Vector x_weights;
  double inner_tolerance = 1e-9;

  void validate() const;
  int size() const { return static_cast<int>(x_nodes.size()); }
};

/// Gauss-Legendre nodes and weights on [-1, 1] for runtime n
/// (Newton iteration on the three-term recurrence).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive Gauss-Kronrod (G7-K15) integration on a finite interval.
/// Returns the estimate; throws QuadratureError on non-finite results.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol = 0.0);

/// Same, but split at listed non-smooth points first; the adaptive error
/// estimate is unreliable across jumps.
double integrate_gk_split(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol);

/// Least-squares slope of y against x (used by the scaling-law checks).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hkreg

#pragma once

#include <functional>

#include "hkreg/quadrature.hpp"
#include "hkreg/robust_loss.hpp"
#include "hkreg/scenario.hpp"

namespace hkreg {

using Evaluable = std::function<double(const Point&)>;

struct PopulationQuantities {
  double risk_f = 0.0;
  double risk_fstar = 0.0;
  double excess_risk = 0.0;
  double l2_sq = 0.0;
  double xi_mean = 0.0;
  double xi_second_moment = 0.0;
};

/// psi(r) = E ell_sigma(r + eps): quadratic branch by exact partial moments
/// over [-sigma - r, sigma - r], linear branches by closed-form tail mass and
/// first tail moment. Only the student-t second partial moment needs inner
/// quadrature (rel_tol).
double expected_huber_loss(const NoiseModel& noise, double sigma, double r, double rel_tol = 1e-11);

/// psi'(r) = E ell'_sigma(r + eps); fully closed form.
double expected_huber_dloss(const NoiseModel& noise, double sigma, double r);

/// psi''(r) = 2 P(|r + eps| < sigma).
double expected_huber_d2loss(const NoiseModel& noise, double sigma, double r);

/// E[(ell_sigma(d + eps) - ell_sigma(eps))^2]: exact constant tails
/// (the difference saturates at +-2 sigma d), Gauss-Kronrod between kinks.
double expected_sq_loss_diff(const NoiseModel& noise, double sigma, double d, double rel_tol = 1e-11);

/// Tabulation of psi and psi' on [-range, range] with exact-derivative cubic
/// Hermite interpolation; evaluations outside fall back to the exact path.
class HuberMomentTable {
 public:
  HuberMomentTable(const NoiseModel& noise, double sigma, double rel_tol = 1e-11,
                   int nodes = 4097, int jobs = 1);

  double value(double r) const;
  double derivative(double r) const;
  double range() const { return range_; }
  const std::vector<double>& tabulated_values() const { return values_; }

 private:
  NoiseModel noise_;
  double sigma_;
  double rel_tol_;
  double range_;
  double step_;
  std::vector<double> values_;
  std::vector<double> derivs_;
  std::vector<double> second_derivs_;
};

/// Marginal discretization: Gauss-Legendre for uniform intervals (weights
/// renormalized to sum exactly 1), the grid itself for weighted grids.
QuadratureGrid make_oracle_grid(const MarginalX& marginal, int nodes = 129,
                                double inner_tolerance = 1e-9);

/// R(f) = E ell_sigma(y - f(x)) over the grid discretization of rho_x.
double risk(const Evaluable& f, const Scenario& scenario, HuberScale scale,
            const QuadratureGrid& grid);

/// sum_j w_j (f(x_j) - g(x_j))^2.
double l2_distance_sq(const Evaluable& f, const Evaluable& g, const QuadratureGrid& grid);

/// (E[Xi], E[Xi^2]) for Xi = ell_sigma(y - f(x)) - ell_sigma(y - f*(x)).
std::pair<double, double> xi_moments(const Evaluable& f, const Scenario& scenario, HuberScale scale,
                                     const QuadratureGrid& grid);

/// All of the above in one pass.
PopulationQuantities population_quantities(const Evaluable& f, const Scenario& scenario,
                                           HuberScale scale, const QuadratureGrid& grid);

struct PopulationSolveOptions {
  /// 0 selects 1e-9 * max(1, sigma).
  double tol_gradient = 0.0;
  int max_iterations = 200;
  int max_backtracks = 60;
  JitterPolicy jitter;
};

/// f_{sigma,lambda}: minimizer of the grid-discretized population objective
/// over span{K(x_j, .)}, by damped Newton steps (psi'' has a closed form)
/// with Armijo backtracking.
RepresenterFunction population_minimizer(const Scenario& scenario, HuberScale scale, double lambda,
                                         const QuadratureGrid& grid,
                                         const PopulationSolveOptions& opts = {});

/// f_lambda: closed-form grid solution of (W G + lambda I) alpha = W F*.
RepresenterFunction reference_function(const Scenario& scenario, double lambda,
                                       const QuadratureGrid& grid, const JitterPolicy& policy = {});

struct BiasFunctionals {
  double d_sigma_lambda = 0.0;
  double d_lambda = 0.0;
};

/// D(lambda, sigma) = R(f_{sigma,lambda}) - R(f*) + lambda ||f_{sigma,lambda}||_K^2,
/// D(lambda) = ||f_lambda - f*||_{2,rho}^2 + lambda ||f_lambda||_K^2.
BiasFunctionals bias_functionals(const Scenario& scenario, HuberScale scale, double lambda,
                                 const QuadratureGrid& grid,
                                 const PopulationSolveOptions& opts = {});

}  // namespace hkreg

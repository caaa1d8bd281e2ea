#pragma once

#include <string>

#include "json.hpp"
#include "hkreg/population_oracle.hpp"
#include "hkreg/solver.hpp"

namespace hkreg {

/// Outcome of one executable theorem check. measured_margin <= 0 is a pass;
/// the margin is the worst normalized exceedance over the check's assertions.
struct TheoremReport {
  std::string theorem_id;
  bool pass = false;
  double measured_margin = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config_snapshot;
  nlohmann::ordered_json details;
  std::vector<std::string> csv_columns;
  std::vector<std::vector<double>> csv_rows;
};

/// Random elements of H_sigma = {f : ||f||_inf <= sigma/2}: random supports
/// from the marginal, standard-normal coefficients, rescaled so the sup over
/// the probe points equals fill * sigma/2 with fill uniform on [0.1, 1].
struct EffectiveSpaceSample {
  std::vector<RepresenterFunction> functions;
  double sigma = 0.0;
  std::vector<double> fill_fractions;
  /// Sup-norm over the union of scenario probe grid and extra points.
  std::vector<double> sup_norms;
};

EffectiveSpaceSample sample_effective_space(const Scenario& scenario, double sigma, int count,
                                            std::uint64_t seed, const Points& extra_probe = {});

/// Lemma-style deterministic bound ||f_z||_inf <= 2 kappa^2 sigma / lambda,
/// over a (sigma, lambda) grid of independent fits.
TheoremReport check_rough_bound(const Scenario& scenario, const std::vector<double>& sigma_grid,
                                const std::vector<double>& lambda_grid, int trials_per_cell, int n,
                                std::uint64_t seed, int jobs = 1);

/// Probabilistic K-norm bound at confidence 1 - delta; verdict by violation
/// frequency against delta plus three binomial standard errors.
TheoremReport check_norm_bound_probabilistic(const Scenario& scenario, double sigma, double lambda,
                                             double epsilon, int n, int trials, double delta,
                                             std::uint64_t seed, const QuadratureGrid& grid,
                                             int jobs = 1);

/// Population K-norm bound for f_{sigma,lambda} on a (sigma, lambda) grid.
TheoremReport check_population_norm_bound(const Scenario& scenario,
                                          const std::vector<double>& sigma_grid,
                                          const std::vector<double>& lambda_grid, double epsilon,
                                          const QuadratureGrid& grid);

/// Comparison inequality with the explicit constant
/// C = (2^eps + 2^(1+eps))^2 ||a||^2: sharp intermediate form, the two-sided
/// display at alpha = 1, and the positivity fact E[Xi] + C sigma^(-2 eps) > 0.
TheoremReport check_comparison(const Scenario& scenario, const std::vector<double>& sigma_grid,
                               double epsilon, int count, std::uint64_t seed,
                               const QuadratureGrid& grid, int jobs = 1);

/// Bias scaling D(lambda, sigma) - D(lambda) against sigma^(-2 eps) on a
/// geometric sigma grid (slope fit, noise floor 1e-8).
TheoremReport check_bias_bound(const Scenario& scenario, double lambda, double epsilon,
                               const std::vector<double>& sigma_grid, const QuadratureGrid& grid);

/// Variance bound scaling: max over sampled f of E[Xi^2] / rhs must not grow
/// with sigma (slope tolerance +0.2); branch picked by epsilon <= 1.
TheoremReport check_variance_bound(const Scenario& scenario, const std::vector<double>& sigma_grid,
                                   double epsilon, int count, std::uint64_t seed,
                                   const QuadratureGrid& grid, int jobs = 1);

struct RateSummaryRow {
  int n = 0;
  double sigma = 0.0;
  double lambda = 0.0;
  double huber_median = 0.0, huber_q1 = 0.0, huber_q3 = 0.0;
  double ridge_median = 0.0, ridge_q1 = 0.0, ridge_q3 = 0.0;
  int failures = 0;
};

struct RateResult {
  TheoremReport report;
  std::vector<RateSummaryRow> summary;
};

/// Convergence-rate sweep under the coupled tuning rule: per-n median oracle
/// L2 errors for the robust fit and kernel ridge at the same lambda.
/// Verdict: negative log-log slope for the robust fit, and (when the declared
/// epsilon < 1, the infinite-variance regime) robust beats ridge at the two
/// largest n.
RateResult rate_experiment(const Scenario& scenario, double epsilon, double beta, double q,
                           double eta, const std::vector<int>& n_grid, int reps,
                           std::uint64_t seed, const QuadratureGrid& grid, int jobs = 1);

/// Linear-interpolation quantile of an unsorted sample (p in [0, 1]).
double sample_quantile(std::vector<double> values, double p);

}  // namespace hkreg

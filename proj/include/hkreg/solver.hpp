#pragma once

#include "hkreg/kernel.hpp"
#include "hkreg/robust_loss.hpp"
#include "hkreg/solver_types.hpp"

namespace hkreg {

struct FitConfig {
  double lambda = 1e-2;
  double tol_objective = 1e-10;
  /// 0 selects the default 1e-8 * sqrt(n) * sigma.
  double tol_gradient = 0.0;
  int max_iterations = 500;
  JitterPolicy jitter;

  void validate() const {
    if (!(lambda > 0.0)) throw ContractViolation("FitConfig: lambda must be positive");
    if (!(tol_objective > 0.0)) throw ContractViolation("FitConfig: tol_objective must be positive");
    if (!(tol_gradient >= 0.0)) throw ContractViolation("FitConfig: tol_gradient must be >= 0");
    if (max_iterations < 1) throw ContractViolation("FitConfig: max_iterations must be >= 1");
  }
};

struct FittedModel {
  RepresenterFunction function;
  double rkhs_norm = 0.0;
  double sup_norm_probe = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  double sigma = 0.0;  // 0 marks a squared-loss (ridge) fit
  double lambda = 0.0;
  /// Recorded objective after the initial solve and after each reweighted
  /// solve; non-increasing by the majorize-minimize argument.
  std::vector<double> objective_path;
};

/// (1/n) sum_i huber(sigma, y_i - f(x_i)) + lambda ||f||_K^2.
double empirical_objective(const RepresenterFunction& f, const Dataset& data, HuberScale scale,
                           double lambda);

/// Solve (A + jitter * scale * I) x = rhs by LLT, escalating jitter from the
/// policy's initial value on factorization failure. Throws NumericalError
/// after max_retries.
Vector solve_spd(const Matrix& A, const Vector& rhs, const JitterPolicy& policy);

/// Regularized empirical Huber risk minimizer via IRLS (reweighted kernel
/// ridge), initialized from one plain ridge solve.
FittedModel fit_huber_krr(const Dataset& data, const KernelSpec& kernel, HuberScale scale,
                          const FitConfig& cfg, const Points& probe);

/// Closed-form kernel ridge: (G + n lambda I) alpha = y.
FittedModel fit_kernel_ridge(const Dataset& data, const KernelSpec& kernel, double lambda,
                             const Points& probe, const JitterPolicy& policy = {});

struct TuningResult {
  double sigma = 1.0;
  double lambda = 1.0;
  double alpha_rate = 1.0;
};

/// Coupled (sigma, lambda) schedule:
///   alpha = min(2 eps / beta, 1 + eps, 2),
///   sigma = n^(2 / ((1+q)(2 + alpha + alpha beta))),
///   lambda = eta * sigma^(-alpha).
TuningResult tuning_rule(int n, double epsilon, double beta, double q, double eta);

}  // namespace hkreg

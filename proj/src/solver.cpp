#include "hkreg/solver.hpp"

#include <cmath>

namespace hkreg {

double empirical_objective(const RepresenterFunction& f, const Dataset& data, HuberScale scale,
                           double lambda) {
  data.validate();
  const int n = data.n();
  double risk = 0.0;
  for (int i = 0; i < n; ++i)
    risk += huber_loss(scale, data.ys[static_cast<std::size_t>(i)] - eval_function(f, data.xs[static_cast<std::size_t>(i)]));
  const double norm = rkhs_norm(f);
  return risk / n + lambda * norm * norm;
}

Vector solve_spd(const Matrix& A, const Vector& rhs, const JitterPolicy& policy) {
  const double scale = std::max(A.diagonal().cwiseAbs().maxCoeff(), 1.0);
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  double jitter = policy.initial;
  for (int retry = 0; retry < policy.max_retries; ++retry) {
    Matrix Aj = A;
    Aj.diagonal().array() += jitter * scale;
    llt.compute(Aj);
    if (llt.info() == Eigen::Success) {
      Vector x = llt.solve(rhs);
      if (x.allFinite()) return x;
    }
    jitter *= policy.factor;
  }
  throw NumericalError("solve_spd: factorization failed after jitter escalation");
}

namespace {

struct ObjectiveParts {
  double objective;
  Vector residuals;
};

ObjectiveParts objective_at(const Matrix& G, const Vector& y, const Vector& alpha, HuberScale scale,
                            double lambda) {
  const Vector fitted = G * alpha;
  Vector r = y - fitted;
  double risk = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) risk += huber_loss(scale, r[i]);
  const double penalty = lambda * alpha.dot(fitted);
  return {risk / static_cast<double>(y.size()) + penalty, std::move(r)};
}

FittedModel finalize(const Dataset& data, const KernelSpec& kernel, const Matrix& G, Vector alpha,
                     const Points& probe, double sigma, double lambda) {
  FittedModel model;
  model.function.support = data.xs;
  model.function.coefficients = std::move(alpha);
  model.function.kernel = kernel;
  const double q = model.function.coefficients.dot(G * model.function.coefficients);
  model.rkhs_norm = std::sqrt(std::max(q, 0.0));
  model.sup_norm_probe = probe.empty() ? 0.0 : sup_norm_on(model.function, probe);
  model.sigma = sigma;
  model.lambda = lambda;
  return model;
}

}  // namespace

FittedModel fit_kernel_ridge(const Dataset& data, const KernelSpec& kernel, double lambda,
                             const Points& probe, const JitterPolicy& policy) {
  data.validate();
  if (!(lambda > 0.0)) throw ContractViolation("fit_kernel_ridge: lambda must be positive");
  const int n = data.n();
  const Matrix G = gram(kernel, data.xs);
  Vector y = Eigen::Map<const Vector>(data.ys.data(), n);
  Matrix A = G;
  A.diagonal().array() += n * lambda;
  Vector alpha = solve_spd(A, y, policy);

  FittedModel model = finalize(data, kernel, G, std::move(alpha), probe, 0.0, lambda);
  const Vector r = y - G * model.function.coefficients;
  model.objective_value = r.squaredNorm() / n + lambda * model.rkhs_norm * model.rkhs_norm;
  model.iterations = 1;
  model.converged = true;
  model.gradient_norm = (G * (2.0 * lambda * model.function.coefficients - 2.0 * r / n)).norm();
  model.objective_path = {model.objective_value};
  return model;
}

FittedModel fit_huber_krr(const Dataset& data, const KernelSpec& kernel, HuberScale scale,
                          const FitConfig& cfg, const Points& probe) {
  data.validate();
  cfg.validate();
  const int n = data.n();
  const double lambda = cfg.lambda;
  const double tol_gradient =
      cfg.tol_gradient > 0.0 ? cfg.tol_gradient : 1e-8 * std::sqrt(static_cast<double>(n)) * scale.sigma;

  const Matrix G = gram(kernel, data.xs);
  Vector y = Eigen::Map<const Vector>(data.ys.data(), n);

  // Ridge initialization: already the exact solution when nothing saturates.
  Matrix A0 = G;
  A0.diagonal().array() += n * lambda;
  Vector alpha = solve_spd(A0, y, cfg.jitter);

  std::vector<double> path;
  ObjectiveParts cur = objective_at(G, y, alpha, scale, lambda);
  if (!std::isfinite(cur.objective)) throw NumericalError("fit_huber_krr: non-finite objective");
  path.push_back(cur.objective);

  auto gradient = [&](const Vector& a, const Vector& res) {
    Vector d(res.size());
    for (Eigen::Index i = 0; i < res.size(); ++i) d[i] = huber_dloss(scale, res[i]);
    return Vector(G * (2.0 * lambda * a - d / static_cast<double>(n)));
  };

  int iter = 0;
  bool converged = false;
  double grad_norm = gradient(alpha, cur.residuals).norm();
  if (grad_norm <= tol_gradient) converged = true;

  while (!converged && iter < cfg.max_iterations) {
    ++iter;
    // Majorizer solve: (W^{1/2} G W^{1/2} + n lambda I) beta = W^{1/2} y,
    // alpha = W^{1/2} beta, with W the IRLS weights at the current residuals.
    Vector wsqrt(n);
    for (Eigen::Index i = 0; i < wsqrt.size(); ++i)
      wsqrt[i] = std::sqrt(huber_irls_weight(scale, cur.residuals[i]));
    Matrix A = wsqrt.asDiagonal() * G * wsqrt.asDiagonal();
    A.diagonal().array() += n * lambda;
    Vector beta = solve_spd(A, Vector(wsqrt.cwiseProduct(y)), cfg.jitter);
    Vector next_alpha = wsqrt.cwiseProduct(beta);

    ObjectiveParts next = objective_at(G, y, next_alpha, scale, lambda);
    if (!std::isfinite(next.objective)) throw NumericalError("fit_huber_krr: non-finite objective");

    const double decrease = cur.objective - next.objective;
    alpha = std::move(next_alpha);
    cur = std::move(next);
    path.push_back(cur.objective);

    grad_norm = gradient(alpha, cur.residuals).norm();
    const double rel_decrease = decrease / std::max(std::abs(cur.objective), 1e-300);
    if (rel_decrease < cfg.tol_objective && grad_norm <= tol_gradient) {
      converged = true;
      break;
    }
  }

  FittedModel model = finalize(data, kernel, G, std::move(alpha), probe, scale.sigma, lambda);
  model.objective_value = cur.objective;
  model.iterations = iter;
  model.converged = converged;
  model.gradient_norm = grad_norm;
  model.objective_path = std::move(path);
  return model;
}

TuningResult tuning_rule(int n, double epsilon, double beta, double q, double eta) {
  if (n < 1) throw ContractViolation("tuning_rule: n must be >= 1");
  if (!(epsilon > 0.0)) throw ContractViolation("tuning_rule: epsilon must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw ContractViolation("tuning_rule: beta must lie in (0, 1]");
  if (!(q > 0.0)) throw ContractViolation("tuning_rule: q must be positive");
  if (!(eta > 0.0)) throw ContractViolation("tuning_rule: eta must be positive");

  TuningResult out;
  out.alpha_rate = std::min({2.0 * epsilon / beta, 1.0 + epsilon, 2.0});
  const double exponent = 2.0 / ((1.0 + q) * (2.0 + out.alpha_rate + out.alpha_rate * beta));
  out.sigma = std::pow(static_cast<double>(n), exponent);
  out.lambda = eta * std::pow(out.sigma, -out.alpha_rate);
  return out;
}

}  // namespace hkreg

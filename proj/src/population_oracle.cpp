#include "hkreg/population_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "hkreg/solver.hpp"

namespace hkreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double expected_huber_loss(const NoiseModel& noise, double sigma, double r, double rel_tol) {
  if (!(sigma > 0.0)) throw ContractViolation("expected_huber_loss: sigma must be positive");
  if (noise.degenerate()) return huber_loss(HuberScale(sigma), r);
  const double a = -sigma - r;
  const double b = sigma - r;
  const double m0 = noise.partial_moment0(a, b);
  const double m1 = noise.partial_moment1(a, b);
  const double m2 = noise.partial_moment2(a, b, rel_tol);
  const double quad = r * r * m0 + 2.0 * r * m1 + m2;
  const double right = (2.0 * sigma * r - sigma * sigma) * (1.0 - noise.cdf(b)) +
                       2.0 * sigma * noise.partial_moment1(b, kInf);
  const double left = (-2.0 * sigma * r - sigma * sigma) * noise.cdf(a) -
                      2.0 * sigma * noise.partial_moment1(-kInf, a);
  return quad + right + left;
}

double expected_huber_dloss(const NoiseModel& noise, double sigma, double r) {
  if (!(sigma > 0.0)) throw ContractViolation("expected_huber_dloss: sigma must be positive");
  if (noise.degenerate()) return huber_dloss(HuberScale(sigma), r);
  const double a = -sigma - r;
  const double b = sigma - r;
  return 2.0 * r * noise.partial_moment0(a, b) + 2.0 * noise.partial_moment1(a, b) +
         2.0 * sigma * (1.0 - noise.cdf(b)) - 2.0 * sigma * noise.cdf(a);
}

double expected_huber_d2loss(const NoiseModel& noise, double sigma, double r) {
  if (noise.degenerate()) return std::abs(r) < sigma ? 2.0 : 0.0;
  return 2.0 * noise.partial_moment0(-sigma - r, sigma - r);
}

double expected_sq_loss_diff(const NoiseModel& noise, double sigma, double d, double rel_tol) {
  if (!(sigma > 0.0)) throw ContractViolation("expected_sq_loss_diff: sigma must be positive");
  if (d == 0.0) return 0.0;
  const HuberScale scale(sigma);
  if (noise.degenerate()) {
    const double v = huber_loss(scale, d);
    return v * v;
  }
  // Beyond the outermost kinks the loss difference is the constant +-2 sigma d.
  double kinks[4] = {-sigma, sigma, -sigma - d, sigma - d};
  std::sort(kinks, kinks + 4);
  const double lo = kinks[0];
  const double hi = kinks[3];
  const double sat = 2.0 * sigma * d;
  double total = sat * sat * (noise.cdf(lo) + 1.0 - noise.cdf(hi));
  auto integrand = [&](double t) {
    const double diff = huber_loss(scale, d + t) - huber_loss(scale, t);
    return diff * diff * noise.density(t);
  };
  const std::vector<double> density_breaks = noise.non_smooth_points();
  for (int s = 0; s < 3; ++s) {
    if (kinks[s + 1] > kinks[s])
      total += integrate_gk_split(integrand, kinks[s], kinks[s + 1], density_breaks, rel_tol);
  }
  return total;
}

HuberMomentTable::HuberMomentTable(const NoiseModel& noise, double sigma, double rel_tol,
                                   int nodes, int jobs)
    : noise_(noise), sigma_(sigma), rel_tol_(rel_tol) {
  if (nodes < 9) throw ContractViolation("HuberMomentTable: too few nodes");
  range_ = sigma + 20.0 * noise.scale_hint();
  step_ = 2.0 * range_ / (nodes - 1);
  values_.resize(static_cast<std::size_t>(nodes));
  derivs_.resize(static_cast<std::size_t>(nodes));
  second_derivs_.resize(static_cast<std::size_t>(nodes));
#pragma omp parallel for schedule(static) num_threads(jobs > 0 ? jobs : 1)
  for (int i = 0; i < nodes; ++i) {
    const double r = -range_ + step_ * i;
    values_[static_cast<std::size_t>(i)] = expected_huber_loss(noise_, sigma_, r, rel_tol_);
    derivs_[static_cast<std::size_t>(i)] = expected_huber_dloss(noise_, sigma_, r);
    second_derivs_[static_cast<std::size_t>(i)] = expected_huber_d2loss(noise_, sigma_, r);
  }
}

double HuberMomentTable::value(double r) const {
  if (r < -range_ || r > range_) return expected_huber_loss(noise_, sigma_, r, rel_tol_);
  const double pos = (r + range_) / step_;
  const std::size_t i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * step_ * derivs_[i] + h01 * values_[i + 1] +
         h11 * step_ * derivs_[i + 1];
}

double HuberMomentTable::derivative(double r) const {
  if (r < -range_ || r > range_) return expected_huber_dloss(noise_, sigma_, r);
  const double pos = (r + range_) / step_;
  const std::size_t i = std::min(static_cast<std::size_t>(pos), derivs_.size() - 2);
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * derivs_[i] + h10 * step_ * second_derivs_[i] + h01 * derivs_[i + 1] +
         h11 * step_ * second_derivs_[i + 1];
}

QuadratureGrid make_oracle_grid(const MarginalX& marginal, int nodes, double inner_tolerance) {
  QuadratureGrid grid;
  grid.inner_tolerance = inner_tolerance;
  if (marginal.family == MarginalFamily::kWeightedGrid) {
    grid.x_nodes = marginal.grid_points;
    grid.x_weights = marginal.grid_weights;
  } else {
    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(nodes, gl_nodes, gl_weights);
    grid.x_nodes.reserve(static_cast<std::size_t>(nodes));
    grid.x_weights.resize(nodes);
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) sum += gl_weights[static_cast<std::size_t>(j)];
    for (int j = 0; j < nodes; ++j) {
      Point p(1);
      p[0] = marginal.lo + 0.5 * (gl_nodes[static_cast<std::size_t>(j)] + 1.0) * (marginal.hi - marginal.lo);
      grid.x_nodes.push_back(p);
      grid.x_weights[j] = gl_weights[static_cast<std::size_t>(j)] / sum;
    }
  }
  grid.validate();
  return grid;
}

double risk(const Evaluable& f, const Scenario& scenario, HuberScale scale,
            const QuadratureGrid& grid) {
  grid.validate();
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const Point& x = grid.x_nodes[static_cast<std::size_t>(j)];
    const double d = scenario.target(x) - f(x);
    const double inner = expected_huber_loss(scenario.noise, scale.sigma, d, grid.inner_tolerance);
    if (!std::isfinite(inner)) throw QuadratureError("risk: non-finite inner integral");
    acc += grid.x_weights[j] * inner;
  }
  return acc;
}

double l2_distance_sq(const Evaluable& f, const Evaluable& g, const QuadratureGrid& grid) {
  grid.validate();
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double diff = f(grid.x_nodes[static_cast<std::size_t>(j)]) - g(grid.x_nodes[static_cast<std::size_t>(j)]);
    acc += grid.x_weights[j] * diff * diff;
  }
  return acc;
}

std::pair<double, double> xi_moments(const Evaluable& f, const Scenario& scenario, HuberScale scale,
                                     const QuadratureGrid& grid) {
  grid.validate();
  const double psi0 = expected_huber_loss(scenario.noise, scale.sigma, 0.0, grid.inner_tolerance);
  double mean = 0.0;
  double second = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const Point& x = grid.x_nodes[static_cast<std::size_t>(j)];
    const double d = scenario.target(x) - f(x);
    mean += grid.x_weights[j] *
            (expected_huber_loss(scenario.noise, scale.sigma, d, grid.inner_tolerance) - psi0);
    second += grid.x_weights[j] *
              expected_sq_loss_diff(scenario.noise, scale.sigma, d, grid.inner_tolerance);
  }
  return {mean, second};
}

PopulationQuantities population_quantities(const Evaluable& f, const Scenario& scenario,
                                           HuberScale scale, const QuadratureGrid& grid) {
  PopulationQuantities q;
  q.risk_f = risk(f, scenario, scale, grid);
  q.risk_fstar = expected_huber_loss(scenario.noise, scale.sigma, 0.0, grid.inner_tolerance);
  q.excess_risk = q.risk_f - q.risk_fstar;
  auto target = [&](const Point& x) { return scenario.target(x); };
  q.l2_sq = l2_distance_sq(f, target, grid);
  auto xm = xi_moments(f, scenario, scale, grid);
  q.xi_mean = xm.first;
  q.xi_second_moment = xm.second;
  return q;
}

RepresenterFunction reference_function(const Scenario& scenario, double lambda,
                                       const QuadratureGrid& grid, const JitterPolicy& policy) {
  if (!(lambda > 0.0)) throw ContractViolation("reference_function: lambda must be positive");
  grid.validate();
  const int m = grid.size();
  const Matrix G = gram(scenario.kernel, grid.x_nodes);
  Vector fstar(m);
  for (int j = 0; j < m; ++j) fstar[j] = scenario.target(grid.x_nodes[static_cast<std::size_t>(j)]);

  // (W G + lambda I) alpha = W F*, solved in symmetric form via W^{1/2}.
  Vector wsqrt = grid.x_weights.cwiseSqrt();
  Matrix A = wsqrt.asDiagonal() * G * wsqrt.asDiagonal();
  A.diagonal().array() += lambda;
  Vector beta = solve_spd(A, Vector(wsqrt.cwiseProduct(fstar)), policy);

  RepresenterFunction f;
  f.support = grid.x_nodes;
  f.coefficients = wsqrt.cwiseProduct(beta);
  f.kernel = scenario.kernel;
  return f;
}

RepresenterFunction population_minimizer(const Scenario& scenario, HuberScale scale, double lambda,
                                         const QuadratureGrid& grid,
                                         const PopulationSolveOptions& opts) {
  if (!(lambda > 0.0)) throw ContractViolation("population_minimizer: lambda must be positive");
  grid.validate();
  const int m = grid.size();
  const double sigma = scale.sigma;
  const Matrix G = gram(scenario.kernel, grid.x_nodes);
  const Vector& w = grid.x_weights;
  Vector fstar(m);
  for (int j = 0; j < m; ++j) fstar[j] = scenario.target(grid.x_nodes[static_cast<std::size_t>(j)]);

  const double rel_tol = std::min(grid.inner_tolerance, 1e-11);
  auto objective = [&](const Vector& alpha, const Vector& galpha) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j)
      acc += w[j] * expected_huber_loss(scenario.noise, sigma, fstar[j] - galpha[j], rel_tol);
    return acc + lambda * alpha.dot(galpha);
  };
  auto gradient = [&](const Vector& alpha, const Vector& galpha) {
    Vector v(m);
    for (int j = 0; j < m; ++j)
      v[j] = 2.0 * lambda * alpha[j] -
             w[j] * expected_huber_dloss(scenario.noise, sigma, fstar[j] - galpha[j]);
    return Vector(G * v);
  };

  // Weighted ridge warm start; exact when nothing saturates.
  Vector wsqrt = w.cwiseSqrt();
  Matrix A = wsqrt.asDiagonal() * G * wsqrt.asDiagonal();
  A.diagonal().array() += lambda;
  Vector beta = solve_spd(A, Vector(wsqrt.cwiseProduct(fstar)), opts.jitter);
  Vector alpha = wsqrt.cwiseProduct(beta);

  const double tol_gradient =
      opts.tol_gradient > 0.0 ? opts.tol_gradient : 1e-9 * std::max(1.0, sigma);

  Vector galpha = G * alpha;
  double obj = objective(alpha, galpha);
  if (!std::isfinite(obj)) throw OptimizationError("population_minimizer: non-finite objective");
  Vector grad = gradient(alpha, galpha);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (grad.norm() <= tol_gradient) break;

    // Damped Newton: H = G diag(w psi'') G + 2 lambda G, PSD up to the
    // Gram null space, which the jitter ridge absorbs.
    Vector d2(m);
    for (int j = 0; j < m; ++j)
      d2[j] = w[j] * expected_huber_d2loss(scenario.noise, sigma, fstar[j] - galpha[j]);
    Matrix H = G * d2.asDiagonal() * G;
    H.noalias() += 2.0 * lambda * G;
    const JitterPolicy newton_jitter{1e-12, 10.0, 12};
    Vector direction = solve_spd(H, Vector(-grad), newton_jitter);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      direction = -grad;
      slope = -grad.squaredNorm();
    }

    bool accepted = false;
    double step = 1.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      Vector trial = alpha + step * direction;
      Vector gtrial = G * trial;
      const double trial_obj = objective(trial, gtrial);
      if (std::isfinite(trial_obj) && trial_obj <= obj + 1e-4 * step * slope) {
        alpha = std::move(trial);
        galpha = std::move(gtrial);
        obj = trial_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw OptimizationError("population_minimizer: line search failed after max backtracks");
    grad = gradient(alpha, galpha);
  }

  if (grad.norm() > tol_gradient)
    throw OptimizationError("population_minimizer: gradient tolerance not reached");

  RepresenterFunction f;
  f.support = grid.x_nodes;
  f.coefficients = std::move(alpha);
  f.kernel = scenario.kernel;
  return f;
}

BiasFunctionals bias_functionals(const Scenario& scenario, HuberScale scale, double lambda,
                                 const QuadratureGrid& grid, const PopulationSolveOptions& opts) {
  BiasFunctionals out;
  const RepresenterFunction f_sl = population_minimizer(scenario, scale, lambda, grid, opts);
  const RepresenterFunction f_l = reference_function(scenario, lambda, grid);

  const Matrix G = gram(scenario.kernel, grid.x_nodes);
  const double norm_sl_sq = std::max(f_sl.coefficients.dot(G * f_sl.coefficients), 0.0);
  const double norm_l_sq = std::max(f_l.coefficients.dot(G * f_l.coefficients), 0.0);

  auto target = [&](const Point& x) { return scenario.target(x); };
  auto eval_sl = [&](const Point& x) { return eval_function(f_sl, x); };
  auto eval_l = [&](const Point& x) { return eval_function(f_l, x); };

  const double risk_sl = risk(eval_sl, scenario, scale, grid);
  const double risk_star = expected_huber_loss(scenario.noise, scale.sigma, 0.0, grid.inner_tolerance);
  out.d_sigma_lambda = risk_sl - risk_star + lambda * norm_sl_sq;
  out.d_lambda = l2_distance_sq(eval_l, target, grid) + lambda * norm_l_sq;
  return out;
}

}  // namespace hkreg

#include "hkreg/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "hkreg/errors.hpp"

namespace hkreg {

void QuadratureGrid::validate() const {
  if (x_nodes.empty()) throw ContractViolation("QuadratureGrid: empty node set");
  if (static_cast<int>(x_nodes.size()) != static_cast<int>(x_weights.size()))
    throw ContractViolation("QuadratureGrid: node/weight length mismatch");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x_weights.size(); ++j) {
    if (!(x_weights[j] >= 0.0)) throw ContractViolation("QuadratureGrid: negative weight");
    sum += x_weights[j];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ContractViolation("QuadratureGrid: weights do not sum to 1");
  if (!(inner_tolerance > 0.0)) throw ContractViolation("QuadratureGrid: inner_tolerance must be positive");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ContractViolation("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;  // exact center for odd rules
}

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/18, rel_tol, &error);
  if (!std::isfinite(v)) throw QuadratureError("integrate_gk: non-finite integral");
  if (abs_tol > 0.0 && error > abs_tol && error > rel_tol * std::abs(v))
    throw QuadratureError("integrate_gk: error estimate above tolerance");
  return v;
}

double integrate_gk_split(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol) {
  if (a >= b) return 0.0;
  std::vector<double> cuts{a, b};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_gk(f, cuts[i], cuts[i + 1], rel_tol);
  return total;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractViolation("fit_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ContractViolation("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace hkreg

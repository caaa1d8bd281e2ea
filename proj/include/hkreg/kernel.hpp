#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hkreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;
using Points = std::vector<Point>;

enum class KernelFamily { kGaussian, kLaplacian, kPolynomial };

/// Parametric positive-definite kernel family. Gaussian and laplacian have
/// K(x,x) = 1 identically; polynomial is (<x,y> + offset)^degree.
struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double bandwidth = 1.0;  // gaussian, laplacian
  int degree = 2;          // polynomial
  double offset = 0.0;     // polynomial

  static KernelSpec Gaussian(double bandwidth);
  static KernelSpec Laplacian(double bandwidth);
  static KernelSpec Polynomial(int degree, double offset);

  /// Throws ContractViolation if parameters violate the family invariants.
  void validate() const;
};

/// K(x, x2); symmetric in its arguments. Throws on dimension mismatch.
double eval_kernel(const KernelSpec& spec, const Point& x, const Point& x2);

/// Gram matrix G[i][j] = K(points[i], points[j]), constructed symmetrically.
/// Entries are computed independently, so the result is identical for any
/// jobs count.
Matrix gram(const KernelSpec& spec, const Points& points, int jobs = 1);

/// Serial reference for gram(); kept for testing and benchmarking.
Matrix gram_serial(const KernelSpec& spec, const Points& points);

/// kappa = max over probes of sqrt(K(x,x)). Exactly 1 for gaussian/laplacian.
double kappa(const KernelSpec& spec, const Points& domain_probe);

/// PSD clamp threshold used by rkhs_norm: 1e-8 * trace(G).
double psd_tolerance(const Matrix& gram_matrix);

/// Finite expansion f = sum_i coefficients[i] * K(support[i], .).
struct RepresenterFunction {
  Points support;
  Vector coefficients;
  KernelSpec kernel;

  void validate() const;
  double operator()(const Point& x) const;
};

/// Pointwise evaluation of the expansion.
double eval_function(const RepresenterFunction& f, const Point& x);

/// sqrt(alpha' G alpha); tiny negative quadratic forms within the PSD
/// tolerance clamp to zero, anything more negative throws NumericalError.
double rkhs_norm(const RepresenterFunction& f);

/// max_i |f(probe[i])|.
double sup_norm_on(const RepresenterFunction& f, const Points& probe);

}  // namespace hkreg

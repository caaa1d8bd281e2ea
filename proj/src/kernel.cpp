#include "hkreg/kernel.hpp"

#include <cmath>
#include <cstddef>

#include "hkreg/errors.hpp"

namespace hkreg {

KernelSpec KernelSpec::Gaussian(double bandwidth) {
  KernelSpec s;
  s.family = KernelFamily::kGaussian;
  s.bandwidth = bandwidth;
  s.validate();
  return s;
}

KernelSpec KernelSpec::Laplacian(double bandwidth) {
  KernelSpec s;
  s.family = KernelFamily::kLaplacian;
  s.bandwidth = bandwidth;
  s.validate();
  return s;
}

KernelSpec KernelSpec::Polynomial(int degree, double offset) {
  KernelSpec s;
  s.family = KernelFamily::kPolynomial;
  s.degree = degree;
  s.offset = offset;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::kGaussian:
    case KernelFamily::kLaplacian:
      if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw ContractViolation("kernel bandwidth must be positive and finite");
      break;
    case KernelFamily::kPolynomial:
      if (degree < 1) throw ContractViolation("polynomial kernel degree must be >= 1");
      if (!(offset >= 0.0) || !std::isfinite(offset))
        throw ContractViolation("polynomial kernel offset must be nonnegative and finite");
      break;
  }
}

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& x2) {
  if (x.size() != x2.size())
    throw ContractViolation("eval_kernel: input dimensions differ");
  switch (spec.family) {
    case KernelFamily::kGaussian: {
      const double d2 = (x - x2).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
    }
    case KernelFamily::kLaplacian: {
      const double d = (x - x2).norm();
      return std::exp(-d / spec.bandwidth);
    }
    case KernelFamily::kPolynomial: {
      const double base = x.dot(x2) + spec.offset;
      double v = 1.0;
      for (int k = 0; k < spec.degree; ++k) v *= base;
      return v;
    }
  }
  throw ContractViolation("eval_kernel: unknown kernel family");
}

namespace {

void check_points(const Points& points) {
  if (points.empty()) throw ContractViolation("gram: empty point list");
  const Eigen::Index dim = points.front().size();
  for (const Point& p : points)
    if (p.size() != dim) throw ContractViolation("gram: points have mixed dimensions");
}

}  // namespace

Matrix gram_serial(const KernelSpec& spec, const Points& points) {
  check_points(points);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  Matrix g(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const double v = eval_kernel(spec, points[i], points[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Matrix gram(const KernelSpec& spec, const Points& points, int jobs) {
  check_points(points);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  Matrix g(n, n);
  // Row-wise upper triangle; each entry is written exactly once, so the
  // result matches gram_serial bit for bit at any jobs count.
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs > 0 ? jobs : 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const double v = eval_kernel(spec, points[i], points[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double kappa(const KernelSpec& spec, const Points& domain_probe) {
  if (domain_probe.empty()) throw ContractViolation("kappa: empty probe set");
  double m = 0.0;
  for (const Point& p : domain_probe) m = std::max(m, eval_kernel(spec, p, p));
  return std::sqrt(m);
}

double psd_tolerance(const Matrix& gram_matrix) { return 1e-8 * gram_matrix.trace(); }

void RepresenterFunction::validate() const {
  kernel.validate();
  if (static_cast<std::size_t>(coefficients.size()) != support.size())
    throw ContractViolation("RepresenterFunction: support/coefficient length mismatch");
  for (Eigen::Index i = 0; i < coefficients.size(); ++i)
    if (!std::isfinite(coefficients[i]))
      throw ContractViolation("RepresenterFunction: non-finite coefficient");
  for (const Point& p : support)
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (!std::isfinite(p[i])) throw ContractViolation("RepresenterFunction: non-finite support point");
}

double eval_function(const RepresenterFunction& f, const Point& x) {
  if (!f.support.empty() && f.support.front().size() != x.size())
    throw ContractViolation("eval_function: input dimension mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < f.support.size(); ++i)
    v += f.coefficients[static_cast<Eigen::Index>(i)] * eval_kernel(f.kernel, f.support[i], x);
  return v;
}

double RepresenterFunction::operator()(const Point& x) const { return eval_function(*this, x); }

double rkhs_norm(const RepresenterFunction& f) {
  f.validate();
  if (f.support.empty()) return 0.0;
  const Matrix g = gram_serial(f.kernel, f.support);
  const double q = f.coefficients.dot(g * f.coefficients);
  const double tol = psd_tolerance(g);
  if (q < -tol)
    throw NumericalError("rkhs_norm: quadratic form negative beyond PSD tolerance");
  return std::sqrt(std::max(q, 0.0));
}

double sup_norm_on(const RepresenterFunction& f, const Points& probe) {
  if (probe.empty()) throw ContractViolation("sup_norm_on: empty probe grid");
  double m = 0.0;
  for (const Point& p : probe) m = std::max(m, std::abs(eval_function(f, p)));
  return m;
}

}  // namespace hkreg

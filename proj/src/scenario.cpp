#include "hkreg/scenario.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "hkreg/quadrature.hpp"

namespace hkreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }
double std_normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

/// E|Z|^r for Z standard normal: 2^{r/2} Gamma((r+1)/2) / sqrt(pi).
double std_normal_abs_moment(double r) {
  return std::exp(0.5 * r * M_LN2 + std::lgamma(0.5 * (r + 1.0))) / std::sqrt(M_PI);
}

/// int_a^b t^k e^{-rate t} dt via the antiderivative; b may be +inf (rate > 0).
double exp_partial(int k, double a, double b, double rate) {
  auto antideriv = [&](double t) -> double {
    if (std::isinf(t)) return 0.0;
    const double e = std::exp(-rate * t);
    switch (k) {
      case 0: return -e / rate;
      case 1: return -e * (t / rate + 1.0 / (rate * rate));
      case 2: return -e * (t * t / rate + 2.0 * t / (rate * rate) + 2.0 / (rate * rate * rate));
      default: throw ContractViolation("exp_partial: k must be 0, 1 or 2");
    }
  };
  return antideriv(b) - antideriv(a);
}

// Asymmetric two-exponential density: (1/2) e^{-(t+1/4)} for t >= -1/4,
// e^{2(t+1/4)} for t < -1/4. Mass 1/2 per branch, mean 0, variance 19/16.
constexpr double kAsymKnot = -0.25;

double asym_density(double t) {
  return t >= kAsymKnot ? 0.5 * std::exp(-(t + 0.25)) : std::exp(2.0 * (t + 0.25));
}

double asym_cdf(double t) {
  return t >= kAsymKnot ? 1.0 - 0.5 * std::exp(-(t + 0.25)) : 0.5 * std::exp(2.0 * (t + 0.25));
}

/// int_a^b t^k rho(t) dt for the two-exponential, split at the knot.
double asym_partial(int k, double a, double b) {
  if (a >= b) return 0.0;
  double total = 0.0;
  // Right branch piece: (1/2) e^{-1/4} int t^k e^{-t} dt.
  const double ra = std::max(a, kAsymKnot);
  if (ra < b) total += 0.5 * std::exp(-0.25) * exp_partial(k, ra, b, 1.0);
  // Left branch piece: e^{1/2} (-1)^k int_{-b'}^{-a'} u^k e^{-2u} du.
  const double lb = std::min(b, kAsymKnot);
  if (a < lb) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    total += std::exp(0.5) * sign * exp_partial(k, -lb, std::isinf(a) ? kInf : -a, 2.0);
  }
  return total;
}

/// Pareto standardized antiderivative pieces: integrals of u^k (P/2)(1+u)^{-1-P}
/// for u >= 0, written in v = 1 + u.
double pareto_pos_partial(int k, double alpha, double beta, double p) {
  // alpha, beta >= 0; beta may be +inf.
  auto pow_term = [&](double v, double expnt) -> double {
    if (std::isinf(v)) return expnt < 0.0 ? 0.0 : kInf;
    return std::pow(v, expnt);
  };
  const double va = 1.0 + alpha;
  const double vb = std::isinf(beta) ? kInf : 1.0 + beta;
  switch (k) {
    case 0:
      return 0.5 * (pow_term(va, -p) - pow_term(vb, -p));
    case 1: {
      auto h = [&](double v) {
        return 0.5 * p * (pow_term(v, 1.0 - p) / (1.0 - p) + pow_term(v, -p) / p);
      };
      return h(vb) - h(va);
    }
    case 2: {
      if (std::abs(p - 2.0) < 1e-9) {
        // exponent 2-p hits zero: v^{2-p}/(2-p) degenerates to log v
        auto h = [&](double v) {
          if (std::isinf(v)) throw ContractViolation("pareto partial_moment2: infinite range at p = 2");
          return 0.5 * p * (std::log(v) - 2.0 * pow_term(v, 1.0 - p) / (1.0 - p) - pow_term(v, -p) / p);
        };
        return h(vb) - h(va);
      }
      auto h = [&](double v) {
        if (std::isinf(v) && p <= 2.0)
          throw ContractViolation("pareto partial_moment2: infinite range needs p > 2");
        return 0.5 * p * (pow_term(v, 2.0 - p) / (2.0 - p) - 2.0 * pow_term(v, 1.0 - p) / (1.0 - p) -
                          pow_term(v, -p) / p);
      };
      return h(vb) - h(va);
    }
    default:
      throw ContractViolation("pareto partial: k must be 0, 1 or 2");
  }
}

/// int_alpha^beta u^k g(u) du for the standardized symmetric Pareto density.
double pareto_std_partial(int k, double alpha, double beta, double p) {
  if (alpha >= beta) return 0.0;
  double total = 0.0;
  const double pa = std::max(alpha, 0.0);
  if (pa < beta) total += pareto_pos_partial(k, pa, beta, p);
  const double nb = std::min(beta, 0.0);
  if (alpha < nb) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    total += sign * pareto_pos_partial(k, -nb, std::isinf(alpha) ? kInf : -alpha, p);
  }
  return total;
}

}  // namespace

NoiseModel NoiseModel::Gaussian(double sd, double epsilon) {
  if (!(sd >= 0.0) || !std::isfinite(sd)) throw ContractViolation("gaussian noise: sd must be >= 0");
  if (!(epsilon > 0.0)) throw ContractViolation("noise: declared epsilon must be positive");
  NoiseModel m;
  m.family_ = NoiseFamily::kGaussian;
  m.sd_ = sd;
  m.epsilon_ = epsilon;
  return m;
}

NoiseModel NoiseModel::StudentT(double dof, double scale, double epsilon) {
  if (!(dof > 1.0)) throw ContractViolation("student_t noise: dof must exceed 1");
  if (!(scale > 0.0)) throw ContractViolation("student_t noise: scale must be positive");
  if (!(epsilon > 0.0)) throw ContractViolation("noise: declared epsilon must be positive");
  if (!(1.0 + epsilon < dof))
    throw ContractViolation("student_t noise: requires 1 + epsilon < dof for a finite (1+eps)-moment");
  NoiseModel m;
  m.family_ = NoiseFamily::kStudentT;
  m.dof_ = dof;
  m.scale_ = scale;
  m.epsilon_ = epsilon;
  return m;
}

NoiseModel NoiseModel::SymmetricPareto(double tail_exponent, double scale, double epsilon) {
  if (!(tail_exponent > 1.0)) throw ContractViolation("symmetric_pareto noise: tail exponent must exceed 1");
  if (!(scale > 0.0)) throw ContractViolation("symmetric_pareto noise: scale must be positive");
  if (!(epsilon > 0.0)) throw ContractViolation("noise: declared epsilon must be positive");
  if (!(1.0 + epsilon < tail_exponent))
    throw ContractViolation("symmetric_pareto noise: requires 1 + epsilon < tail exponent");
  NoiseModel m;
  m.family_ = NoiseFamily::kSymmetricPareto;
  m.pareto_p_ = tail_exponent;
  m.scale_ = scale;
  m.epsilon_ = epsilon;
  return m;
}

NoiseModel NoiseModel::AsymTwoExp(double epsilon) {
  if (!(epsilon > 0.0)) throw ContractViolation("noise: declared epsilon must be positive");
  NoiseModel m;
  m.family_ = NoiseFamily::kAsymTwoExp;
  m.epsilon_ = epsilon;
  return m;
}

double NoiseModel::moment_sup() const {
  switch (family_) {
    case NoiseFamily::kGaussian:
    case NoiseFamily::kAsymTwoExp:
      return kInf;
    case NoiseFamily::kStudentT:
      return dof_;
    case NoiseFamily::kSymmetricPareto:
      return pareto_p_;
  }
  return kInf;
}

double NoiseModel::scale_hint() const {
  switch (family_) {
    case NoiseFamily::kGaussian: return std::max(sd_, 1e-12);
    case NoiseFamily::kStudentT: return scale_;
    case NoiseFamily::kSymmetricPareto: return scale_;
    case NoiseFamily::kAsymTwoExp: return 1.0;
  }
  return 1.0;
}

double NoiseModel::density(double t) const {
  switch (family_) {
    case NoiseFamily::kGaussian:
      if (degenerate()) return 0.0;
      return std_normal_pdf(t / sd_) / sd_;
    case NoiseFamily::kStudentT: {
      const double c = std::exp(std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_)) /
                       std::sqrt(dof_ * M_PI);
      const double u = t / scale_;
      return c / scale_ * std::pow(1.0 + u * u / dof_, -0.5 * (dof_ + 1.0));
    }
    case NoiseFamily::kSymmetricPareto: {
      const double u = std::abs(t) / scale_;
      return 0.5 * pareto_p_ / scale_ * std::pow(1.0 + u, -(1.0 + pareto_p_));
    }
    case NoiseFamily::kAsymTwoExp:
      return asym_density(t);
  }
  return 0.0;
}

double NoiseModel::cdf(double t) const {
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  switch (family_) {
    case NoiseFamily::kGaussian:
      if (degenerate()) return t >= 0.0 ? 1.0 : 0.0;
      return std_normal_cdf(t / sd_);
    case NoiseFamily::kStudentT: {
      boost::math::students_t_distribution<double> dist(dof_);
      return boost::math::cdf(dist, t / scale_);
    }
    case NoiseFamily::kSymmetricPareto: {
      const double u = t / scale_;
      if (u >= 0.0) return 1.0 - 0.5 * std::pow(1.0 + u, -pareto_p_);
      return 0.5 * std::pow(1.0 - u, -pareto_p_);
    }
    case NoiseFamily::kAsymTwoExp:
      return asym_cdf(t);
  }
  return 0.0;
}

double NoiseModel::sample(SplitMix64& stream) const {
  switch (family_) {
    case NoiseFamily::kGaussian:
      return sd_ == 0.0 ? 0.0 : sd_ * stream.next_normal();
    case NoiseFamily::kStudentT: {
      // Bailey's polar method: exact for any dof > 0.
      double u, v, w;
      do {
        u = 2.0 * stream.next_double() - 1.0;
        v = 2.0 * stream.next_double() - 1.0;
        w = u * u + v * v;
      } while (w > 1.0 || w == 0.0);
      const double t = u * std::sqrt(dof_ * (std::pow(w, -2.0 / dof_) - 1.0) / w);
      return scale_ * t;
    }
    case NoiseFamily::kSymmetricPareto: {
      const double sign = stream.next_double() < 0.5 ? -1.0 : 1.0;
      const double w = stream.next_positive();
      return sign * scale_ * (std::pow(w, -1.0 / pareto_p_) - 1.0);
    }
    case NoiseFamily::kAsymTwoExp: {
      if (stream.next_double() < 0.5) return kAsymKnot - stream.next_exponential(2.0);
      return kAsymKnot + stream.next_exponential(1.0);
    }
  }
  return 0.0;
}

double NoiseModel::abs_moment(double p) const {
  if (!(p >= 1.0)) throw ContractViolation("abs_moment: p must be >= 1");
  if (p >= moment_sup()) return kInf;
  switch (family_) {
    case NoiseFamily::kGaussian:
      if (degenerate()) return 0.0;
      return std::pow(sd_, p) * std_normal_abs_moment(p);
    case NoiseFamily::kStudentT: {
      // E|T|^p = nu^{p/2} Gamma((p+1)/2) Gamma((nu-p)/2) / (sqrt(pi) Gamma(nu/2))
      const double logm = 0.5 * p * std::log(dof_) + std::lgamma(0.5 * (p + 1.0)) +
                          std::lgamma(0.5 * (dof_ - p)) - 0.5 * std::log(M_PI) -
                          std::lgamma(0.5 * dof_);
      return std::pow(scale_, p) * std::exp(logm);
    }
    case NoiseFamily::kSymmetricPareto: {
      // E|U|^p = P * B(p+1, P-p)
      const double logb = std::lgamma(p + 1.0) + std::lgamma(pareto_p_ - p) - std::lgamma(pareto_p_ + 1.0);
      return std::pow(scale_, p) * pareto_p_ * std::exp(logb);
    }
    case NoiseFamily::kAsymTwoExp: {
      // Truncated quadrature; exponential tails bounded analytically.
      double T = std::max(tail_bound_min_T(p), 8.0);
      auto integrand = [&](double t) { return std::pow(std::abs(t), p) * asym_density(t); };
      for (int round = 0; round < 60; ++round) {
        const double est = integrate_gk_split(integrand, -T, T, {kAsymKnot, 0.0}, 1e-12);
        const double bound = tail_abs_moment_bound(p, T);
        if (bound <= 1e-12 * est) return est;
        T *= 2.0;
      }
      throw QuadratureError("abs_moment: truncation bound failed to converge");
    }
  }
  return kInf;
}

double NoiseModel::partial_moment0(double a, double b) const {
  if (a >= b) return 0.0;
  return cdf(b) - cdf(a);
}

double NoiseModel::partial_moment1(double a, double b) const {
  if (a >= b) return 0.0;
  switch (family_) {
    case NoiseFamily::kGaussian: {
      if (degenerate()) return 0.0;
      const double fa = std::isinf(a) ? 0.0 : std_normal_pdf(a / sd_);
      const double fb = std::isinf(b) ? 0.0 : std_normal_pdf(b / sd_);
      return sd_ * (fa - fb);
    }
    case NoiseFamily::kStudentT: {
      const double c = std::exp(std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_)) /
                       std::sqrt(dof_ * M_PI);
      auto antideriv = [&](double t) -> double {
        if (std::isinf(t)) return 0.0;  // dof > 1 makes the tail vanish
        const double u = t / scale_;
        return -c * scale_ * dof_ / (dof_ - 1.0) * std::pow(1.0 + u * u / dof_, -0.5 * (dof_ - 1.0));
      };
      return antideriv(b) - antideriv(a);
    }
    case NoiseFamily::kSymmetricPareto:
      return scale_ * pareto_std_partial(1, std::isinf(a) ? -kInf : a / scale_,
                                         std::isinf(b) ? kInf : b / scale_, pareto_p_);
    case NoiseFamily::kAsymTwoExp:
      return asym_partial(1, a, b);
  }
  return 0.0;
}

double NoiseModel::partial_moment2(double a, double b, double rel_tol) const {
  if (a >= b) return 0.0;
  switch (family_) {
    case NoiseFamily::kGaussian: {
      if (degenerate()) return 0.0;
      auto piece = [&](double t) -> double {
        // antiderivative s^2 [Phi(u) - u phi(u)], u = t/s
        if (std::isinf(t)) return t > 0.0 ? sd_ * sd_ : 0.0;
        const double u = t / sd_;
        return sd_ * sd_ * (std_normal_cdf(u) - u * std_normal_pdf(u));
      };
      return piece(b) - piece(a);
    }
    case NoiseFamily::kStudentT: {
      if (std::isinf(a) || std::isinf(b))
        throw ContractViolation("student_t partial_moment2: finite interval required");
      auto integrand = [&](double t) { return t * t * density(t); };
      return integrate_gk(integrand, a, b, rel_tol);
    }
    case NoiseFamily::kSymmetricPareto:
      return scale_ * scale_ *
             pareto_std_partial(2, std::isinf(a) ? -kInf : a / scale_,
                                std::isinf(b) ? kInf : b / scale_, pareto_p_);
    case NoiseFamily::kAsymTwoExp:
      return asym_partial(2, a, b);
  }
  return 0.0;
}

std::vector<double> NoiseModel::non_smooth_points() const {
  switch (family_) {
    case NoiseFamily::kSymmetricPareto: return {0.0};
    case NoiseFamily::kAsymTwoExp: return {kAsymKnot};
    default: return {};
  }
}

double NoiseModel::tail_bound_min_T(double r) const {
  switch (family_) {
    case NoiseFamily::kGaussian: return std::max(1.0, sd_);
    case NoiseFamily::kStudentT: return scale_;
    case NoiseFamily::kSymmetricPareto: return scale_;
    case NoiseFamily::kAsymTwoExp: return std::max(2.0 * r, 1.0);
  }
  return 1.0;
}

double NoiseModel::tail_abs_moment_bound(double r, double T) const {
  switch (family_) {
    case NoiseFamily::kGaussian: {
      if (degenerate()) return 0.0;
      // e^{-t^2/2s^2} <= e^{-T^2/4s^2} e^{-t^2/4s^2} on |t| > T
      return std::exp(-T * T / (4.0 * sd_ * sd_)) * std::pow(std::sqrt(2.0) * sd_, r) *
             std::sqrt(2.0) * std_normal_abs_moment(r);
    }
    case NoiseFamily::kStudentT: {
      if (!(r < dof_)) return kInf;
      const double c = std::exp(std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_)) /
                       std::sqrt(dof_ * M_PI);
      const double amp = (c / scale_) * std::pow(std::sqrt(dof_) * scale_, dof_ + 1.0);
      return 2.0 * amp * std::pow(T, r - dof_) / (dof_ - r);
    }
    case NoiseFamily::kSymmetricPareto: {
      if (!(r < pareto_p_)) return kInf;
      return 2.0 * std::pow(scale_, r) * 0.5 * pareto_p_ *
             std::pow(1.0 + T / scale_, r - pareto_p_) / (pareto_p_ - r);
    }
    case NoiseFamily::kAsymTwoExp: {
      const double tr = std::pow(T, r);
      return std::exp(-0.25) * tr * std::exp(-T) + std::exp(0.5) * tr * std::exp(-2.0 * T);
    }
  }
  return kInf;
}

TargetFunction TargetFunction::Constant(double c) {
  TargetFunction f;
  f.family = TargetFamily::kConstant;
  f.constant_value = c;
  f.bound_m = std::abs(c);
  return f;
}

TargetFunction TargetFunction::Sinusoid(double amplitude, double frequency) {
  TargetFunction f;
  f.family = TargetFamily::kSinusoid;
  f.amplitude = amplitude;
  f.frequency = frequency;
  f.bound_m = std::abs(amplitude);
  return f;
}

TargetFunction TargetFunction::RkhsElement(RepresenterFunction g, const Points* kappa_probe) {
  g.validate();
  TargetFunction f;
  f.family = TargetFamily::kRkhsElement;
  const double norm = rkhs_norm(g);
  double kap = 1.0;
  if (g.kernel.family == KernelFamily::kPolynomial) {
    if (kappa_probe == nullptr || kappa_probe->empty())
      throw ContractViolation("RkhsElement target: polynomial kernel needs a kappa probe");
    kap = kappa(g.kernel, *kappa_probe);
  }
  f.bound_m = kap * norm;
  f.element = std::move(g);
  return f;
}

double TargetFunction::operator()(const Point& x) const {
  switch (family) {
    case TargetFamily::kConstant: return constant_value;
    case TargetFamily::kSinusoid: return amplitude * std::sin(2.0 * M_PI * frequency * x[0]);
    case TargetFamily::kRkhsElement: return eval_function(*element, x);
  }
  return 0.0;
}

MarginalX MarginalX::Uniform(double lo, double hi) {
  if (!(lo < hi)) throw ContractViolation("uniform marginal: needs lo < hi");
  MarginalX m;
  m.family = MarginalFamily::kUniformInterval;
  m.lo = lo;
  m.hi = hi;
  return m;
}

MarginalX MarginalX::WeightedGrid(Points points, Vector weights) {
  if (points.empty() || static_cast<Eigen::Index>(points.size()) != weights.size())
    throw ContractViolation("weighted_grid marginal: point/weight length mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ContractViolation("weighted_grid marginal: negative weight");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ContractViolation("weighted_grid marginal: weights must sum to 1");
  MarginalX m;
  m.family = MarginalFamily::kWeightedGrid;
  m.grid_points = std::move(points);
  m.grid_weights = std::move(weights);
  return m;
}

Point MarginalX::sample(SplitMix64& stream) const {
  if (family == MarginalFamily::kUniformInterval) {
    Point p(1);
    p[0] = stream.next_uniform(lo, hi);
    return p;
  }
  const double u = stream.next_double();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid_weights.size(); ++i) {
    acc += grid_weights[i];
    if (u < acc) return grid_points[static_cast<std::size_t>(i)];
  }
  return grid_points.back();
}

bool MarginalX::contains(const Point& x) const {
  if (family == MarginalFamily::kUniformInterval) {
    if (x.size() != 1) return false;
    const double slack = 1e-12 * (1.0 + std::abs(hi - lo));
    return x[0] >= lo - slack && x[0] <= hi + slack;
  }
  for (const Point& p : grid_points)
    if (p.size() == x.size() && (p - x).norm() <= 1e-12) return true;
  return false;
}

void Scenario::validate() const {
  kernel.validate();
  if (probe_grid.empty()) throw ContractViolation("Scenario: empty probe grid");
  for (const Point& p : probe_grid)
    if (!marginal.contains(p))
      throw ContractViolation("Scenario: probe point outside the marginal's support");
}

double Scenario::kappa() const { return hkreg::kappa(kernel, probe_grid); }

Points make_probe_grid(const MarginalX& marginal, int count) {
  if (count < 1) throw ContractViolation("make_probe_grid: count must be >= 1");
  if (marginal.family == MarginalFamily::kWeightedGrid) return marginal.grid_points;
  Points probe;
  probe.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Point p(1);
    p[0] = count == 1 ? 0.5 * (marginal.lo + marginal.hi)
                      : marginal.lo + (marginal.hi - marginal.lo) * i / (count - 1.0);
    probe.push_back(p);
  }
  return probe;
}

double noise_density(const NoiseModel& model, double t) { return model.density(t); }

double noise_sample(const NoiseModel& model, SplitMix64& stream) { return model.sample(stream); }

double abs_moment(const NoiseModel& model, double p) { return model.abs_moment(p); }

double a_of_x(const Scenario& scenario, const Point& x, double epsilon) {
  const double q = 1.0 + epsilon;
  if (!(q < scenario.noise.moment_sup()))
    throw InfiniteMomentError("a_of_x: 1 + epsilon outside the noise family's finite-moment range");
  const double fx = scenario.target(x);
  if (scenario.noise.degenerate()) return std::pow(std::abs(fx), q);

  // epsilon = 1 collapses to a closed form: E(f+t)^2 = f^2 + E t^2.
  if (q == 2.0) return fx * fx + scenario.noise.abs_moment(2.0);

  // |f+t|^q <= 2^eps (|f|^q + |t|^q) <= coeff (1 + |t|^q)
  const double coeff = std::pow(2.0, epsilon) * std::max(std::pow(std::abs(fx), q), 1.0);
  auto integrand = [&](double t) {
    return std::pow(std::abs(fx + t), q) * scenario.noise.density(t);
  };
  double T = std::max({scenario.noise.tail_bound_min_T(q), 8.0 * scenario.noise.scale_hint(),
                       2.0 * std::abs(fx)});
  // Geometric tail shells: heavy tails push the truncation point far beyond
  // any fixed window before the remaining mass drops below target.
  std::vector<double> breaks = scenario.noise.non_smooth_points();
  breaks.push_back(-fx);  // |f + t| kink
  double est = integrate_gk_split(integrand, -T, T, breaks, 1e-10);
  for (int shell = 0; shell < 2000; ++shell) {
    const double tail_mass = 1.0 - (scenario.noise.cdf(T) - scenario.noise.cdf(-T));
    const double bound = coeff * (tail_mass + scenario.noise.tail_abs_moment_bound(q, T));
    if (bound <= 1e-9 * est) return est;
    if (T > 1e290) {
      if (bound <= 1e-7 * est) return est;
      break;
    }
    est += integrate_gk(integrand, T, 2.0 * T, 1e-10) +
           integrate_gk(integrand, -2.0 * T, -T, 1e-10);
    T *= 2.0;
  }
  throw QuadratureError("a_of_x: truncation bound failed to converge");
}

double norm_a(const Scenario& scenario, double epsilon, const Points& nodes, const Vector& weights) {
  if (nodes.empty() || static_cast<Eigen::Index>(nodes.size()) != weights.size())
    throw ContractViolation("norm_a: node/weight mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double aj = a_of_x(scenario, nodes[j], epsilon);
    acc += weights[static_cast<Eigen::Index>(j)] * aj * aj;
  }
  return std::sqrt(acc);
}

Dataset sample_dataset(const Scenario& scenario, int n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("sample_dataset: n must be >= 1");
  SplitMix64 stream(seed);
  Dataset data;
  data.xs.reserve(static_cast<std::size_t>(n));
  data.ys.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point x = scenario.marginal.sample(stream);
    const double y = scenario.target(x) + scenario.noise.sample(stream);
    data.xs.push_back(std::move(x));
    data.ys.push_back(y);
  }
  return data;
}

}  // namespace hkreg

#pragma once

#include <optional>

#include "hkreg/kernel.hpp"
#include "hkreg/rng.hpp"
#include "hkreg/solver_types.hpp"

namespace hkreg {

enum class NoiseFamily { kGaussian, kStudentT, kSymmetricPareto, kAsymTwoExp };

/// Zero-mean noise distribution with a declared tail index epsilon such that
/// E|eps|^(1+epsilon) is finite. Exposes the density, CDF, exact partial
/// moments and analytic tail bounds; every population integral in the oracle
/// is assembled from these.
class NoiseModel {
 public:
  /// Default-constructs a standard gaussian with epsilon = 1; use the named
  /// factories for anything else.
  NoiseModel() = default;

  static NoiseModel Gaussian(double sd, double epsilon);
  static NoiseModel StudentT(double dof, double scale, double epsilon);
  static NoiseModel SymmetricPareto(double tail_exponent, double scale, double epsilon);
  static NoiseModel AsymTwoExp(double epsilon);

  NoiseFamily family() const { return family_; }
  double declared_epsilon() const { return epsilon_; }
  /// Gaussian with sd == 0: a point mass at zero.
  bool degenerate() const { return family_ == NoiseFamily::kGaussian && sd_ == 0.0; }
  /// sup{p : E|eps|^p < inf}; +inf for gaussian and the two-exponential.
  double moment_sup() const;
  /// Rough spread, used to size tabulation and truncation windows.
  double scale_hint() const;

  double density(double t) const;
  double cdf(double t) const;
  double sample(SplitMix64& stream) const;

  /// E|eps|^p, closed form where available; +inf marker outside the range.
  double abs_moment(double p) const;

  // Partial moments int_a^b t^k rho(t) dt; a may be -inf, b may be +inf
  // (k = 2 requires a finite interval except for families with closed forms).
  double partial_moment0(double a, double b) const;
  double partial_moment1(double a, double b) const;
  double partial_moment2(double a, double b, double rel_tol = 1e-12) const;

  /// Upper bound on int_{|t|>T} |t|^r rho(t) dt, valid for T >= tail_bound_min_T.
  double tail_abs_moment_bound(double r, double T) const;
  double tail_bound_min_T(double r) const;

  /// Points where the density is not smooth (jump or kink); quadrature over
  /// the density must split intervals there.
  std::vector<double> non_smooth_points() const;

  // Family parameters (for serialization and reports).
  double param_sd() const { return sd_; }
  double param_dof() const { return dof_; }
  double param_scale() const { return scale_; }
  double param_tail_exponent() const { return pareto_p_; }

 private:
  NoiseFamily family_ = NoiseFamily::kGaussian;
  double epsilon_ = 1.0;
  double sd_ = 1.0;       // gaussian
  double dof_ = 3.0;      // student_t
  double scale_ = 1.0;    // student_t, pareto
  double pareto_p_ = 2.0; // pareto tail exponent
};

enum class TargetFamily { kConstant, kSinusoid, kRkhsElement };

/// Regression target f* with a certified sup-norm bound M.
struct TargetFunction {
  TargetFamily family = TargetFamily::kConstant;
  double constant_value = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  std::optional<RepresenterFunction> element;
  double bound_m = 0.0;

  static TargetFunction Constant(double c);
  static TargetFunction Sinusoid(double amplitude, double frequency);
  /// bound_m is kappa * ||g||_K; pass a probe for kernels without constant diagonal.
  static TargetFunction RkhsElement(RepresenterFunction g, const Points* kappa_probe = nullptr);

  double operator()(const Point& x) const;
};

enum class MarginalFamily { kUniformInterval, kWeightedGrid };

/// Input marginal rho_x.
struct MarginalX {
  MarginalFamily family = MarginalFamily::kUniformInterval;
  double lo = 0.0;
  double hi = 1.0;
  Points grid_points;
  Vector grid_weights;

  static MarginalX Uniform(double lo, double hi);
  static MarginalX WeightedGrid(Points points, Vector weights);

  Point sample(SplitMix64& stream) const;
  bool contains(const Point& x) const;
};

/// A complete synthetic data-generating configuration.
struct Scenario {
  TargetFunction target;
  MarginalX marginal;
  NoiseModel noise;
  KernelSpec kernel;
  Points probe_grid;

  void validate() const;
  double kappa() const;
};

/// Evenly spaced probe points inside the marginal's support (d = 1).
Points make_probe_grid(const MarginalX& marginal, int count);

double noise_density(const NoiseModel& model, double t);
double noise_sample(const NoiseModel& model, SplitMix64& stream);
double abs_moment(const NoiseModel& model, double p);

/// a(x) = E[|f*(x) + eps|^(1+epsilon)], truncated quadrature with an analytic
/// tail bound kept below 1e-9 of the running estimate.
double a_of_x(const Scenario& scenario, const Point& x, double epsilon);

/// sqrt(sum_j w_j a(x_j)^2) over the given marginal discretization.
double norm_a(const Scenario& scenario, double epsilon, const Points& nodes, const Vector& weights);

/// n i.i.d. pairs (x, f*(x) + eps); a pure function of (scenario, n, seed).
Dataset sample_dataset(const Scenario& scenario, int n, std::uint64_t seed);

}  // namespace hkreg

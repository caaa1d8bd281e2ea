#include <cmath>
#include <functional>

#include "doctest.h"
#include "oracle_util.hpp"
#include "hkreg/config.hpp"
#include "hkreg/population_oracle.hpp"
#include "hkreg/solver.hpp"
#include "hkreg/theorem_harness.hpp"

using namespace hkreg;

namespace {

Point pt(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

using testutil::density_kinks;
using testutil::simpson_split;

Scenario heavy_scenario() { return build_scenario(default_scenario("default")); }
Scenario bias_scenario() { return build_scenario(default_scenario("bias")); }

/// One-node grid with unit weight; makes population integrals pointwise.
QuadratureGrid one_node_grid(double x) {
  QuadratureGrid g;
  g.x_nodes = {pt(x)};
  g.x_weights = Vector::Constant(1, 1.0);
  g.inner_tolerance = 1e-10;
  return g;
}

}  // namespace

TEST_SUITE("population_oracle") {

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  std::vector<double> nodes, weights;
  gauss_legendre(12, nodes, weights);
  for (int k = 0; k <= 2 * 12 - 1; ++k) {
    double acc = 0.0;
    for (int j = 0; j < 12; ++j) acc += weights[j] * std::pow(nodes[j], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1.0);
    CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("adaptive quadrature sanity") {
  CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate_gk([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("slope fit recovers exact lines") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> y = {0.5, -1.0, -2.5, -4.0};
  CHECK(fit_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("oracle grid discretizes the marginal") {
  const QuadratureGrid g = make_oracle_grid(MarginalX::Uniform(-1.0, 3.0), 65);
  CHECK(g.size() == 65);
  CHECK(std::abs(g.x_weights.sum() - 1.0) <= 1e-12);
  // integrates x and x^2 over the uniform marginal on [-1, 3]
  double m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    m1 += g.x_weights[j] * g.x_nodes[j][0];
    m2 += g.x_weights[j] * g.x_nodes[j][0] * g.x_nodes[j][0];
  }
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("expected loss against the independent oracle") {
  const NoiseModel families[] = {
      NoiseModel::Gaussian(0.8, 1.0),
      NoiseModel::StudentT(2.5, 1.2, 1.0),
      NoiseModel::SymmetricPareto(2.5, 0.7, 1.0),
      NoiseModel::AsymTwoExp(1.0),
  };
  for (const NoiseModel& m : families) {
    for (double sigma : {1.0, 4.0}) {
      for (double r : {0.0, -0.8, 2.5, 7.0}) {
        const HuberScale s(sigma);
        std::vector<double> breaks = density_kinks(m);
        breaks.push_back(sigma - r);
        breaks.push_back(-sigma - r);
        const double ref =
            simpson_split([&](double t) { return huber_loss(s, r + t) * m.density(t); }, -600.0,
                          600.0, breaks, 800001);
        // the reference truncates at 600; grant exactly the analytic bound for
        // the linear-growth mass it drops
        const double tail_mass = 1.0 - (m.cdf(600.0) - m.cdf(-600.0));
        const double cut = 2.0 * sigma * m.tail_abs_moment_bound(1.0, 600.0) +
                           (2.0 * sigma * std::abs(r) + sigma * sigma) * tail_mass;
        const double got = expected_huber_loss(m, sigma, r);
        CHECK(std::abs(got - ref) <= 1e-7 * std::abs(got) + cut);
      }
    }
  }
}

TEST_CASE("expected loss derivatives match finite differences") {
  const NoiseModel m = NoiseModel::StudentT(2.5, 1.0, 1.0);
  const double sigma = 3.0;
  for (double r : {-4.0, -0.3, 0.0, 1.1, 5.5}) {
    const double h = 1e-6;
    const double fd =
        (expected_huber_loss(m, sigma, r + h) - expected_huber_loss(m, sigma, r - h)) / (2.0 * h);
    CHECK(expected_huber_dloss(m, sigma, r) == doctest::Approx(fd).epsilon(1e-6));
    const double fd2 =
        (expected_huber_dloss(m, sigma, r + h) - expected_huber_dloss(m, sigma, r - h)) / (2.0 * h);
    CHECK(expected_huber_d2loss(m, sigma, r) == doctest::Approx(fd2).epsilon(1e-5));
  }
}

TEST_CASE("squared loss difference against the independent oracle") {
  const NoiseModel m = NoiseModel::AsymTwoExp(1.0);
  for (double sigma : {2.0, 8.0}) {
    for (double d : {0.3, -1.7, 4.0}) {
      const HuberScale s(sigma);
      std::vector<double> breaks = density_kinks(m);
      for (double k : {sigma, -sigma, sigma - d, -sigma - d}) breaks.push_back(k);
      const double ref = simpson_split(
          [&](double t) {
            const double diff = huber_loss(s, d + t) - huber_loss(s, t);
            return diff * diff * m.density(t);
          },
          -300.0, 300.0, breaks, 800001);
      CHECK(expected_sq_loss_diff(m, sigma, d) == doctest::Approx(ref).epsilon(1e-7));
    }
  }
  CHECK(expected_sq_loss_diff(m, 2.0, 0.0) == 0.0);
}

TEST_CASE("moment table interpolates the exact curve") {
  const NoiseModel m = NoiseModel::StudentT(2.5, 1.0, 1.0);
  const double sigma = 4.0;
  const HuberMomentTable table(m, sigma, 1e-11);
  SplitMix64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const double r = rng.next_uniform(-table.range() * 1.2, table.range() * 1.2);
    CHECK(table.value(r) == doctest::Approx(expected_huber_loss(m, sigma, r)).epsilon(1e-8));
    CHECK(table.derivative(r) ==
          doctest::Approx(expected_huber_dloss(m, sigma, r)).epsilon(1e-7));
  }
  // convexity of the tabulated expected-loss profile
  const std::vector<double>& vals = table.tabulated_values();
  for (std::size_t i = 1; i + 1 < vals.size(); ++i)
    CHECK(vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-12);
}

TEST_CASE("risk values") {
  Scenario clean = heavy_scenario();
  clean.noise = NoiseModel::Gaussian(0.0, 1.0);
  const QuadratureGrid grid = make_oracle_grid(clean.marginal, 65);
  auto target = [&](const Point& x) { return clean.target(x); };
  CHECK(risk(target, clean, HuberScale(1.0), grid) == 0.0);

  Scenario small_noise = clean;
  small_noise.noise = NoiseModel::Gaussian(0.1, 1.0);
  CHECK(risk(target, small_noise, HuberScale(100.0), grid) ==
        doctest::Approx(0.01).epsilon(1e-6));

  Scenario asym = clean;
  asym.noise = NoiseModel::AsymTwoExp(1.0);
  CHECK(risk(target, asym, HuberScale(100.0), grid) ==
        doctest::Approx(19.0 / 16.0).epsilon(1e-5));
}

TEST_CASE("l2 distances") {
  const QuadratureGrid grid = make_oracle_grid(MarginalX::Uniform(0.0, 1.0), 33);
  auto f = [](const Point& x) { return std::sin(x[0]); };
  CHECK(l2_distance_sq(f, f, grid) == 0.0);
  auto g = [&](const Point& x) { return std::sin(x[0]) + 2.5; };
  CHECK(l2_distance_sq(f, g, grid) == doctest::Approx(6.25).epsilon(1e-12));

  QuadratureGrid two;
  two.x_nodes = {pt(0.0), pt(1.0)};
  two.x_weights = Vector::Constant(2, 0.5);
  two.inner_tolerance = 1e-9;
  auto a = [](const Point& x) { return x[0] == 0.0 ? 1.0 : 3.0; };
  auto zero = [](const Point&) { return 0.0; };
  CHECK(l2_distance_sq(a, zero, two) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("excess-loss moments") {
  Scenario s = heavy_scenario();
  const QuadratureGrid grid = make_oracle_grid(s.marginal, 65);
  auto target = [&](const Point& x) { return s.target(x); };
  const auto at_target = xi_moments(target, s, HuberScale(4.0), grid);
  CHECK(at_target.first == 0.0);
  CHECK(at_target.second == 0.0);

  // point-mass noise on a one-node grid: mean c^2, second moment c^4
  Scenario clean = s;
  clean.noise = NoiseModel::Gaussian(0.0, 1.0);
  clean.target = TargetFunction::Constant(0.0);
  const QuadratureGrid one = one_node_grid(0.5);
  const double c = 1.3;
  auto shifted = [&](const Point&) { return -c; };
  const auto moments = xi_moments(shifted, clean, HuberScale(1000.0), one);
  CHECK(moments.first == doctest::Approx(c * c).epsilon(1e-12));
  CHECK(moments.second == doctest::Approx(c * c * c * c).epsilon(1e-12));

  // identity: E[Xi] equals the risk difference; Jensen holds
  auto f = [&](const Point& x) { return 0.4 * std::cos(3.0 * x[0]); };
  const auto xm = xi_moments(f, s, HuberScale(4.0), grid);
  const double rf = risk(f, s, HuberScale(4.0), grid);
  const double rstar = risk(target, s, HuberScale(4.0), grid);
  CHECK(xm.first == doctest::Approx(rf - rstar).epsilon(1e-8));
  CHECK(xm.second >= xm.first * xm.first);

  const PopulationQuantities q = population_quantities(f, s, HuberScale(4.0), grid);
  CHECK(q.excess_risk == doctest::Approx(q.risk_f - q.risk_fstar).epsilon(1e-12));
  CHECK(q.l2_sq >= 0.0);
  CHECK(q.risk_f >= 0.0);
}

TEST_CASE("reference function closed forms") {
  Scenario s = heavy_scenario();
  const QuadratureGrid grid = make_oracle_grid(s.marginal, 65);

  const RepresenterFunction big = reference_function(s, 1e9, grid);
  CHECK(rkhs_norm(big) <= 1e-6);

  Scenario zero_target = s;
  zero_target.target = TargetFunction::Constant(0.0);
  const RepresenterFunction z = reference_function(zero_target, 1e-2, grid);
  CHECK(z.coefficients.cwiseAbs().maxCoeff() == 0.0);

  // one-node grid, unit kernel value, unit weight: (1 + 1) alpha = 1
  Scenario one = s;
  one.target = TargetFunction::Constant(1.0);
  const RepresenterFunction r = reference_function(one, 1.0, one_node_grid(0.5));
  CHECK(r.coefficients[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("population minimizer basics") {
  Scenario s = heavy_scenario();
  const QuadratureGrid grid = make_oracle_grid(s.marginal, 65);

  const RepresenterFunction shrunk = population_minimizer(s, HuberScale(4.0), 1e9, grid);
  CHECK(rkhs_norm(shrunk) <= 1e-6);

  // noise-free recovery of an in-space target at vanishing regularization
  Scenario clean = s;
  clean.noise = NoiseModel::Gaussian(0.0, 1.0);
  RepresenterFunction g;
  g.kernel = clean.kernel;
  g.support = {pt(0.25), pt(0.6), pt(0.9)};
  g.coefficients = Vector(3);
  g.coefficients << 0.4, -0.2, 0.3;
  clean.target = TargetFunction::RkhsElement(g);
  const double sigma = std::max(2.0 * clean.target.bound_m, 1.0) + 1.0;
  const RepresenterFunction rec = population_minimizer(clean, HuberScale(sigma), 1e-8, grid);
  auto target = [&](const Point& x) { return clean.target(x); };
  auto fitted = [&](const Point& x) { return eval_function(rec, x); };
  CHECK(l2_distance_sq(fitted, target, grid) <= 1e-4);
}

TEST_CASE("population norm bound holds pointwise") {
  Scenario s = heavy_scenario();
  const QuadratureGrid grid = make_oracle_grid(s.marginal, 65);
  const double na = norm_a(s, 1.0, grid.x_nodes, grid.x_weights);
  for (double sigma : {2.0, 8.0}) {
    for (double lambda : {1e-2, 1e-1}) {
      const RepresenterFunction f = population_minimizer(s, HuberScale(sigma), lambda, grid);
      const double bound = std::sqrt(2.0 * (na + 1.0)) *
                           std::sqrt((1.0 + 1.0) / lambda);  // both exponents vanish at eps = 1
      CHECK(rkhs_norm(f) <= bound * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("bias functionals") {
  Scenario trivial = heavy_scenario();
  trivial.noise = NoiseModel::Gaussian(0.0, 1.0);
  trivial.target = TargetFunction::Constant(0.0);
  const QuadratureGrid grid = make_oracle_grid(trivial.marginal, 65);
  const BiasFunctionals zero = bias_functionals(trivial, HuberScale(2.0), 1e-2, grid);
  CHECK(zero.d_sigma_lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero.d_lambda == doctest::Approx(0.0).epsilon(1e-12));

  // an in-space target makes D(lambda) <= lambda ||g||_K^2
  Scenario inspace = trivial;
  RepresenterFunction g;
  g.kernel = inspace.kernel;
  g.support = {pt(0.3), pt(0.7)};
  g.coefficients = Vector(2);
  g.coefficients << 0.5, -0.25;
  inspace.target = TargetFunction::RkhsElement(g);
  const double lambda = 1e-3;
  const BiasFunctionals bf = bias_functionals(inspace, HuberScale(3.0), lambda, grid);
  const double gnorm = rkhs_norm(g);
  CHECK(bf.d_lambda >= 0.0);
  CHECK(bf.d_lambda <= lambda * gnorm * gnorm * (1.0 + 1e-9));

  // the two objective displays differ by the constant risk at the target
  Scenario asym = bias_scenario();
  const QuadratureGrid agrid = make_oracle_grid(asym.marginal, 65);
  const HuberScale scale(4.0);
  const RepresenterFunction fsl = population_minimizer(asym, scale, 1e-2, agrid);
  auto fitted = [&](const Point& x) { return eval_function(fsl, x); };
  const double risk_at = risk(fitted, asym, scale, agrid);
  const double risk_star = expected_huber_loss(asym.noise, scale.sigma, 0.0);
  const double norm_sq = rkhs_norm(fsl) * rkhs_norm(fsl);
  const BiasFunctionals ab = bias_functionals(asym, scale, 1e-2, agrid);
  CHECK(ab.d_sigma_lambda ==
        doctest::Approx(risk_at - risk_star + 1e-2 * norm_sq).epsilon(1e-9));
}

TEST_CASE("grid refinement stability") {
  Scenario s = heavy_scenario();
  const QuadratureGrid coarse = make_oracle_grid(s.marginal, 129, 1e-9);
  const QuadratureGrid fine = make_oracle_grid(s.marginal, 257, 5e-10);
  const HuberScale scale(4.0);
  auto f = [&](const Point& x) { return 0.7 * std::sin(5.0 * x[0]) + 0.2; };
  auto target = [&](const Point& x) { return s.target(x); };

  const double r1 = risk(f, s, scale, coarse);
  const double r2 = risk(f, s, scale, fine);
  CHECK(std::abs(r1 - r2) <= 1e-5 * std::abs(r2));

  const double l1 = l2_distance_sq(f, target, coarse);
  const double l2 = l2_distance_sq(f, target, fine);
  CHECK(std::abs(l1 - l2) <= 1e-5 * std::abs(l2));

  const auto x1 = xi_moments(f, s, scale, coarse);
  const auto x2 = xi_moments(f, s, scale, fine);
  CHECK(std::abs(x1.first - x2.first) <= 1e-5 * std::abs(x2.first));
  CHECK(std::abs(x1.second - x2.second) <= 1e-5 * std::abs(x2.second));
}

TEST_CASE("monte carlo agreement for the risk") {
  Scenario s = heavy_scenario();
  const QuadratureGrid grid = make_oracle_grid(s.marginal, 129);
  const HuberScale scale(4.0);
  const EffectiveSpaceSample ess = sample_effective_space(s, 4.0, 2, 7777);
  for (const RepresenterFunction& f : ess.functions) {
    auto eval = [&](const Point& x) { return eval_function(f, x); };
    const double oracle = risk(eval, s, scale, grid);
    SplitMix64 stream(123456);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Point x = s.marginal.sample(stream);
      const double y = s.target(x) + s.noise.sample(stream);
      const double v = huber_loss(scale, y - eval(x));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n);
    CHECK(std::abs(mean - oracle) <= 5.0 * se);
  }
}

}  // TEST_SUITE

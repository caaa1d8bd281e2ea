// Serial-vs-OpenMP comparison for the data-parallel kernels: Gram assembly,
// expected-loss table construction and the harness trial sweep. Each pair is
// checked for bitwise-identical results before timing is reported.
//
// Usage: hkreg_bench [jobs]   (default: omp_get_max_threads())

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "hkreg/config.hpp"
#include "hkreg/theorem_harness.hpp"

using namespace hkreg;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

Points random_points(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Points pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    Point p(1);
    p[0] = rng.next_double();
    pts.push_back(p);
  }
  return pts;
}

void bench_gram(int jobs) {
  std::printf("gram matrix (gaussian kernel)\n");
  std::printf("%8s %12s %12s %8s %10s\n", "n", "serial ms", "parallel ms", "speedup", "max diff");
  const KernelSpec spec = KernelSpec::Gaussian(0.25);
  for (int n : {512, 1024, 2048}) {
    const Points pts = random_points(n, 7);
    auto t0 = clock_type::now();
    const Matrix a = gram_serial(spec, pts);
    const double serial = ms_since(t0);
    t0 = clock_type::now();
    const Matrix b = gram(spec, pts, jobs);
    const double parallel = ms_since(t0);
    const double diff = (a - b).cwiseAbs().maxCoeff();
    std::printf("%8d %12.2f %12.2f %8.2f %10.3g\n", n, serial, parallel, serial / parallel, diff);
  }
}

void bench_table(int jobs) {
  std::printf("\nexpected-loss table (student-t noise, 4097 nodes)\n");
  std::printf("%8s %12s %12s %8s\n", "sigma", "serial ms", "parallel ms", "speedup");
  const NoiseModel noise = NoiseModel::StudentT(2.5, 1.0, 1.0);
  for (double sigma : {4.0, 32.0}) {
    auto t0 = clock_type::now();
    const HuberMomentTable serial(noise, sigma, 1e-11, 4097, 1);
    const double s_ms = ms_since(t0);
    t0 = clock_type::now();
    const HuberMomentTable parallel(noise, sigma, 1e-11, 4097, jobs);
    const double p_ms = ms_since(t0);
    double diff = 0.0;
    for (std::size_t i = 0; i < serial.tabulated_values().size(); ++i)
      diff = std::max(diff,
                      std::abs(serial.tabulated_values()[i] - parallel.tabulated_values()[i]));
    std::printf("%8.0f %12.2f %12.2f %8.2f   (max diff %.3g)\n", sigma, s_ms, p_ms, s_ms / p_ms,
                diff);
  }
}

void bench_trials(int jobs) {
  std::printf("\ntrial sweep (36 regularized fits at n = 200)\n");
  const Scenario s = build_scenario(default_scenario("default"));
  auto t0 = clock_type::now();
  const TheoremReport serial = check_rough_bound(s, {2.0, 4.0}, {1e-2, 1e-1}, 9, 200, 99, 1);
  const double s_ms = ms_since(t0);
  t0 = clock_type::now();
  const TheoremReport parallel = check_rough_bound(s, {2.0, 4.0}, {1e-2, 1e-1}, 9, 200, 99, jobs);
  const double p_ms = ms_since(t0);
  bool identical = serial.csv_rows == parallel.csv_rows &&
                   serial.measured_margin == parallel.measured_margin;
  std::printf("serial %.2f ms, parallel %.2f ms, speedup %.2f, identical %s\n", s_ms, p_ms,
              s_ms / p_ms, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int jobs = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  std::printf("jobs = %d\n\n", jobs);
  bench_gram(jobs);
  bench_table(jobs);
  bench_trials(jobs);
  return 0;
}

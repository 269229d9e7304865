#include <benchmark/benchmark.h>

#include <random>

#include "coulomb/spectra.hpp"

using namespace coulomb;

namespace {

IntervalMatrix random_interval_matrix(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IntervalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double c = u(rng);
      m(i, j) = Interval(c, c + 1e-12);
    }
  return m;
}

const Branch& eight_four_branch() {
  static const Branch b = [] {
    StepPolicy p;
    p.max_points = 61;
    Branch out = trace_branch(ProblemSpec::make(8, 4, Family::One), Direction::Plus, p);
    certify_branch(out);
    return out;
  }();
  return b;
}

}  // namespace

static void BM_IntervalArithmetic(benchmark::State& state) {
  Interval a(1.25, 1.5), b(0.75, 2.0);
  for (auto _ : state) {
    Interval r = (a * b + sqr(a)) / b - sqrt(b);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_IntervalArithmetic);

static void BM_InvPow32(benchmark::State& state) {
  const Interval s(2.0, 2.0 + 1e-10);
  for (auto _ : state) benchmark::DoNotOptimize(inv_pow3_2(s));
}
BENCHMARK(BM_InvPow32);

static void BM_IntervalMatMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const IntervalMatrix a = random_interval_matrix(n, 1), b = random_interval_matrix(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_IntervalMatMul)->Arg(24)->Arg(60);

static void BM_MulMidrad(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const IntervalMatrix b = random_interval_matrix(n, 3);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(mul_midrad(a, b));
}
BENCHMARK(BM_MulMidrad)->Arg(60)->Arg(122);

static void BM_HessianEnclosure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IntervalVector box = polygon_enclosure(n);
  for (auto _ : state) benchmark::DoNotOptimize(hess_V(box, 2.0));
}
BENCHMARK(BM_HessianEnclosure)->Arg(5)->Arg(10);

static void BM_CertifyPoint(benchmark::State& state) {
  const Branch& b = eight_four_branch();
  BranchPoint p = b.points[40];
  p.cert.reset();
  for (auto _ : state) benchmark::DoNotOptimize(certify_point(p, b.spec));
}
BENCHMARK(BM_CertifyPoint)->Unit(benchmark::kMillisecond);

static void BM_TraceBranch(benchmark::State& state) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  StepPolicy p;
  p.max_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_branch(spec, Direction::Plus, p));
}
BENCHMARK(BM_TraceBranch)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ValidateEigenpair(benchmark::State& state) {
  const Branch& b = eight_four_branch();
  const BranchPoint& p = b.points[60];
  const ReducedLayout layout(8, Family::One);
  const IntervalMatrix L = linearization(layout.lift(IntervalVector::ball(p.x(), *p.cert->r0)), p.mu());
  const auto pairs = numeric_spectrum(L.mid());
  const EigenPair& pair = pairs.back();
  for (auto _ : state) benchmark::DoNotOptimize(validate_eigenpair(L, pair));
}
BENCHMARK(BM_ValidateEigenpair)->Unit(benchmark::kMillisecond);

static void BM_GershgorinEnclosure(benchmark::State& state) {
  const Branch& b = eight_four_branch();
  const BranchPoint& p = b.points[60];
  const ReducedLayout layout(8, Family::One);
  const IntervalMatrix L = linearization(layout.lift(IntervalVector::ball(p.x(), *p.cert->r0)), p.mu());
  const auto pairs = numeric_spectrum(L.mid());
  for (auto _ : state) benchmark::DoNotOptimize(gershgorin_enclosure(L, pairs));
}
BENCHMARK(BM_GershgorinEnclosure)->Unit(benchmark::kMillisecond);

static void BM_SpectralPipeline(benchmark::State& state) {
  const Branch& b = eight_four_branch();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_pipeline(b.spec, b.points[60], 1));
}
BENCHMARK(BM_SpectralPipeline)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();

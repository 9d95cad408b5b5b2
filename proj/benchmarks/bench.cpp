#include <random>

#include <benchmark/benchmark.h>

#include "loudsn/charts.hpp"
#include "loudsn/dulac.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/period.hpp"
#include "loudsn/polynomial.hpp"

using namespace loudsn;

namespace {

// u0 in thousandths, so the range covers small and near-boundary orbits
void BM_HalfPeriod(benchmark::State& state) {
  const LoudParams a{-0.5, 0.1};
  const double u0 = state.range(0) / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(half_period(a, u0).time);
}
BENCHMARK(BM_HalfPeriod)->Arg(1)->Arg(500)->Arg(950)->Arg(995)->Unit(benchmark::kMicrosecond);

void BM_OrbitPeriodWithDerivative(benchmark::State& state) {
  const LoudParams a{-0.5, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(orbit_period(a, 0.9).period);
}
BENCHMARK(BM_OrbitPeriodWithDerivative)->Unit(benchmark::kMicrosecond);

// s in thousandths
void BM_DulacTime(benchmark::State& state) {
  const Unfolding unf = build_loud_unfolding({-0.5, 0.05});
  const double s = state.range(0) / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(dulac_time(unf, s).T);
}
BENCHMARK(BM_DulacTime)->Arg(200)->Arg(50)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_BuildUnfolding(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_loud_unfolding({-0.5, 0.05}));
}
BENCHMARK(BM_BuildUnfolding)->Unit(benchmark::kMicrosecond);

void BM_PullbackResidual(benchmark::State& state) {
  const LoudParams a{-0.5, 0.1};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> z(1e-3, 0.2), w(-0.2, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(pullback_residual(a, {z(rng), w(rng)}));
}
BENCHMARK(BM_PullbackResidual);

void BM_WeierstrassSplit(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  BivariatePoly::Terms terms;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) terms[{i, j}] = c(rng);
  const BivariatePoly U(terms, degree);
  for (auto _ : state) {
    const auto split = weierstrass_split(U);
    benchmark::DoNotOptimize(weierstrass_reconstructs(U, split));
  }
}
BENCHMARK(BM_WeierstrassSplit)->Arg(4)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();

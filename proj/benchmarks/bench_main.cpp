#include "psgarch/ipi.hpp"
#include "psgarch/pspline.hpp"
#include "psgarch/semigarch.hpp"
#include "psgarch/simulation.hpp"
#include "psgarch/spectral.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace psgarch;

namespace {

std::vector<double> noisy_sine(std::size_t n) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> z(0.0, 0.2);
  std::vector<double> y(n);
  double e = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    e = 0.3 * e + z(g);
    y[t] = std::sin(2.0 * std::numbers::pi * (t + 0.5) / n) + e;
  }
  return y;
}

void BM_BuildBasis(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(pspline::build_basis(n, 3, 40));
}
BENCHMARK(BM_BuildBasis)->Arg(2000)->Arg(7641)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto b = pspline::build_basis(n, 3, 40);
  const auto y = noisy_sine(n);
  for (auto _ : st) benchmark::DoNotOptimize(pspline::fit(b, y, 0.2));
}
BENCHMARK(BM_Fit)->Arg(2000)->Arg(7641)->Unit(benchmark::kMillisecond);

void BM_LambdaA(benchmark::State& st) {
  const auto b = pspline::build_basis(7641, 3, 40);
  const auto m = pspline::fit(b, noisy_sine(7641), 0.2).fitted;
  for (auto _ : st) benchmark::DoNotOptimize(pspline::lambda_a(b, m, 0.01));
}
BENCHMARK(BM_LambdaA)->Unit(benchmark::kMillisecond);

void BM_SelectCf(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto y = noisy_sine(n);
  for (auto _ : st) benchmark::DoNotOptimize(spectral::select_cf(y));
}
BENCHMARK(BM_SelectCf)->Arg(2000)->Arg(7641)->Unit(benchmark::kMillisecond);

void BM_SelectLambda(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto y = noisy_sine(n);
  const auto b = pspline::build_basis(n, 3, 40);
  for (auto _ : st) benchmark::DoNotOptimize(ipi::select_lambda(b, y));
}
BENCHMARK(BM_SelectLambda)->Arg(2000)->Arg(7641)->Unit(benchmark::kMillisecond);

void BM_FitUnitGarch(benchmark::State& st) {
  sim::SimDesign d;
  d.scale_fn = sim::constant_scale(1.0);
  d.n = static_cast<std::size_t>(st.range(0));
  auto xi = sim::simulate(d, 0).returns;
  double ms = 0.0;
  for (double x : xi) ms += x * x;
  ms = std::sqrt(ms / xi.size());
  for (auto& x : xi) x /= ms;
  for (auto _ : st) benchmark::DoNotOptimize(semigarch::fit_unit_garch(xi));
}
BENCHMARK(BM_FitUnitGarch)->Arg(2000)->Arg(7641)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

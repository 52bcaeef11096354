// Serial reference vs OpenMP estimators, and the O(M^2) vs O(M) Toeplitz sums.
#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "loopqed/constant_a.hpp"
#include "loopqed/harness/estimators.hpp"
#include "loopqed/potentials.hpp"

namespace h = loopqed::harness;

static h::ExperimentConfig bench_config(std::size_t samples) {
  h::Overrides ov;
  ov.experiment = "wc2";
  ov.samples = samples;
  return h::parse_config("[scales]\nlambda_a = 1e-3\nlambda_b = 1e-3\n", ov);
}

static void BM_WcSq(benchmark::State& state, h::Execution exec) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(h::estimate_wc_sq(cfg, exec).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_WcSq, serial, h::Execution::serial)->Arg(4000);
BENCHMARK_CAPTURE(BM_WcSq, parallel, h::Execution::parallel)->Arg(4000);

static void BM_WmSq(benchmark::State& state, h::Execution exec) {
  h::Overrides ov;
  ov.experiment = "wm2";
  ov.samples = 500;
  const auto cfg = h::parse_config("[scales]\nlambda_ph = 100\n[scan]\nr_grid = 1\n", ov);
  loopqed::constant_A(cfg.quad);  // cached after the first call; keep it out of the timing
  for (auto _ : state) benchmark::DoNotOptimize(h::estimate_wm_sq(cfg, exec).wm_sq.value);
}
BENCHMARK_CAPTURE(BM_WmSq, serial, h::Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WmSq, parallel, h::Execution::parallel)->Unit(benchmark::kMillisecond);

static void BM_Toeplitz(benchmark::State& state, loopqed::ToeplitzMethod method) {
  const auto M = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> x(M), y(M);
  for (std::size_t i = 0; i < M; ++i) {
    x[i] = {normal(engine), normal(engine)};
    y[i] = {normal(engine), normal(engine)};
  }
  for (auto _ : state) benchmark::DoNotOptimize(loopqed::toeplitz_q_sum(x, y, 3.0, method));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Toeplitz, reference, loopqed::ToeplitzMethod::reference)
    ->RangeMultiplier(4)->Range(16, 1024)->Complexity();
BENCHMARK_CAPTURE(BM_Toeplitz, fast, loopqed::ToeplitzMethod::fast)
    ->RangeMultiplier(4)->Range(16, 1024)->Complexity();

BENCHMARK_MAIN();

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "riskopt/risk.hpp"

using namespace riskopt;

namespace {

std::vector<double> normal_values(std::size_t m) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> v(m);
  for (auto& x : v) x = n(rng);
  return v;
}

void BM_SampleSetSort(benchmark::State& state) {
  const auto v = normal_values(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SampleSet(v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Pof(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pof(s, 1.645));
}

void BM_Superquantile(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_superquantile(s, 0.95));
}

void BM_SuperquantileMinForm(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_superquantile_minform(s, 0.95));
}

void BM_BpofScan(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_bpof_alg2(s, 1.645));
}

void BM_BpofMinForm(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_bpof_minform(s, 1.645));
}

void BM_SuperquantileBootstrap(benchmark::State& state) {
  const SampleSet s(normal_values(state.range(0)));
  const BootstrapOptions boot{100, 7};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_superquantile(s, 0.95, boot));
}

}  // namespace

BENCHMARK(BM_SampleSetSort)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Pof)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Superquantile)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SuperquantileMinForm)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BpofScan)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BpofMinForm)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SuperquantileBootstrap)->Arg(10000)->Unit(benchmark::kMillisecond);

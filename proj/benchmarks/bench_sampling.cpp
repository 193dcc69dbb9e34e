#include <benchmark/benchmark.h>

#include "riskopt/problems/cooling_fin.hpp"
#include "riskopt/problems/short_column.hpp"
#include "riskopt/stochastics.hpp"

using namespace riskopt;

namespace {

void BM_ShortColumnBatch(benchmark::State& state) {
  const auto specs = short_column_inputs();
  const auto corr = short_column_correlation();
  for (auto _ : state) benchmark::DoNotOptimize(sample_batch(specs, corr, state.range(0), 1, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FinPerturbationBatch(benchmark::State& state) {
  const CoolingFinModel model(1);
  const auto specs = model.input_distributions();
  const auto corr = CorrelationSpec::identity(specs.size());
  for (auto _ : state) benchmark::DoNotOptimize(sample_batch(specs, corr, state.range(0), 1, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TruncatedNormalIcdf(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    u = u > 0.999 ? 1e-4 : u + 1e-4;
    benchmark::DoNotOptimize(truncated_normal_icdf(u, 5.0, 0.5, 3.0, 6.0));
  }
}

}  // namespace

BENCHMARK(BM_ShortColumnBatch)->RangeMultiplier(10)->Range(10000, 1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FinPerturbationBatch)->RangeMultiplier(10)->Range(10000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TruncatedNormalIcdf);

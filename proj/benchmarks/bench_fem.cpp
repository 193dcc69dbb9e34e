#include <vector>

#include <benchmark/benchmark.h>

#include "riskopt/problems/cooling_fin.hpp"
#include "riskopt/problems/fin.hpp"
#include "riskopt/stochastics.hpp"

using namespace riskopt;

namespace {

void BM_FinMeshBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fin::build_half_fin_mesh(state.range(0)));
}

void BM_FinSolve(benchmark::State& state) {
  const auto system = fin::build_half_fin_mesh(state.range(0));
  fin::FemSystem::Solver solver(*system);
  const std::vector<double> kappa{fin::Geometry::kPostConductivity, 5.5, 5.5, 5.5, 5.5};
  double bi = fin::Geometry::kBiot;
  for (auto _ : state) {
    bi = bi > 2.0 * fin::Geometry::kBiot ? fin::Geometry::kBiot : bi * 1.001;
    benchmark::DoNotOptimize(solver.solve(kappa, bi));
  }
  state.counters["dofs"] = static_cast<double>(system->dofs());
}

void BM_FinLimitStates(benchmark::State& state) {
  const CoolingFinModel model(2, {}, 1);
  const auto specs = model.input_distributions();
  const auto batch = sample_batch(specs, CorrelationSpec::identity(specs.size()), state.range(0), 1, 1);
  const std::vector<double> d{5.5, 5.5, 5.5, 5.5};
  std::vector<double> g(batch.rows());
  for (auto _ : state) model.limit_states(d, batch, g, {});
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FinMeshBuild)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FinSolve)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FinLimitStates)->Arg(1000)->Unit(benchmark::kMillisecond);

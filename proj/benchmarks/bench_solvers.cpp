#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "riskopt/problems/short_column.hpp"
#include "riskopt/saa.hpp"
#include "riskopt/solvers/convex.hpp"
#include "riskopt/solvers/dfo.hpp"
#include "riskopt/solvers/lp.hpp"
#include "riskopt/stochastics.hpp"

using namespace riskopt;

namespace {

std::vector<double> box_center_design(const SaaProblem& p) {
  const auto c = p.bounds.center();
  return {c.begin(), c.begin() + static_cast<std::ptrdiff_t>(p.design_dim)};
}

SaaProblem short_column_problem(std::size_t m) {
  auto model = std::make_shared<const ShortColumnConvexModel>();
  auto batch = std::make_shared<const RandomBatch>(
      sample_batch(short_column_inputs(), short_column_correlation(), m, 1, 1));
  return build_superquantile_constrained(model, batch, 0.95, 1.0);
}

// One LP of the linearized hinge problem: m + 3 variables, m + 1 rows.
void BM_LinearizedSuperquantileLp(benchmark::State& state) {
  const auto p = short_column_problem(state.range(0));
  const auto lp = expand_to_lp(p, linearize(p, box_center_design(p)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp));
}

void BM_ConvexSolve(benchmark::State& state) {
  const auto p = short_column_problem(state.range(0));
  const auto x0 = box_center_design(p);
  SolverConfig cfg;
  cfg.max_evals = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_convex_saa(p, cfg, x0));
}

void BM_DfoSolve(benchmark::State& state) {
  const auto p = short_column_problem(state.range(0));
  const auto x0 = box_center_design(p);
  SolverConfig cfg;
  cfg.max_evals = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dfo(p, cfg, x0));
}

}  // namespace

BENCHMARK(BM_LinearizedSuperquantileLp)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvexSolve)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DfoSolve)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

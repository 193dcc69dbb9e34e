#include "riskopt/harness/studies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskopt/parallel.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/stochastics.hpp"

namespace riskopt::harness {

std::vector<FrontierCell> frontier(const FrontierRequest& request) {
  if (request.formulations.empty()) throw std::invalid_argument("frontier: no formulations");
  if (request.alphas.size() < 2) throw std::invalid_argument("frontier: at least two grid points are required");
  const auto sizes = request.sample_sizes.empty() ? std::vector<std::size_t>{request.base.samples}
                                                  : request.sample_sizes;
  const auto seeds = request.seeds.empty() ? std::vector<std::uint64_t>{request.base.seed} : request.seeds;

  std::vector<FrontierCell> cells;
  for (auto f : request.formulations)
    for (double a : request.alphas)
      for (auto m : sizes)
        for (auto s : seeds) cells.push_back({f, a, m, s, std::nullopt, {}});

  const Problem problem = make_problem(request.problem_id, request.options);
  parallel_for_blocks(cells.size(), 1, request.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& cell = cells[i];
      FormulationSpec spec = request.base;
      spec.id = cell.formulation;
      spec.alpha = cell.alpha;
      spec.samples = cell.samples;
      spec.seed = cell.seed;
      if (spec.eval_seed && *spec.eval_seed == cell.seed) spec.eval_seed.reset();
      try {
        cell.run = run(spec, problem);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  });
  return cells;
}

std::vector<TruncationVariant> default_truncation_variants() {
  return {{"mu-4sigma,mu+2sigma", {4.0, 2.0}}, {"mu-2sigma,mu+2sigma", {2.0, 2.0}}, {"mu-sigma,mu+sigma", {1.0, 1.0}}};
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty() || bins == 0) throw std::invalid_argument("histogram: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) hi = lo + 1.0;
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

std::vector<ConservativenessRow> conservativeness_study(const ConservativenessRequest& request) {
  if (request.variants.empty()) throw std::invalid_argument("conservativeness: no truncation variants");
  std::vector<ConservativenessRow> rows;
  for (const auto& v : request.variants) {
    ProblemOptions options = request.options;
    options.truncation = v.truncation;
    const CoolingFinModel model(options.mesh_resolution, options.truncation, options.threads);
    if (request.design.size() != model.design_dim())
      throw std::invalid_argument("conservativeness: design has the wrong size");
    const auto batch = sample_batch(model.input_distributions(), model.input_correlation(), request.samples,
                                    request.seed, kOptimizationStream, default_thread_count());
    std::vector<double> g(request.samples);
    model.limit_states(request.design, batch, g, {});
    const SampleSet s(g);
    const double q = estimate_quantile(s, request.alpha).value;
    const double qbar = estimate_superquantile(s, request.alpha).value;
    rows.push_back({v, q, qbar, 100.0 * (qbar - q) / q, histogram(g, request.bins)});
  }
  return rows;
}

std::vector<double> threepoint_sample(std::size_t m, std::uint64_t seed) {
  const std::vector<DistributionSpec> specs{DistributionSpec::normal(0.0, 1.0)};
  const auto z = sample_batch(specs, {}, m, seed, kOptimizationStream, default_thread_count());
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = threepoint_from_uniform(standard_normal_cdf(z.row(i)[0]));
  return v;
}

std::vector<Remark4Row> remark4_study(std::span<const double> t_grid, std::size_t m, std::uint64_t seed) {
  if (t_grid.empty()) throw std::invalid_argument("remark4: empty threshold grid");
  const SampleSet s(threepoint_sample(m, seed));
  std::vector<Remark4Row> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const auto exact = analytic_threepoint(t);
    rows.push_back({t, exact.pof, exact.bpof, estimate_pof(s, t).value, estimate_bpof_alg2(s, t).value});
  }
  return rows;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("linear_grid: invalid range");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out(n + 1);
  // Rounded so that grid points such as -1 or 0.5 are hit exactly.
  for (std::size_t k = 0; k <= n; ++k) out[k] = std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
  return out;
}

}  // namespace riskopt::harness

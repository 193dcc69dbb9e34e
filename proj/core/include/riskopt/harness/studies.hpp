#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskopt/harness/run.hpp"

namespace riskopt::harness {

struct FrontierRequest {
  std::string problem_id;
  ProblemOptions options;
  std::vector<FormulationId> formulations;
  /// Reliability levels; each cell targets PoF 1 - alpha.
  std::vector<double> alphas;
  /// Optimization sample sizes; base.samples when empty.
  std::vector<std::size_t> sample_sizes;
  /// Optimization seeds; base.seed when empty.
  std::vector<std::uint64_t> seeds;
  /// Template for every cell (budget, solver, certificate settings, ...).
  FormulationSpec base;
  /// Cells solved concurrently; 0 picks the hardware default.
  unsigned workers = 0;
};

struct FrontierCell {
  FormulationId formulation;
  double alpha;
  std::size_t samples;
  std::uint64_t seed;
  std::optional<OptimizationRun> run;
  /// Set when the cell failed; the other cells are unaffected.
  std::string error;
};

/// Cells ordered by (formulation, alpha, samples, seed) regardless of scheduling.
std::vector<FrontierCell> frontier(const FrontierRequest& request);

struct TruncationVariant {
  std::string label;
  FinTruncation truncation;
};

/// [mu - 4 sigma, mu + 2 sigma], [mu - 2 sigma, mu + 2 sigma], [mu - sigma, mu + sigma].
std::vector<TruncationVariant> default_truncation_variants();

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> values, std::size_t bins);

struct ConservativenessRow {
  TruncationVariant variant;
  double quantile;
  double superquantile;
  /// 100 (Qbar - Q) / Q.
  double percent_difference;
  Histogram histogram;
};

struct ConservativenessRequest {
  std::vector<double> design;
  double alpha = 0.95;
  std::vector<TruncationVariant> variants = default_truncation_variants();
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  ProblemOptions options;
  std::size_t bins = 50;
};

/// Limit-state distribution of the cooling fin at a fixed design under each
/// truncation of the perturbations.
std::vector<ConservativenessRow> conservativeness_study(const ConservativenessRequest& request);

struct Remark4Row {
  double t;
  double analytic_pof;
  double analytic_bpof;
  double sampled_pof;
  double sampled_bpof;
};

/// m draws of the law P(-1) = 0.8, P(0) = 0.1, P(1) = 0.1.
std::vector<double> threepoint_sample(std::size_t m, std::uint64_t seed);

/// Analytic and sampled PoF / bPoF of the three-point law over a threshold grid.
std::vector<Remark4Row> remark4_study(std::span<const double> t_grid, std::size_t m, std::uint64_t seed);

/// lo, lo + step, ..., hi (inclusive up to round-off).
std::vector<double> linear_grid(double lo, double hi, double step);

}  // namespace riskopt::harness

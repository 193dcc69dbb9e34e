#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace riskopt {

/// Evaluated limit-state (or objective) values at m equally weighted draws.
/// Holds a descending-sorted copy alongside the original order.
class SampleSet {
 public:
  explicit SampleSet(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  /// Stable descending order; ties keep their relative input order.
  std::span<const double> sorted_descending() const noexcept { return sorted_; }
  double mean() const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
};

enum class RiskKind { PoF, Quantile, Superquantile, BPoF };

/// Tagged risk measure: level alpha for quantile-type kinds, threshold t otherwise.
struct RiskSpec {
  RiskKind kind;
  double parameter;

  static RiskSpec pof(double t) { return {RiskKind::PoF, t}; }
  static RiskSpec quantile(double alpha) { return {RiskKind::Quantile, alpha}; }
  static RiskSpec superquantile(double alpha) { return {RiskKind::Superquantile, alpha}; }
  static RiskSpec bpof(double t) { return {RiskKind::BPoF, t}; }

  void validate() const;
};

struct RiskEstimate {
  double value = 0.0;
  std::optional<double> std_error;
  std::size_t m = 0;
  /// Superquantile: the quantile anchor gamma*. bPoF: the buffer threshold lambda*.
  std::optional<double> aux;
};

struct BootstrapOptions {
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
};

/// k_alpha = ceil(m (1 - alpha)), clamped to [1, m] and guarded against
/// round-off in the product.
std::size_t tail_count(std::size_t m, double alpha);

RiskEstimate estimate_pof(const SampleSet& s, double t);
RiskEstimate estimate_quantile(const SampleSet& s, double alpha,
                               const std::optional<BootstrapOptions>& bootstrap = std::nullopt);
RiskEstimate estimate_superquantile(const SampleSet& s, double alpha,
                                    const std::optional<BootstrapOptions>& bootstrap = std::nullopt);
/// Minimizes gamma + sum[g - gamma]^+ / (m (1 - alpha)) over the order statistics.
RiskEstimate estimate_superquantile_minform(const SampleSet& s, double alpha);
/// Descending tail-average scan; returns (k - 1) / m.
RiskEstimate estimate_bpof_alg2(const SampleSet& s, double t,
                                const std::optional<BootstrapOptions>& bootstrap = std::nullopt);
/// min over lambda < t of mean([g - lambda]^+) / (t - lambda), by exact breakpoint enumeration.
RiskEstimate estimate_bpof_minform(const SampleSet& s, double t);

RiskEstimate estimate(const SampleSet& s, const RiskSpec& spec);

struct ThreePointRisk {
  double pof;
  double bpof;
};

/// Closed-form PoF and bPoF of the law P(-1) = 0.8, P(0) = 0.1, P(1) = 0.1.
ThreePointRisk analytic_threepoint(double t);

/// Deterministic map from a uniform draw in (0, 1) to the three-point law.
double threepoint_from_uniform(double u);

}  // namespace riskopt

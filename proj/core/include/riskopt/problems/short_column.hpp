#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskopt/model.hpp"

namespace riskopt {

/// 4M / (w h^2 Y) + F^2 / (w^2 h^2 Y^2) for design (w, h) and z = (F, M, Y).
double short_column_limit_state(std::span<const double> design, std::span<const double> z);

/// (e^{x1 + x2}, limit state at w = e^{x1}, h = e^{x2}).
std::pair<double, double> short_column_convex_forms(std::span<const double> x, std::span<const double> z);

/// Loads F ~ N(500, 100), M ~ N(2000, 400) with corr(F, M) = 0.5; yield
/// strength Y ~ LogNormal with mean 5 and standard deviation 0.5.
std::vector<DistributionSpec> short_column_inputs();
CorrelationSpec short_column_correlation();

/// Cross-section area w h subject to the limit state with threshold 1,
/// w in [5, 15], h in [15, 25].
class ShortColumnModel : public StochasticModel {
 public:
  std::string name() const override { return "short_column"; }
  Box design_bounds() const override;
  std::vector<DistributionSpec> input_distributions() const override { return short_column_inputs(); }
  CorrelationSpec input_correlation() const override { return short_column_correlation(); }
  double threshold() const override { return 1.0; }
  ModelEvaluation evaluate(std::span<const double> design, std::span<const double> z) const override;
  std::optional<double> deterministic_objective(std::span<const double> design) const override;
  void deterministic_objective_gradient(std::span<const double> design, std::span<double> grad) const override;
  void limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                    std::span<double> grad) const override;
};

/// Same problem in x = (ln w, ln h), where objective and limit state are
/// convex in x for every draw.
class ShortColumnConvexModel : public StochasticModel {
 public:
  std::string name() const override { return "short_column_convex"; }
  Box design_bounds() const override;
  std::vector<DistributionSpec> input_distributions() const override { return short_column_inputs(); }
  CorrelationSpec input_correlation() const override { return short_column_correlation(); }
  double threshold() const override { return 1.0; }
  bool convex_in_design() const override { return true; }
  ModelEvaluation evaluate(std::span<const double> design, std::span<const double> z) const override;
  std::optional<double> deterministic_objective(std::span<const double> design) const override;
  void deterministic_objective_gradient(std::span<const double> design, std::span<double> grad) const override;
  void limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                    std::span<double> grad) const override;
};

}  // namespace riskopt

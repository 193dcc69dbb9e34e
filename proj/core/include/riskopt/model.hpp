#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskopt/design.hpp"
#include "riskopt/stochastics.hpp"

namespace riskopt {

struct ModelEvaluation {
  double objective;
  double limit_state;
};

/// Maps (design, random draw) to (objective value, limit-state value).
/// Failure is limit_state > threshold().
class StochasticModel {
 public:
  virtual ~StochasticModel() = default;

  virtual std::string name() const = 0;
  virtual Box design_bounds() const = 0;
  virtual std::vector<DistributionSpec> input_distributions() const = 0;
  virtual CorrelationSpec input_correlation() const { return {}; }
  virtual double threshold() const = 0;

  virtual ModelEvaluation evaluate(std::span<const double> design, std::span<const double> z) const = 0;

  /// Objective that does not depend on z, if the problem defines one.
  virtual std::optional<double> deterministic_objective(std::span<const double> /*design*/) const {
    return std::nullopt;
  }

  virtual bool convex_in_design() const { return false; }
  virtual bool affine_in_design() const { return false; }

  /// Limit states at every batch row. `grad` is either empty or m x n_d
  /// row-major and receives d g / d design. Default: loop + central differences.
  virtual void limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                            std::span<double> grad) const;
  /// Same contract for the objective values.
  virtual void objectives(std::span<const double> design, const RandomBatch& batch, std::span<double> f,
                          std::span<double> grad) const;
  /// Gradient of deterministic_objective; default central differences.
  virtual void deterministic_objective_gradient(std::span<const double> design, std::span<double> grad) const;

  std::size_t design_dim() const { return design_bounds().size(); }
  std::size_t random_dim() const { return input_distributions().size(); }

  /// Limit states on raw row-major draws (no batch wrapper).
  std::vector<double> limit_states_on_rows(std::span<const double> design, std::span<const double> rows) const;
};

/// Relative step used by the default finite-difference gradients.
double fd_step(double x);

}  // namespace riskopt

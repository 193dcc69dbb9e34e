#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "riskopt/model.hpp"
#include "riskopt/problems/fin.hpp"

namespace riskopt {

/// Truncation of the additive perturbations, in standard deviations around the mean.
struct FinTruncation {
  double lower_sigmas = 4.0;
  double upper_sigmas = 2.0;
};

/// Fin conductivities k1..k4 in [1, 10]. The objective is the root-average
/// temperature at the nominal inputs plus the normalized material cost; the
/// limit state is the maximum nodal temperature with threshold 0.35.
/// Solves run on the half domain, which gives the same outputs as the full
/// fin because geometry, loading and perturbations are mirror-symmetric.
class CoolingFinModel : public StochasticModel {
 public:
  explicit CoolingFinModel(std::size_t resolution = 2, FinTruncation truncation = {}, unsigned threads = 0);

  std::string name() const override { return "cooling_fin"; }
  Box design_bounds() const override;
  std::vector<DistributionSpec> input_distributions() const override;
  double threshold() const override { return fin::Geometry::kThreshold; }
  ModelEvaluation evaluate(std::span<const double> design, std::span<const double> z) const override;
  std::optional<double> deterministic_objective(std::span<const double> design) const override;
  void limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                    std::span<double> grad) const override;
  void objectives(std::span<const double> design, const RandomBatch& batch, std::span<double> f,
                  std::span<double> grad) const override;

  std::size_t resolution() const noexcept { return resolution_; }
  /// Degrees of freedom of the full (two-sided) mesh at this resolution.
  std::size_t full_dofs() const noexcept { return full_dofs_; }
  const fin::FemSystem& system() const noexcept { return *system_; }
  const FinTruncation& truncation() const noexcept { return truncation_; }

 private:
  template <typename Pick>
  void solve_rows(std::span<const double> design, const RandomBatch& batch, std::span<double> out, Pick pick) const;

  std::size_t resolution_;
  FinTruncation truncation_;
  unsigned threads_;
  std::shared_ptr<const fin::FemSystem> system_;
  std::size_t full_dofs_;
};

}  // namespace riskopt

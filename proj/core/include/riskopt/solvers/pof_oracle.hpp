#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskopt/model.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/stochastics.hpp"

namespace riskopt {

struct AdaptivePofResult {
  RiskEstimate estimate;
  /// sqrt((1 - p) / (p m)); infinite when p = 0.
  double relative_error = 0.0;
  bool converged = false;
  /// No failures were observed up to the cap, so the relative error is not certified.
  bool zero_at_cap = false;
  /// Limit-state values of the rows used, in stream order (only when requested).
  std::vector<double> values;
};

/// Doubles the sample count, starting from `initial`, until the relative
/// standard error of the PoF estimate is at most target_rel_err or the count
/// reaches `cap` (never exceeded). Draws come from `stream`, so calls at
/// different designs share their samples.
AdaptivePofResult adaptive_pof_oracle(const StochasticModel& model, std::span<const double> design, double t,
                                      double target_rel_err, std::size_t cap, const SampleStream& stream,
                                      std::size_t initial = 1000, bool keep_values = false);

/// Same, on a fresh stream keyed by `seed`.
AdaptivePofResult adaptive_pof_oracle(const StochasticModel& model, std::span<const double> design, double t,
                                      double target_rel_err, std::size_t cap, std::uint64_t seed,
                                      std::size_t initial = 1000);

}  // namespace riskopt

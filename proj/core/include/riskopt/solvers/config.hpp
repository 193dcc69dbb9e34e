#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskopt/design.hpp"

namespace riskopt {

/// min objective(x) s.t. constraints_j(x) <= 0, x in bounds.
struct ConstrainedProblem {
  Box bounds;
  std::function<double(std::span<const double>)> objective;
  std::vector<std::function<double(std::span<const double>)>> constraints;

  double max_violation(std::span<const double> x) const;
};

struct SolverConfig {
  std::size_t max_evals = 2000;
  /// Trust radii are relative to the design box (each bounded coordinate is
  /// scaled to unit length).
  double initial_trust_radius = 0.1;
  double final_trust_radius = 1e-6;
  double feasibility_tol = 1e-8;
  std::vector<double> smoothing_schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TerminationReason {
  Converged,
  MaxEvaluations,
  NoFeasiblePoint,
  LineSearchFailure,
};

std::string to_string(TerminationReason r);

struct Iterate {
  std::vector<double> x;
  double objective;
  double max_violation;
};

struct SolveTrace {
  std::vector<Iterate> iterates;
  TerminationReason termination_reason = TerminationReason::Converged;
  std::size_t eval_count = 0;
  std::vector<double> x;
  double objective = 0.0;
  double max_violation = 0.0;
  std::optional<double> kkt_residual;
  /// Per outer stage (convex solver): max violation of the original problem.
  std::vector<double> stage_violations;

  bool feasible(double tol) const { return max_violation <= tol; }
};

}  // namespace riskopt

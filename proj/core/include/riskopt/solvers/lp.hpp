#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "riskopt/saa.hpp"

namespace riskopt {

enum class LpStatus { Optimal, Unbounded, Infeasible, NumericalFailure };

std::string to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  /// Nonnegative multipliers of the A x <= b rows: c + A^T y + (bound terms) = 0.
  std::vector<double> duals;
  /// Most negative reduced cost at termination (0 when dual feasible).
  double dual_infeasibility = 0.0;
  std::size_t iterations = 0;
  std::string diagnostics;
};

/// Dense two-phase primal simplex. Dantzig pricing, switching to Bland's rule
/// after a run of degenerate pivots.
LpResult solve_lp(const LpTableau& lp, std::size_t max_iterations = 100000);

}  // namespace riskopt

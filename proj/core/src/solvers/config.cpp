#include "riskopt/solvers/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskopt {

double ConstrainedProblem::max_violation(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& c : constraints) v = std::max(v, c(x));
  return v;
}

void SolverConfig::validate() const {
  if (max_evals == 0) throw std::invalid_argument("SolverConfig: max_evals must be positive");
  if (!(initial_trust_radius > 0.0) || !(final_trust_radius > 0.0) || !(final_trust_radius < initial_trust_radius))
    throw std::invalid_argument("SolverConfig: need 0 < final_trust_radius < initial_trust_radius");
  if (!(feasibility_tol > 0.0)) throw std::invalid_argument("SolverConfig: feasibility_tol must be positive");
  for (std::size_t i = 0; i < smoothing_schedule.size(); ++i) {
    if (smoothing_schedule[i] < 1e-8)
      throw std::invalid_argument("SolverConfig: smoothing widths must be at least 1e-8");
    if (i > 0 && !(smoothing_schedule[i] < smoothing_schedule[i - 1]))
      throw std::invalid_argument("SolverConfig: smoothing schedule must be strictly decreasing");
  }
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Converged:
      return "converged";
    case TerminationReason::MaxEvaluations:
      return "max_evaluations";
    case TerminationReason::NoFeasiblePoint:
      return "no_feasible_point";
    case TerminationReason::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

}  // namespace riskopt

#pragma once

#include <span>

#include "riskopt/saa.hpp"
#include "riskopt/solvers/config.hpp"

namespace riskopt {

/// Derivative-free linear-interpolation trust-region method with an infinity
/// norm trust region. Keeps n+1 interpolation points, solves each step as an
/// LP, and accepts on a penalty merit (objective + penalty * max violation).
/// Returns the best feasible evaluated point, or the least infeasible one.
SolveTrace solve_dfo(const ConstrainedProblem& p, const SolverConfig& cfg, std::span<const double> x0);

/// Runs on the design variables with the auxiliary variables profiled out.
SolveTrace solve_dfo(const SaaProblem& p, const SolverConfig& cfg, std::span<const double> design0);

}  // namespace riskopt

#pragma once

#include <span>

#include "riskopt/saa.hpp"
#include "riskopt/solvers/config.hpp"

namespace riskopt {

/// Solves a declared-convex SaaProblem. Each stage replaces the hinge by its
/// tau-smoothed overestimator (tau from cfg.smoothing_schedule times the
/// problem's smoothing scale) and minimizes the augmented Lagrangian with a
/// projected BFGS inner loop, warm-started from the previous stage. x0 is
/// either a design (aux is then profiled) or a full (design, aux) point.
/// Throws std::invalid_argument for problems not declared convex.
SolveTrace solve_convex_saa(const SaaProblem& p, const SolverConfig& cfg, std::span<const double> x0);

}  // namespace riskopt

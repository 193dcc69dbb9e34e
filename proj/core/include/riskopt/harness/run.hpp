#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "riskopt/model.hpp"
#include "riskopt/problems/cooling_fin.hpp"
#include "riskopt/solvers/config.hpp"

namespace riskopt::harness {

enum class FormulationId {
  RbdoPof,          // min E f  s.t. PoF_t <= 1 - alpha (adaptive PoF oracle)
  QuantileEquiv,    // min E f  s.t. Q_alpha <= t
  SqConstrained,    // min E f  s.t. Qbar_alpha <= t
  SqObjective,      // min Qbar_alpha[g]  s.t. Qbar_beta[f] <= budget (E f with a deterministic objective)
  BpofConstrained,  // min E f  s.t. bPoF_t <= 1 - alpha
  BpofObjective,    // min bPoF_t  s.t. E f <= budget
  PofObjective,     // min PoF_t  s.t. E f <= budget
};

std::string to_string(FormulationId id);
FormulationId parse_formulation(const std::string& name);
std::vector<FormulationId> all_formulations();
/// Formulations built from hinge terms, which keep convexity of g and f.
bool is_hinge_form(FormulationId id);

enum class SolverChoice { Auto, Dfo, Convex };
std::string to_string(SolverChoice s);
SolverChoice parse_solver(const std::string& name);

struct FormulationSpec {
  FormulationId id = FormulationId::SqConstrained;
  /// Reliability level: the PoF target is 1 - alpha.
  double alpha = 0.95;
  /// Level for the objective superquantile in sq_objective.
  double beta = 0.95;
  /// Failure threshold; the problem's own threshold when unset.
  std::optional<double> threshold;
  /// Budget for the objective-type formulations.
  std::optional<double> budget;
  /// Optimization sample size (frozen SAA batch).
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  SolverChoice solver = SolverChoice::Auto;
  /// The problem's default configuration when unset.
  std::optional<SolverConfig> solver_config;
  /// Starting design; the problem's default when unset.
  std::optional<std::vector<double>> initial_design;

  /// Adaptive PoF oracle used by rbdo_pof.
  double pof_target_rel_err = 0.01;
  std::size_t pof_initial = 1000;
  std::size_t pof_cap = 100000;

  /// Certificate batch.
  std::size_t eval_samples = 500000;
  /// Seed of the certificate batch; derived from `seed` when unset and never equal to it.
  std::optional<std::uint64_t> eval_seed;

  void validate() const;
  std::uint64_t certificate_seed() const;
};

struct ProblemOptions {
  std::size_t mesh_resolution = 2;
  FinTruncation truncation;
  /// Worker threads for batch evaluation; 0 picks the hardware default.
  unsigned threads = 0;
};

/// A registered benchmark: the model in natural design variables and, when the
/// problem has one, an equivalent model in which g and f are convex.
struct Problem {
  std::string id;
  std::shared_ptr<const StochasticModel> model;
  std::shared_ptr<const StochasticModel> convex_model;
  /// Maps between natural designs and convex-model designs.
  std::function<std::vector<double>(std::span<const double>)> to_convex;
  std::function<std::vector<double>(std::span<const double>)> from_convex;
  std::vector<double> initial_design;
  SolverConfig default_solver;
};

std::vector<std::string> problem_ids();
Problem make_problem(const std::string& id, const ProblemOptions& options = {});

/// Post-hoc risk measures at a design on a fresh batch.
struct Certificates {
  double threshold = 0.0;
  double alpha = 0.0;
  double pof = 0.0;
  double pof_std_error = 0.0;
  double quantile = 0.0;
  double superquantile = 0.0;
  double bpof = 0.0;
  /// Deterministic objective, or the mean of f on the certificate batch.
  double expected_objective = 0.0;
  std::size_t m_eval = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

Certificates certify(const StochasticModel& model, std::span<const double> design, double threshold, double alpha,
                     std::size_t m_eval, std::uint64_t seed);

struct OptimizationRun {
  FormulationSpec spec;
  std::string problem_id;
  /// "dfo" or "convex".
  std::string solver;
  /// Trace in natural design coordinates (auxiliary variables dropped).
  SolveTrace trace;
  std::vector<double> design;
  /// Value of the formulation's own objective at the design.
  double objective = 0.0;
  Certificates certificates;
};

/// Stream ids: optimization batches and the certificate batch never share one.
inline constexpr std::uint64_t kOptimizationStream = 0x6f7074;
inline constexpr std::uint64_t kPofOracleStream = 0x706f66;
inline constexpr std::uint64_t kCertificateStream = 0x636572;

OptimizationRun run(const FormulationSpec& spec, const Problem& problem);

}  // namespace riskopt::harness

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "riskopt/harness/run.hpp"
#include "riskopt/harness/studies.hpp"

namespace riskopt::harness {

/// Everything needed to repeat a single run.
struct RunConfig {
  std::string problem_id = "short_column";
  ProblemOptions options;
  FormulationSpec spec;
};

/// INI text with [problem], [formulation], [solver] and [sampling] sections.
/// Unset optional fields are omitted; unknown keys are rejected.
void write_config(std::ostream& out, const RunConfig& config);
RunConfig read_config(std::istream& in);
RunConfig read_config_file(const std::filesystem::path& path);

/// Columns: eval, d1..dn, objective, max_violation.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);
/// Fixed keys: problem, formulation, solver, termination, eval_count, design,
/// objective, max_violation, certificates{...}.
void write_certificates_json(std::ostream& out, const OptimizationRun& run);
/// One row per cell: formulation, alpha, pof_target, samples, seed, solver,
/// status, d1..dn, objective, expected_objective, pof, bpof, quantile,
/// superquantile, m_eval, error.
void write_frontier_csv(std::ostream& out, const std::vector<FrontierCell>& cells);
/// variant, lower_sigmas, upper_sigmas, quantile, superquantile, percent_difference.
void write_conservativeness_csv(std::ostream& out, const std::vector<ConservativenessRow>& rows, double alpha);
/// variant, bin_lower, bin_upper, count.
void write_histograms_csv(std::ostream& out, const std::vector<ConservativenessRow>& rows);
/// t, analytic_pof, analytic_bpof, sampled_pof, sampled_bpof.
void write_remark4_csv(std::ostream& out, const std::vector<Remark4Row>& rows);

/// Creates <root>/<UTC timestamp>-<label>, adding a numeric suffix on collision.
std::filesystem::path make_run_directory(const std::filesystem::path& root, const std::string& label);

/// Writes config.ini, trace.csv and certificates.json into `dir`.
void persist_run(const std::filesystem::path& dir, const RunConfig& config, const OptimizationRun& run);

}  // namespace riskopt::harness

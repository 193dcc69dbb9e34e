// riskopt: risk estimates, single optimization runs, frontiers and the two
// small studies. Every subcommand writes into a fresh runs/<timestamp>-<label>/.
//
//   riskopt estimate --problem cooling_fin --design 5.5,5.5,5.5,5.5 --alpha 0.95
//   riskopt optimize --problem short_column --formulation bpof_constrained --alpha 0.95
//   riskopt optimize --config runs/<dir>/config.ini
//   riskopt frontier --formulation rbdo_pof --formulation bpof_constrained --alpha 0.9,0.95,0.99
//   riskopt conservativeness --samples 100000
//   riskopt remark4 --samples 1000000 --step 0.01

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskopt/harness/io.hpp"
#include "riskopt/harness/run.hpp"
#include "riskopt/harness/studies.hpp"

using namespace riskopt;
using namespace riskopt::harness;

namespace {

struct Common {
  std::string problem = "short_column";
  std::size_t mesh_resolution = 2;
  unsigned threads = 0;
  std::string out = "runs";
};

void add_problem_flags(CLI::App* sub, Common& c) {
  sub->add_option("--problem", c.problem, "short_column | cooling_fin")->capture_default_str();
  sub->add_option("--mesh-resolution", c.mesh_resolution, "Cooling fin mesh refinement")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: hardware default)");
}

ProblemOptions problem_options(const Common& c) {
  ProblemOptions o;
  o.mesh_resolution = c.mesh_resolution;
  o.threads = c.threads;
  return o;
}

std::filesystem::path open_run_dir(const Common& c, const std::string& label) {
  const auto dir = make_run_directory(c.out, label);
  std::printf("output: %s\n", dir.c_str());
  return dir;
}

std::ofstream open_file(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.precision(17);
  return f;
}

void print_certificates(const Certificates& c) {
  std::printf("  threshold      %.6g\n  alpha          %.6g\n  pof            %.6g  (se %.2g)\n"
              "  quantile       %.6g\n  superquantile  %.6g\n  bpof           %.6g\n  objective      %.6g\n"
              "  m_eval         %zu\n",
              c.threshold, c.alpha, c.pof, c.pof_std_error, c.quantile, c.superquantile, c.bpof,
              c.expected_objective, c.m_eval);
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::vector<double> design;
  double alpha = 0.95;
  std::optional<double> threshold;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

int cmd_estimate(const EstimateArgs& a) {
  const auto problem = make_problem(a.common.problem, problem_options(a.common));
  const auto design = a.design.empty() ? problem.initial_design : a.design;
  const double t = a.threshold.value_or(problem.model->threshold());
  const auto c = certify(*problem.model, design, t, a.alpha, a.samples, a.seed);
  print_certificates(c);

  const auto dir = open_run_dir(a.common, "estimate");
  nlohmann::ordered_json j;
  j["problem"] = problem.id;
  j["design"] = design;
  j["threshold"] = c.threshold;
  j["alpha"] = c.alpha;
  j["pof"] = c.pof;
  j["pof_std_error"] = c.pof_std_error;
  j["quantile"] = c.quantile;
  j["superquantile"] = c.superquantile;
  j["bpof"] = c.bpof;
  j["expected_objective"] = c.expected_objective;
  j["m"] = c.m_eval;
  j["seed"] = c.seed;
  j["stream"] = c.stream;
  open_file(dir / "estimate.json") << j.dump(2) << "\n";
  return 0;
}

// --- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  Common common;
  std::string config;
  std::string formulation = "sq_constrained";
  std::string solver = "auto";
  double alpha = 0.95;
  double beta = 0.95;
  std::optional<double> threshold;
  std::optional<double> budget;
  std::size_t samples = 10000;
  std::size_t eval_samples = 500000;
  std::uint64_t seed = 1;
  std::vector<double> initial;
};

int cmd_optimize(const OptimizeArgs& a, const CLI::App& sub) {
  RunConfig cfg;
  if (!a.config.empty()) cfg = read_config_file(a.config);
  // Flags given explicitly override the config file.
  auto given = [&](const char* flag) { return a.config.empty() || sub.count(flag) > 0; };
  if (given("--problem")) cfg.problem_id = a.common.problem;
  if (given("--mesh-resolution")) cfg.options.mesh_resolution = a.common.mesh_resolution;
  if (given("--threads")) cfg.options.threads = a.common.threads;
  auto& s = cfg.spec;
  if (given("--formulation")) s.id = parse_formulation(a.formulation);
  if (given("--solver")) s.solver = parse_solver(a.solver);
  if (given("--alpha")) s.alpha = a.alpha;
  if (given("--beta")) s.beta = a.beta;
  if (given("--threshold")) s.threshold = a.threshold;
  if (given("--budget")) s.budget = a.budget;
  if (given("--samples")) s.samples = a.samples;
  if (given("--eval-samples")) s.eval_samples = a.eval_samples;
  if (given("--seed")) s.seed = a.seed;
  if (given("--initial") && !a.initial.empty()) s.initial_design = a.initial;
  s.validate();

  const auto problem = make_problem(cfg.problem_id, cfg.options);
  const auto result = run(s, problem);
  std::printf("%s on %s via %s: %s after %zu evaluations\n", to_string(s.id).c_str(), problem.id.c_str(),
              result.solver.c_str(), to_string(result.trace.termination_reason).c_str(), result.trace.eval_count);
  std::printf("  design        ");
  for (double v : result.design) std::printf(" %.6g", v);
  std::printf("\n  objective      %.6g\n", result.objective);
  print_certificates(result.certificates);

  const auto dir = open_run_dir(a.common, to_string(s.id));
  persist_run(dir, cfg, result);
  return 0;
}

// --- frontier ---------------------------------------------------------------

struct FrontierArgs {
  Common common;
  std::vector<std::string> formulations{"rbdo_pof", "bpof_constrained"};
  std::vector<double> alphas{0.9, 0.95, 0.98, 0.99};
  std::vector<std::size_t> samples;
  std::vector<std::uint64_t> seeds;
  std::optional<double> threshold;
  std::optional<double> budget;
  std::size_t eval_samples = 500000;
  unsigned workers = 0;
};

int cmd_frontier(const FrontierArgs& a) {
  FrontierRequest req;
  req.problem_id = a.common.problem;
  req.options = problem_options(a.common);
  for (const auto& f : a.formulations) req.formulations.push_back(parse_formulation(f));
  req.alphas = a.alphas;
  req.sample_sizes = a.samples;
  req.seeds = a.seeds;
  req.base.threshold = a.threshold;
  req.base.budget = a.budget;
  req.base.eval_samples = a.eval_samples;
  req.workers = a.workers;
  const auto cells = frontier(req);

  std::size_t failed = 0;
  for (const auto& c : cells) {
    if (!c.run) {
      ++failed;
      std::printf("  %-17s 1-alpha=%-7.4g m=%-7zu seed=%-4llu FAILED: %s\n", to_string(c.formulation).c_str(),
                  1 - c.alpha, c.samples, static_cast<unsigned long long>(c.seed), c.error.c_str());
      continue;
    }
    const auto& cert = c.run->certificates;
    std::printf("  %-17s 1-alpha=%-7.4g m=%-7zu seed=%-4llu objective=%-10.6g pof=%-10.4g bpof=%.4g\n",
                to_string(c.formulation).c_str(), 1 - c.alpha, c.samples, static_cast<unsigned long long>(c.seed),
                cert.expected_objective, cert.pof, cert.bpof);
  }

  const auto dir = open_run_dir(a.common, "frontier");
  RunConfig cfg;
  cfg.problem_id = req.problem_id;
  cfg.options = req.options;
  cfg.spec = req.base;
  auto cfg_out = open_file(dir / "config.ini");
  write_config(cfg_out, cfg);
  auto csv = open_file(dir / "frontier.csv");
  write_frontier_csv(csv, cells);
  return failed == cells.size() ? 1 : 0;
}

// --- conservativeness ---------------------------------------------------------

struct ConservativenessArgs {
  Common common;
  std::vector<double> design{3.3271, 3.2015, 1.0053, 1.0};
  double alpha = 0.95;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t bins = 50;
};

int cmd_conservativeness(const ConservativenessArgs& a) {
  ConservativenessRequest req;
  req.design = a.design;
  req.alpha = a.alpha;
  req.samples = a.samples;
  req.seed = a.seed;
  req.bins = a.bins;
  req.options = problem_options(a.common);
  const auto rows = conservativeness_study(req);
  for (const auto& r : rows)
    std::printf("  %-24s Q=%.6g  Qbar=%.6g  diff=%.4g%%\n", r.variant.label.c_str(), r.quantile, r.superquantile,
                r.percent_difference);

  const auto dir = open_run_dir(a.common, "conservativeness");
  auto table = open_file(dir / "conservativeness.csv");
  write_conservativeness_csv(table, rows, a.alpha);
  auto hist = open_file(dir / "histograms.csv");
  write_histograms_csv(hist, rows);
  return 0;
}

// --- remark4 ------------------------------------------------------------------

struct Remark4Args {
  Common common;
  double lo = -1.5;
  double hi = 1.5;
  double step = 0.01;
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
};

int cmd_remark4(const Remark4Args& a) {
  const auto grid = linear_grid(a.lo, a.hi, a.step);
  const auto rows = remark4_study(grid, a.samples, a.seed);
  const auto dir = open_run_dir(a.common, "remark4");
  auto csv = open_file(dir / "remark4.csv");
  write_remark4_csv(csv, rows);
  std::printf("  %zu thresholds in [%g, %g]\n", rows.size(), a.lo, a.hi);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-based design optimization with quantiles, superquantiles and buffered failure probability"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "Risk measures of a problem at a fixed design");
  add_problem_flags(s_est, est.common);
  s_est->add_option("--design", est.design, "Design vector (default: the problem's initial design)")->delimiter(',');
  s_est->add_option("--alpha", est.alpha, "Quantile/superquantile level")->capture_default_str();
  s_est->add_option("--threshold", est.threshold, "Failure threshold (default: the problem's)");
  s_est->add_option("--samples", est.samples, "Monte Carlo sample size")->capture_default_str();
  s_est->add_option("--seed", est.seed)->capture_default_str();
  s_est->add_option("--out", est.common.out, "Results root")->capture_default_str();

  OptimizeArgs opt;
  auto* s_opt = app.add_subcommand("optimize", "Single optimization run");
  add_problem_flags(s_opt, opt.common);
  s_opt->add_option("--config", opt.config, "Run config (INI); explicit flags override it")->check(CLI::ExistingFile);
  s_opt->add_option("--formulation", opt.formulation,
                    "rbdo_pof | quantile_equiv | sq_constrained | sq_objective | bpof_constrained | bpof_objective | "
                    "pof_objective")
      ->capture_default_str();
  s_opt->add_option("--solver", opt.solver, "auto | dfo | convex")->capture_default_str();
  s_opt->add_option("--alpha", opt.alpha, "Reliability level; PoF target is 1 - alpha")->capture_default_str();
  s_opt->add_option("--beta", opt.beta, "Objective superquantile level (sq_objective)")->capture_default_str();
  s_opt->add_option("--threshold", opt.threshold, "Failure threshold (default: the problem's)");
  s_opt->add_option("--budget", opt.budget, "Objective budget (objective-type formulations)");
  s_opt->add_option("--samples", opt.samples, "Optimization sample size")->capture_default_str();
  s_opt->add_option("--eval-samples", opt.eval_samples, "Certificate sample size")->capture_default_str();
  s_opt->add_option("--seed", opt.seed)->capture_default_str();
  s_opt->add_option("--initial", opt.initial, "Starting design")->delimiter(',');
  s_opt->add_option("--out", opt.common.out, "Results root")->capture_default_str();

  FrontierArgs fr;
  auto* s_fr = app.add_subcommand("frontier", "Optimal designs over a grid of reliability levels");
  add_problem_flags(s_fr, fr.common);
  s_fr->add_option("--formulation", fr.formulations, "Formulations (repeat or comma-separate)")->delimiter(',');
  s_fr->add_option("--alpha", fr.alphas, "Reliability levels")->delimiter(',');
  s_fr->add_option("--samples", fr.samples, "Optimization sample sizes (default 10000)")->delimiter(',');
  s_fr->add_option("--seed", fr.seeds, "Optimization seeds (default 1)")->delimiter(',');
  s_fr->add_option("--threshold", fr.threshold, "Failure threshold (default: the problem's)");
  s_fr->add_option("--budget", fr.budget, "Objective budget (objective-type formulations)");
  s_fr->add_option("--eval-samples", fr.eval_samples, "Certificate sample size")->capture_default_str();
  s_fr->add_option("--workers", fr.workers, "Cells solved concurrently (0: hardware default)");
  s_fr->add_option("--out", fr.common.out, "Results root")->capture_default_str();

  ConservativenessArgs cons;
  cons.common.problem = "cooling_fin";
  auto* s_cons = app.add_subcommand("conservativeness", "Cooling fin Q vs Qbar under three perturbation truncations");
  s_cons->add_option("--mesh-resolution", cons.common.mesh_resolution)->capture_default_str();
  s_cons->add_option("--threads", cons.common.threads, "Worker threads (0: hardware default)");
  s_cons->add_option("--design", cons.design, "Fixed fin design")->delimiter(',')->capture_default_str();
  s_cons->add_option("--alpha", cons.alpha)->capture_default_str();
  s_cons->add_option("--samples", cons.samples)->capture_default_str();
  s_cons->add_option("--seed", cons.seed)->capture_default_str();
  s_cons->add_option("--bins", cons.bins, "Histogram bins")->capture_default_str();
  s_cons->add_option("--out", cons.common.out, "Results root")->capture_default_str();

  Remark4Args r4;
  auto* s_r4 = app.add_subcommand("remark4", "PoF and bPoF of the three-point law over a threshold grid");
  s_r4->add_option("--lo", r4.lo)->capture_default_str();
  s_r4->add_option("--hi", r4.hi)->capture_default_str();
  s_r4->add_option("--step", r4.step)->capture_default_str();
  s_r4->add_option("--samples", r4.samples)->capture_default_str();
  s_r4->add_option("--seed", r4.seed)->capture_default_str();
  s_r4->add_option("--out", r4.common.out, "Results root")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s_est) return cmd_estimate(est);
    if (*s_opt) return cmd_optimize(opt, *s_opt);
    if (*s_fr) return cmd_frontier(fr);
    if (*s_cons) return cmd_conservativeness(cons);
    if (*s_r4) return cmd_remark4(r4);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

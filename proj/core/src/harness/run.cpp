#include "riskopt/harness/run.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "riskopt/parallel.hpp"
#include "riskopt/problems/short_column.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/saa.hpp"
#include "riskopt/solvers/convex.hpp"
#include "riskopt/solvers/dfo.hpp"
#include "riskopt/solvers/pof_oracle.hpp"

namespace riskopt::harness {

namespace {

struct FormulationName {
  FormulationId id;
  const char* name;
};

constexpr std::array<FormulationName, 7> kFormulations{{
    {FormulationId::RbdoPof, "rbdo_pof"},
    {FormulationId::QuantileEquiv, "quantile_equiv"},
    {FormulationId::SqConstrained, "sq_constrained"},
    {FormulationId::SqObjective, "sq_objective"},
    {FormulationId::BpofConstrained, "bpof_constrained"},
    {FormulationId::BpofObjective, "bpof_objective"},
    {FormulationId::PofObjective, "pof_objective"},
}};

std::vector<double> identity_map(std::span<const double> x) { return {x.begin(), x.end()}; }

double threshold_scale(double t) { return t != 0.0 ? std::abs(t) : 1.0; }

/// (floor(m (1 - alpha)) + 1)-th largest value: at most floor(m (1 - alpha))
/// samples exceed t exactly when this order statistic is <= t, so the level
/// set matches PoF <= 1 - alpha on the same sample while varying
/// continuously with the design.
double pof_level_statistic(std::vector<double> g, double alpha) {
  const auto m = static_cast<double>(g.size());
  auto j = static_cast<std::size_t>(std::floor(m * (1.0 - alpha) * (1.0 + 1e-12)));
  j = std::min(j, g.size() - 1);
  std::nth_element(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(j), g.end(), std::greater<>());
  return g[j];
}

/// Deterministic objective if the model has one, else the batch mean of f.
std::function<double(std::span<const double>)> expectation(std::shared_ptr<const StochasticModel> model,
                                                            std::shared_ptr<const RandomBatch> batch) {
  if (model->deterministic_objective(model->design_bounds().center()))
    return [model](std::span<const double> d) { return model->deterministic_objective(d).value(); };
  return [model, batch](std::span<const double> d) {
    std::vector<double> f(batch->rows());
    model->objectives(d, *batch, f, {});
    return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  };
}

}  // namespace

std::string to_string(FormulationId id) {
  for (const auto& f : kFormulations)
    if (f.id == id) return f.name;
  throw std::invalid_argument("unknown formulation id");
}

FormulationId parse_formulation(const std::string& name) {
  for (const auto& f : kFormulations)
    if (name == f.name) return f.id;
  throw std::invalid_argument("unknown formulation '" + name + "'");
}

std::vector<FormulationId> all_formulations() {
  std::vector<FormulationId> out;
  for (const auto& f : kFormulations) out.push_back(f.id);
  return out;
}

bool is_hinge_form(FormulationId id) {
  return id == FormulationId::SqConstrained || id == FormulationId::SqObjective ||
         id == FormulationId::BpofConstrained;
}

std::string to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::Auto: return "auto";
    case SolverChoice::Dfo: return "dfo";
    case SolverChoice::Convex: return "convex";
  }
  return "auto";
}

SolverChoice parse_solver(const std::string& name) {
  if (name == "auto") return SolverChoice::Auto;
  if (name == "dfo") return SolverChoice::Dfo;
  if (name == "convex") return SolverChoice::Convex;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

void FormulationSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("formulation: alpha must lie in (0, 1)");
  if (id == FormulationId::SqObjective && !(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("formulation: beta must lie in (0, 1)");
  if (samples < 100) throw std::invalid_argument("formulation: at least 100 samples are required");
  const bool needs_budget = id == FormulationId::SqObjective || id == FormulationId::BpofObjective ||
                            id == FormulationId::PofObjective;
  if (needs_budget && !budget) throw std::invalid_argument("formulation: " + to_string(id) + " needs a budget");
  if (threshold && !std::isfinite(*threshold)) throw std::invalid_argument("formulation: threshold must be finite");
  if (!(pof_target_rel_err > 0.0) || pof_initial == 0 || pof_cap < pof_initial)
    throw std::invalid_argument("formulation: invalid PoF oracle settings");
  if (eval_samples == 0) throw std::invalid_argument("formulation: eval_samples must be positive");
  if (eval_seed && *eval_seed == seed)
    throw std::invalid_argument("formulation: the certificate seed must differ from the optimization seed");
  if (solver_config) solver_config->validate();
}

std::uint64_t FormulationSpec::certificate_seed() const {
  if (eval_seed) return *eval_seed;
  // splitmix64 finalizer; a fixed point at `seed` would need seed == mix(seed).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z == seed ? z + 1 : z;
}

std::vector<std::string> problem_ids() { return {"short_column", "cooling_fin"}; }

Problem make_problem(const std::string& id, const ProblemOptions& options) {
  Problem p;
  p.id = id;
  if (id == "short_column") {
    p.model = std::make_shared<const ShortColumnModel>();
    p.convex_model = std::make_shared<const ShortColumnConvexModel>();
    p.to_convex = [](std::span<const double> d) {
      std::vector<double> x(d.size());
      std::transform(d.begin(), d.end(), x.begin(), [](double v) { return std::log(v); });
      return x;
    };
    p.from_convex = [](std::span<const double> x) {
      std::vector<double> d(x.size());
      std::transform(x.begin(), x.end(), d.begin(), [](double v) { return std::exp(v); });
      return d;
    };
    p.initial_design = p.model->design_bounds().center();
    p.default_solver.max_evals = 1000;
    return p;
  }
  if (id == "cooling_fin") {
    p.model = std::make_shared<const CoolingFinModel>(options.mesh_resolution, options.truncation, options.threads);
    p.initial_design.assign(4, 5.5);
    p.default_solver.max_evals = 250;
    p.default_solver.initial_trust_radius = 0.1;
    p.default_solver.final_trust_radius = 1e-4;
    return p;
  }
  throw std::invalid_argument("unknown problem '" + id + "'");
}

Certificates certify(const StochasticModel& model, std::span<const double> design, double threshold, double alpha,
                     std::size_t m_eval, std::uint64_t seed) {
  const auto batch = sample_batch(model.input_distributions(), model.input_correlation(), m_eval, seed,
                                  kCertificateStream, default_thread_count());
  std::vector<double> g(m_eval);
  model.limit_states(design, batch, g, {});
  const SampleSet s(std::move(g));
  Certificates c;
  c.threshold = threshold;
  c.alpha = alpha;
  const auto pof = estimate_pof(s, threshold);
  c.pof = pof.value;
  c.pof_std_error = pof.std_error.value_or(0.0);
  c.quantile = estimate_quantile(s, alpha).value;
  c.superquantile = estimate_superquantile(s, alpha).value;
  c.bpof = estimate_bpof_alg2(s, threshold).value;
  if (const auto det = model.deterministic_objective(design)) {
    c.expected_objective = *det;
  } else {
    std::vector<double> f(m_eval);
    model.objectives(design, batch, f, {});
    c.expected_objective = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(m_eval);
  }
  c.m_eval = m_eval;
  c.seed = seed;
  c.stream = kCertificateStream;
  return c;
}

OptimizationRun run(const FormulationSpec& spec, const Problem& problem) {
  spec.validate();
  if (!problem.model) throw std::invalid_argument("run: problem has no model");
  const double t = spec.threshold.value_or(problem.model->threshold());
  const SolverConfig cfg = spec.solver_config.value_or(problem.default_solver);

  const bool convex_available = static_cast<bool>(problem.convex_model);
  if (spec.solver == SolverChoice::Convex && !(convex_available && is_hinge_form(spec.id)))
    throw std::invalid_argument("run: the convex solver needs a hinge-form formulation on a convex problem");
  const bool convex = convex_available && is_hinge_form(spec.id) && spec.solver != SolverChoice::Dfo;

  const auto model = convex ? problem.convex_model : problem.model;
  const auto to_model = convex ? problem.to_convex : identity_map;
  const auto from_model = convex ? problem.from_convex : identity_map;
  const std::vector<double> start = spec.initial_design.value_or(problem.initial_design);
  if (start.size() != model->design_dim()) throw std::invalid_argument("run: initial design has the wrong size");
  const auto x0 = to_model(start);
  const std::size_t n = model->design_dim();

  auto batch = std::make_shared<const RandomBatch>(sample_batch(
      model->input_distributions(), model->input_correlation(), spec.samples, spec.seed, kOptimizationStream,
      default_thread_count()));

  SolveTrace trace;
  switch (spec.id) {
    case FormulationId::RbdoPof: {
      auto stream = std::make_shared<const SampleStream>(model->input_distributions(), model->input_correlation(),
                                                         spec.seed, kPofOracleStream);
      ConstrainedProblem cp;
      cp.bounds = model->design_bounds();
      cp.objective = expectation(model, batch);
      cp.constraints.push_back([model, stream, t, alpha = spec.alpha, target = spec.pof_target_rel_err,
                                cap = spec.pof_cap, initial = spec.pof_initial](std::span<const double> d) {
        auto r = adaptive_pof_oracle(*model, d, t, target, cap, *stream, initial, true);
        return (pof_level_statistic(std::move(r.values), alpha) - t) / threshold_scale(t);
      });
      trace = solve_dfo(cp, cfg, x0);
      break;
    }
    case FormulationId::QuantileEquiv: {
      ConstrainedProblem cp;
      cp.bounds = model->design_bounds();
      cp.objective = expectation(model, batch);
      cp.constraints.push_back([model, batch, t, alpha = spec.alpha](std::span<const double> d) {
        std::vector<double> g(batch->rows());
        model->limit_states(d, *batch, g, {});
        return (estimate_quantile(SampleSet(std::move(g)), alpha).value - t) / threshold_scale(t);
      });
      trace = solve_dfo(cp, cfg, x0);
      break;
    }
    case FormulationId::PofObjective: {
      ConstrainedProblem cp;
      cp.bounds = model->design_bounds();
      cp.objective = [model, batch, t](std::span<const double> d) {
        std::vector<double> g(batch->rows());
        model->limit_states(d, *batch, g, {});
        return estimate_pof(SampleSet(std::move(g)), t).value;
      };
      auto cost = expectation(model, batch);
      cp.constraints.push_back([cost, budget = *spec.budget](std::span<const double> d) { return cost(d) - budget; });
      trace = solve_dfo(cp, cfg, x0);
      break;
    }
    case FormulationId::SqConstrained:
    case FormulationId::BpofConstrained:
    case FormulationId::SqObjective:
    case FormulationId::BpofObjective: {
      SaaProblem p;
      if (spec.id == FormulationId::SqConstrained) p = build_superquantile_constrained(model, batch, spec.alpha, t);
      if (spec.id == FormulationId::BpofConstrained) p = build_bpof_constrained(model, batch, spec.alpha, t);
      if (spec.id == FormulationId::SqObjective)
        p = build_superquantile_objective(model, batch, spec.alpha, spec.beta, *spec.budget);
      if (spec.id == FormulationId::BpofObjective) p = build_bpof_objective(model, batch, t, *spec.budget);
      trace = convex ? solve_convex_saa(p, cfg, x0) : solve_dfo(p, cfg, x0);
      break;
    }
  }

  OptimizationRun out;
  // The stored spec is fully resolved so a persisted config repeats the run.
  out.spec = spec;
  out.spec.threshold = t;
  out.spec.solver_config = cfg;
  out.spec.initial_design = start;
  out.spec.eval_seed = spec.certificate_seed();
  out.problem_id = problem.id;
  out.solver = convex ? "convex" : "dfo";
  out.design = from_model(std::span<const double>(trace.x).first(n));
  out.objective = trace.objective;
  for (auto& it : trace.iterates) it.x = from_model(std::span<const double>(it.x).first(n));
  trace.x = out.design;
  out.trace = std::move(trace);
  out.certificates =
      certify(*problem.model, out.design, t, spec.alpha, spec.eval_samples, spec.certificate_seed());
  return out;
}

}  // namespace riskopt::harness

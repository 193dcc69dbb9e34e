#include "riskopt/saa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <mutex>
#include <string>
#include <utility>

#include "riskopt/risk.hpp"
#include "riskopt/solvers/dfo.hpp"

namespace riskopt {

double smooth_hinge(double u, double tau) {
  if (tau <= 0.0) return std::max(0.0, u);
  if (u <= -tau) return 0.0;
  if (u >= tau) return u;
  return (u + tau) * (u + tau) / (4.0 * tau);
}

double smooth_hinge_derivative(double u, double tau) {
  if (tau <= 0.0) return u > 0.0 ? 1.0 : 0.0;
  if (u <= -tau) return 0.0;
  if (u >= tau) return 1.0;
  return (u + tau) / (2.0 * tau);
}

double lambda_margin(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

namespace {

using ModelPtr = std::shared_ptr<const StochasticModel>;
using BatchPtr = std::shared_ptr<const RandomBatch>;

void check_inputs(const ModelPtr& model, const BatchPtr& batch) {
  if (!model) throw std::invalid_argument("saa: model is required");
  if (!batch || batch->rows() == 0) throw std::invalid_argument("saa: empty batch");
  if (batch->cols() != model->random_dim())
    throw std::invalid_argument("saa: batch width does not match the model's random inputs");
}

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("saa: alpha must lie in (0, 1)");
}

std::vector<double> limit_values(const StochasticModel& model, const RandomBatch& batch,
                                 std::span<const double> design, std::vector<double>* grad) {
  std::vector<double> g(batch.rows());
  if (grad) grad->assign(batch.rows() * design.size(), 0.0);
  model.limit_states(design, batch, g, grad ? std::span<double>(*grad) : std::span<double>());
  return g;
}

std::vector<double> objective_values(const StochasticModel& model, const RandomBatch& batch,
                                     std::span<const double> design, std::vector<double>* grad) {
  std::vector<double> f(batch.rows());
  if (grad) grad->assign(batch.rows() * design.size(), 0.0);
  model.objectives(design, batch, f, grad ? std::span<double>(*grad) : std::span<double>());
  return f;
}

/// Limit-state values for the most recent gradient-free design. Profiling the
/// aux variables and evaluating the constraint both sweep the batch at the
/// same design, which is the dominant cost for PDE-backed models.
class LimitCache {
 public:
  LimitCache(ModelPtr model, BatchPtr batch) : model_(std::move(model)), batch_(std::move(batch)) {}

  std::vector<double> values(std::span<const double> design, std::vector<double>* grad) const {
    if (grad) return limit_values(*model_, *batch_, design, grad);
    std::lock_guard lock(mu_);
    if (design_.size() != design.size() || !std::equal(design.begin(), design.end(), design_.begin())) {
      g_ = limit_values(*model_, *batch_, design, nullptr);
      design_.assign(design.begin(), design.end());
    }
    return g_;
  }

 private:
  ModelPtr model_;
  BatchPtr batch_;
  mutable std::mutex mu_;
  mutable std::vector<double> design_;
  mutable std::vector<double> g_;
};

using LimitsPtr = std::shared_ptr<const LimitCache>;

bool has_deterministic_objective(const StochasticModel& model) {
  return model.deterministic_objective(model.design_bounds().center()).has_value();
}

/// anchor + scale * sum s_tau(v_i - anchor), with gradient w.r.t. the design
/// (through dv/dd) and the anchor.
double hinge_form(std::span<const double> v, std::span<const double> dv, std::size_t n, double anchor, double scale,
                  double tau, std::span<double> grad_design, double* grad_anchor) {
  double sum = 0.0;
  double dsum = 0.0;
  if (!grad_design.empty()) std::fill(grad_design.begin(), grad_design.end(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = v[i] - anchor;
    sum += smooth_hinge(u, tau);
    if (grad_design.empty() && !grad_anchor) continue;
    const double s = smooth_hinge_derivative(u, tau);
    if (s == 0.0) continue;
    dsum += s;
    if (!grad_design.empty())
      for (std::size_t j = 0; j < n; ++j) grad_design[j] += scale * s * dv[i * n + j];
  }
  if (grad_anchor) *grad_anchor = 1.0 - scale * dsum;
  return anchor + scale * sum;
}

/// Objective contract shared by the expectation-objective forms: the
/// deterministic objective when the model has one, else the sample mean of f.
SaaFunction expected_objective(const ModelPtr& model, const BatchPtr& batch, std::size_t n) {
  if (has_deterministic_objective(*model)) {
    return [model, n](std::span<const double> x, double, std::span<double> grad) {
      const auto d = x.first(n);
      const double value = model->deterministic_objective(d).value();
      if (!grad.empty()) {
        std::fill(grad.begin(), grad.end(), 0.0);
        model->deterministic_objective_gradient(d, grad.first(n));
      }
      return value;
    };
  }
  return [model, batch, n](std::span<const double> x, double, std::span<double> grad) {
    const auto d = x.first(n);
    std::vector<double> df;
    const auto f = objective_values(*model, *batch, d, grad.empty() ? nullptr : &df);
    const double m = static_cast<double>(f.size());
    if (!grad.empty()) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) grad[j] += df[i * n + j] / m;
    }
    return std::accumulate(f.begin(), f.end(), 0.0) / m;
  };
}

/// gamma + sum s(g_i - gamma) / (m (1 - alpha)) - t over (d, gamma), gamma at index n.
SaaFunction superquantile_constraint(const LimitsPtr& limits, std::size_t rows, std::size_t n, double alpha,
                                     double t) {
  const double scale = 1.0 / (static_cast<double>(rows) * (1.0 - alpha));
  return [limits, n, scale, t](std::span<const double> x, double tau, std::span<double> grad) {
    const auto d = x.first(n);
    std::vector<double> dg;
    const auto g = limits->values(d, grad.empty() ? nullptr : &dg);
    double d_anchor = 0.0;
    const double value = hinge_form(g, dg, n, x[n], scale, tau, grad.empty() ? grad : grad.first(n),
                                    grad.empty() ? nullptr : &d_anchor);
    if (!grad.empty()) grad[n] = d_anchor;
    return value - t;
  };
}

double smoothing_scale_for(double t) { return t != 0.0 ? std::abs(t) : 1.0; }

Box aux_box(double lo, double hi) { return Box({lo}, {hi}); }

}  // namespace

double SaaProblem::objective_value(std::span<const double> x) const { return objective(x, 0.0, {}); }

double SaaProblem::constraint_value(std::size_t j, std::span<const double> x) const {
  return constraints.at(j)(x, 0.0, {});
}

double SaaProblem::max_violation(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& c : constraints) v = std::max(v, c(x, 0.0, {}));
  return v;
}

std::vector<double> SaaProblem::full_point(std::span<const double> design) const {
  if (!profile_aux) throw std::logic_error("SaaProblem: no aux profile available");
  std::vector<double> x(design.begin(), design.end());
  const auto aux = profile_aux(design);
  x.insert(x.end(), aux.begin(), aux.end());
  return x;
}

ConstrainedProblem SaaProblem::exact() const {
  ConstrainedProblem cp;
  cp.bounds = bounds;
  auto self = std::make_shared<SaaProblem>(*this);
  cp.objective = [self](std::span<const double> x) { return self->objective(x, 0.0, {}); };
  for (std::size_t j = 0; j < constraints.size(); ++j)
    cp.constraints.push_back([self, j](std::span<const double> x) { return self->constraints[j](x, 0.0, {}); });
  return cp;
}

ConstrainedProblem SaaProblem::reduced() const {
  if (!profile_aux) throw std::logic_error("SaaProblem: no aux profile available");
  ConstrainedProblem cp;
  cp.bounds = Box(std::vector<double>(bounds.lower.begin(), bounds.lower.begin() + design_dim),
                  std::vector<double>(bounds.upper.begin(), bounds.upper.begin() + design_dim));
  auto self = std::make_shared<SaaProblem>(*this);
  // The objective and every constraint are evaluated at the same point, so the
  // profiled aux is cached for the most recent design.
  struct Cache {
    std::vector<double> design;
    std::vector<double> full;
  };
  auto cache = std::make_shared<Cache>();
  auto point = [self, cache](std::span<const double> d) -> const std::vector<double>& {
    if (cache->design.size() != d.size() || !std::equal(d.begin(), d.end(), cache->design.begin())) {
      cache->design.assign(d.begin(), d.end());
      cache->full = self->full_point(d);
    }
    return cache->full;
  };
  cp.objective = [self, point](std::span<const double> d) { return self->objective(point(d), 0.0, {}); };
  for (std::size_t j = 0; j < constraints.size(); ++j)
    cp.constraints.push_back(
        [self, point, j](std::span<const double> d) { return self->constraints[j](point(d), 0.0, {}); });
  return cp;
}

SaaProblem build_superquantile_constrained(ModelPtr model, BatchPtr batch, double alpha, double t) {
  check_inputs(model, batch);
  check_level(alpha);
  const std::size_t n = model->design_dim();
  SaaProblem p;
  p.form = SaaForm::SuperquantileConstrained;
  p.design_dim = n;
  p.aux_dim = 1;
  p.objective = expected_objective(model, batch, n);
  auto limits = std::make_shared<const LimitCache>(model, batch);
  p.constraints.push_back(superquantile_constraint(limits, batch->rows(), n, alpha, t));
  p.bounds = model->design_bounds().append(aux_box(-kInf, kInf));
  p.convexity = model->convex_in_design() ? Convexity::DeclaredConvex : Convexity::Unknown;
  p.profile_aux = [limits, alpha](std::span<const double> d) {
    const SampleSet s(limits->values(d, nullptr));
    return std::vector<double>{estimate_superquantile_minform(s, alpha).aux.value()};
  };
  p.model = model;
  p.batch = batch;
  p.alpha = alpha;
  p.threshold = t;
  p.smoothing_scale = smoothing_scale_for(t);
  return p;
}

SaaProblem build_bpof_constrained(ModelPtr model, BatchPtr batch, double alpha, double t) {
  SaaProblem p = build_superquantile_constrained(model, batch, alpha, t);
  p.form = SaaForm::BPoFConstrained;
  const double lambda_max = t - lambda_margin(t);
  p.bounds.upper.back() = lambda_max;
  auto limits = std::make_shared<const LimitCache>(model, batch);
  p.constraints.front() = superquantile_constraint(limits, batch->rows(), model->design_dim(), alpha, t);
  p.profile_aux = [limits, alpha, lambda_max](std::span<const double> d) {
    const SampleSet s(limits->values(d, nullptr));
    return std::vector<double>{std::min(estimate_superquantile_minform(s, alpha).aux.value(), lambda_max)};
  };
  return p;
}

SaaProblem build_bpof_objective(ModelPtr model, BatchPtr batch, double t, double budget) {
  check_inputs(model, batch);
  const std::size_t n = model->design_dim();
  const double eps = lambda_margin(t);
  const double m = static_cast<double>(batch->rows());
  SaaProblem p;
  p.form = SaaForm::BPoFObjective;
  p.design_dim = n;
  p.aux_dim = 1;
  auto limits = std::make_shared<const LimitCache>(model, batch);
  p.objective = [limits, n, t, m](std::span<const double> x, double tau, std::span<double> grad) {
    const auto d = x.first(n);
    const double lambda = x[n];
    std::vector<double> dg;
    const auto g = limits->values(d, grad.empty() ? nullptr : &dg);
    // bPoF is 0 once t reaches the sample maximum, below the ratio's infimum.
    if (*std::max_element(g.begin(), g.end()) <= t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return 0.0;
    }
    const double gap = t - lambda;
    const double scale = 1.0 / (m * gap);
    double d_anchor = 0.0;
    // hinge_form returns lambda + sum/(m gap); strip the anchor term.
    const double ratio = hinge_form(g, dg, n, lambda, scale, tau, grad.empty() ? grad : grad.first(n),
                                    grad.empty() ? nullptr : &d_anchor) -
                         lambda;
    if (!grad.empty()) {
      // d/dlambda of S(lambda)/(m gap) = (-sum s')/(m gap) + S/(m gap^2).
      grad[n] = (d_anchor - 1.0) + ratio / gap;
      if (ratio <= 0.0 || ratio >= 1.0) std::fill(grad.begin(), grad.end(), 0.0);
    }
    return std::clamp(ratio, 0.0, 1.0);
  };
  SaaFunction cost = expected_objective(model, batch, n);
  p.constraints.push_back([cost, budget](std::span<const double> x, double tau, std::span<double> grad) {
    return cost(x, tau, grad) - budget;
  });
  p.bounds = model->design_bounds().append(aux_box(-kInf, t - eps));
  p.convexity = Convexity::Unknown;
  p.profile_aux = [limits, t, eps](std::span<const double> d) {
    const SampleSet s(limits->values(d, nullptr));
    const auto est = estimate_bpof_minform(s, t);
    if (est.aux) return std::vector<double>{*est.aux};
    if (est.value == 0.0) return std::vector<double>{t - eps};
    // Mean at or above t: every lambda gives a ratio of at least one.
    return std::vector<double>{s.sorted_descending().back() - 1.0};
  };
  p.model = model;
  p.batch = batch;
  p.threshold = t;
  p.budget = budget;
  p.smoothing_scale = smoothing_scale_for(t);

  // The budget constraint depends on the design alone; check that some design
  // in the box meets it before handing the problem out.
  ConstrainedProblem budget_only;
  budget_only.bounds = model->design_bounds();
  budget_only.objective = [cost, n](std::span<const double> d) { return cost(d, 0.0, {}); };
  const auto start = budget_only.bounds.center();
  if (budget_only.objective(start) > budget) {
    SolverConfig cfg;
    cfg.max_evals = 400;
    cfg.initial_trust_radius = 0.25;
    cfg.final_trust_radius = 1e-8;
    const auto trace = solve_dfo(budget_only, cfg, start);
    const double floor = trace.objective;
    if (floor > budget + 1e-9 * std::max(1.0, std::abs(budget)))
      throw InfeasibleBudget("build_bpof_objective: budget " + std::to_string(budget) +
                             " is below the smallest objective found on the box (" + std::to_string(floor) + ")");
  }
  return p;
}

SaaProblem build_superquantile_objective(ModelPtr model, BatchPtr batch, double alpha, double beta, double budget) {
  check_inputs(model, batch);
  check_level(alpha);
  const std::size_t n = model->design_dim();
  const double m = static_cast<double>(batch->rows());
  const bool deterministic = has_deterministic_objective(*model);
  SaaProblem p;
  p.form = SaaForm::SuperquantileObjective;
  p.design_dim = n;
  p.aux_dim = deterministic ? 1 : 2;
  const double scale_g = 1.0 / (m * (1.0 - alpha));
  auto limits = std::make_shared<const LimitCache>(model, batch);
  p.objective = [limits, n, scale_g, aux = p.aux_dim](std::span<const double> x, double tau,
                                                      std::span<double> grad) {
    std::vector<double> dg;
    const auto g = limits->values(x.first(n), grad.empty() ? nullptr : &dg);
    double d_anchor = 0.0;
    const double value = hinge_form(g, dg, n, x[n], scale_g, tau, grad.empty() ? grad : grad.first(n),
                                    grad.empty() ? nullptr : &d_anchor);
    if (!grad.empty()) {
      grad[n] = d_anchor;
      if (aux == 2) grad[n + 1] = 0.0;
    }
    return value;
  };
  if (deterministic) {
    SaaFunction cost = expected_objective(model, batch, n);
    p.constraints.push_back([cost, budget](std::span<const double> x, double tau, std::span<double> grad) {
      return cost(x, tau, grad) - budget;
    });
    p.bounds = model->design_bounds().append(aux_box(-kInf, kInf));
  } else {
    check_level(beta);
    const double scale_f = 1.0 / (m * (1.0 - beta));
    p.constraints.push_back([model, batch, n, scale_f, budget](std::span<const double> x, double tau,
                                                               std::span<double> grad) {
      std::vector<double> df;
      const auto f = objective_values(*model, *batch, x.first(n), grad.empty() ? nullptr : &df);
      double d_anchor = 0.0;
      const double value = hinge_form(f, df, n, x[n + 1], scale_f, tau, grad.empty() ? grad : grad.first(n),
                                      grad.empty() ? nullptr : &d_anchor);
      if (!grad.empty()) {
        grad[n] = 0.0;
        grad[n + 1] = d_anchor;
      }
      return value - budget;
    });
    p.bounds = model->design_bounds().append(Box({-kInf, -kInf}, {kInf, kInf}));
  }
  p.convexity = model->convex_in_design() ? Convexity::DeclaredConvex : Convexity::Unknown;
  p.profile_aux = [model, batch, limits, alpha, beta, deterministic](std::span<const double> d) {
    std::vector<double> aux;
    const SampleSet sg(limits->values(d, nullptr));
    aux.push_back(estimate_superquantile_minform(sg, alpha).aux.value());
    if (!deterministic) {
      const SampleSet sf(objective_values(*model, *batch, d, nullptr));
      aux.push_back(estimate_superquantile_minform(sf, beta).aux.value());
    }
    return aux;
  };
  p.model = model;
  p.batch = batch;
  p.alpha = alpha;
  p.budget = budget;
  {
    const auto g = limit_values(*model, *batch, model->design_bounds().center(), nullptr);
    double mean_abs = 0.0;
    for (double v : g) mean_abs += std::abs(v) / m;
    p.smoothing_scale = std::max(mean_abs, 1e-12);
  }
  return p;
}

void LpTableau::validate() const {
  const std::size_t n = vars();
  if (a.size() != rows() * n || lower.size() != n || upper.size() != n)
    throw std::invalid_argument("LpTableau: inconsistent dimensions");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(cost.begin(), cost.end(), finite) || !std::all_of(a.begin(), a.end(), finite) ||
      !std::all_of(b.begin(), b.end(), finite) || !std::isfinite(cost_offset))
    throw std::invalid_argument("LpTableau: entries must be finite");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw std::invalid_argument("LpTableau: invalid variable bounds");
  }
}

AffineSurrogate linearize(const SaaProblem& p, std::span<const double> design) {
  if (!p.model || !p.batch) throw std::invalid_argument("linearize: problem has no model");
  const std::size_t n = p.design_dim;
  AffineSurrogate s;
  const auto g = limit_values(*p.model, *p.batch, design, &s.slope);
  s.intercept.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += s.slope[i * n + j] * design[j];
    s.intercept[i] = g[i] - dot;
  }
  std::vector<double> x(design.begin(), design.end());
  x.resize(p.dim(), 0.0);
  std::vector<double> grad(p.dim());
  const double f = p.objective(x, 0.0, grad);
  s.cost.assign(grad.begin(), grad.begin() + n);
  double dot = 0.0;
  for (std::size_t j = 0; j < n; ++j) dot += s.cost[j] * design[j];
  s.cost_offset = f - dot;
  return s;
}

LpTableau expand_to_lp(const SaaProblem& p, bool model_is_linear) {
  if (!model_is_linear || !p.model || !p.model->affine_in_design())
    throw std::invalid_argument("expand_to_lp: the model is not affine in the design; supply a surrogate");
  auto center = p.model->design_bounds().center();
  return expand_to_lp(p, linearize(p, center));
}

LpTableau expand_to_lp(const SaaProblem& p, const AffineSurrogate& s) {
  if (p.form != SaaForm::SuperquantileConstrained && p.form != SaaForm::BPoFConstrained)
    throw std::invalid_argument("expand_to_lp: only the superquantile/bPoF constrained forms expand to an LP");
  const std::size_t n = p.design_dim;
  const std::size_t m = s.intercept.size();
  if (m == 0 || s.slope.size() != m * n || s.cost.size() != n)
    throw std::invalid_argument("expand_to_lp: surrogate dimensions do not match the problem");
  const std::size_t vars = n + 1 + m;
  const std::size_t gamma = n;
  LpTableau lp;
  lp.cost.assign(vars, 0.0);
  std::copy(s.cost.begin(), s.cost.end(), lp.cost.begin());
  lp.cost_offset = s.cost_offset;
  lp.a.assign((m + 1) * vars, 0.0);
  lp.b.assign(m + 1, 0.0);

  const double scale = 1.0 / (static_cast<double>(m) * (1.0 - p.alpha));
  lp.a[gamma] = 1.0;
  for (std::size_t i = 0; i < m; ++i) lp.a[gamma + 1 + i] = scale;
  lp.b[0] = p.threshold;
  for (std::size_t i = 0; i < m; ++i) {
    double* row = lp.a.data() + (i + 1) * vars;
    for (std::size_t j = 0; j < n; ++j) row[j] = s.slope[i * n + j];
    row[gamma] = -1.0;
    row[gamma + 1 + i] = -1.0;
    lp.b[i + 1] = -s.intercept[i];
  }

  lp.lower.assign(vars, 0.0);
  lp.upper.assign(vars, kInf);
  for (std::size_t j = 0; j <= n; ++j) {
    lp.lower[j] = p.bounds.lower[j];
    lp.upper[j] = p.bounds.upper[j];
  }
  lp.validate();
  return lp;
}

}  // namespace riskopt

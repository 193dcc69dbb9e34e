#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "riskopt/design.hpp"
#include "riskopt/model.hpp"
#include "riskopt/solvers/config.hpp"
#include "riskopt/stochastics.hpp"

namespace riskopt {

/// Hinge [u]^+ replaced by a quadratic splice of half-width tau; tau = 0 gives
/// the exact hinge. [u]^+ <= s(u) <= [u]^+ + tau/4.
double smooth_hinge(double u, double tau);
double smooth_hinge_derivative(double u, double tau);

/// f(x, tau, grad): x = (design, aux); tau = 0 evaluates exactly; grad is
/// empty or has x.size() entries and receives the gradient of the tau-smoothed
/// value.
using SaaFunction = std::function<double(std::span<const double> x, double tau, std::span<double> grad)>;

enum class Convexity { DeclaredConvex, Unknown };

enum class SaaForm { SuperquantileConstrained, BPoFConstrained, BPoFObjective, SuperquantileObjective };

struct SaaProblem {
  SaaForm form = SaaForm::SuperquantileConstrained;
  std::size_t design_dim = 0;
  std::size_t aux_dim = 0;
  SaaFunction objective;
  /// value <= 0 is feasible.
  std::vector<SaaFunction> constraints;
  Box bounds;
  Convexity convexity = Convexity::Unknown;

  /// Optimal aux for a given design (superquantile anchor or buffer threshold),
  /// used to reduce the problem to the design variables alone.
  std::function<std::vector<double>(std::span<const double> design)> profile_aux;

  std::shared_ptr<const StochasticModel> model;
  std::shared_ptr<const RandomBatch> batch;
  double alpha = 0.0;
  double threshold = 0.0;
  double budget = 0.0;
  /// Magnitude of g used to scale hinge smoothing widths.
  double smoothing_scale = 1.0;

  std::size_t dim() const noexcept { return design_dim + aux_dim; }

  double objective_value(std::span<const double> x) const;
  double constraint_value(std::size_t j, std::span<const double> x) const;
  double max_violation(std::span<const double> x) const;

  /// (design, profiled aux).
  std::vector<double> full_point(std::span<const double> design) const;
  /// Exact problem over (design, aux).
  ConstrainedProblem exact() const;
  /// Exact problem over the design alone with aux profiled out. Requires profile_aux.
  ConstrainedProblem reduced() const;
};

/// Thrown when no design in the box meets the objective budget.
class InfeasibleBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min mean f (or deterministic objective) s.t.
/// gamma + sum[g - gamma]^+ / (m (1 - alpha)) - t <= 0, over (d, gamma).
SaaProblem build_superquantile_constrained(std::shared_ptr<const StochasticModel> model,
                                           std::shared_ptr<const RandomBatch> batch, double alpha, double t);

/// Same constraint in lambda form, with lambda <= t - eps_lambda.
SaaProblem build_bpof_constrained(std::shared_ptr<const StochasticModel> model,
                                  std::shared_ptr<const RandomBatch> batch, double alpha, double t);

/// min over (d, lambda) of mean[g - lambda]^+ / (t - lambda), clamped to [0, 1],
/// s.t. mean f (or deterministic objective) <= budget. Throws InfeasibleBudget
/// when the budget is below the minimum achievable objective on the box.
SaaProblem build_bpof_objective(std::shared_ptr<const StochasticModel> model,
                                std::shared_ptr<const RandomBatch> batch, double t, double budget);

/// min superquantile_alpha(g) s.t. superquantile_beta(f) <= budget, over
/// (d, gamma_g, gamma_f). With a deterministic objective the budget acts on it
/// directly and gamma_f is dropped.
SaaProblem build_superquantile_objective(std::shared_ptr<const StochasticModel> model,
                                         std::shared_ptr<const RandomBatch> batch, double alpha, double beta,
                                         double budget);

/// lambda < t realized as lambda <= t - eps.
double lambda_margin(double t);

/// min c.x + c0 s.t. A x <= b, lower <= x <= upper (A dense row-major).
struct LpTableau {
  std::vector<double> cost;
  double cost_offset = 0.0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t vars() const noexcept { return cost.size(); }
  std::size_t rows() const noexcept { return b.size(); }
  double a_at(std::size_t r, std::size_t c) const { return a[r * vars() + c]; }
  void validate() const;
};

/// Per-sample affine model of g around some design: g_i(d) = intercept_i + slope_i . d,
/// and objective cost . d + cost_offset.
struct AffineSurrogate {
  std::vector<double> intercept;
  std::vector<double> slope;
  std::vector<double> cost;
  double cost_offset = 0.0;
};

/// Tangent-plane surrogate of the problem's model at `design`.
AffineSurrogate linearize(const SaaProblem& p, std::span<const double> design);

/// Variables (d, gamma, b_1..b_m). Exact when the model is affine in d;
/// throws std::invalid_argument otherwise.
LpTableau expand_to_lp(const SaaProblem& p, bool model_is_linear);
LpTableau expand_to_lp(const SaaProblem& p, const AffineSurrogate& surrogate);

}  // namespace riskopt

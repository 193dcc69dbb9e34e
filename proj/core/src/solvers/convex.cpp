#include "riskopt/solvers/convex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskopt {

namespace {

class ConvexSolver {
 public:
  ConvexSolver(const SaaProblem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg), n_(p.dim()) {}

  SolveTrace run(std::span<const double> x0) {
    std::vector<double> x = x0.size() == n_ ? std::vector<double>(x0.begin(), x0.end()) : p_.full_point(x0);
    p_.bounds.project(x);
    fscale_ = 1.0 / std::max(1.0, std::abs(p_.objective_value(x)));
    mu_.assign(p_.constraints.size(), 0.0);
    rho_ = 10.0;
    c_.assign(p_.constraints.size(), 0.0);

    TerminationReason reason = TerminationReason::Converged;
    for (std::size_t stage = 0; stage < cfg_.smoothing_schedule.size(); ++stage) {
      const double tau_rel = cfg_.smoothing_schedule[stage];
      const double tau = tau_rel * p_.smoothing_scale;
      const double tol = tau_rel;
      // Active constraints only need to be tight at the last width; earlier
      // stages just hand a feasible warm start to the next one.
      const bool last = stage + 1 == cfg_.smoothing_schedule.size();
      const double active_tol = last ? cfg_.feasibility_tol : std::max(cfg_.feasibility_tol, 1e-2 * tau_rel);
      double prev_viol = kInf;
      bool stage_done = false;
      for (int outer = 0; outer < 60 && !stage_done; ++outer) {
        const auto inner = minimize(x, tau, tol);
        if (inner != TerminationReason::Converged) {
          reason = inner;
          break;
        }
        double viol = 0.0;
        bool active_tight = true;
        for (std::size_t j = 0; j < c_.size(); ++j) {
          viol = std::max(viol, c_[j]);
          mu_[j] = std::max(0.0, mu_[j] + rho_ * c_[j]);
          if (mu_[j] > 0.0 && std::abs(c_[j]) > active_tol) active_tight = false;
        }
        record(x);
        if (viol <= cfg_.feasibility_tol && active_tight) stage_done = true;
        else if (viol > cfg_.feasibility_tol && viol > 0.25 * prev_viol) rho_ = std::min(rho_ * 10.0, 1e12);
        prev_viol = viol;
      }
      trace_.stage_violations.push_back(p_.max_violation(x));
      if (reason != TerminationReason::Converged) break;
    }

    trace_.x = x;
    trace_.objective = p_.objective_value(x);
    trace_.max_violation = p_.max_violation(x);
    trace_.kkt_residual = kkt_residual(x, cfg_.smoothing_schedule.empty()
                                              ? 0.0
                                              : cfg_.smoothing_schedule.back() * p_.smoothing_scale);
    trace_.termination_reason = reason;
    trace_.eval_count = evals_;
    return std::move(trace_);
  }

 private:
  double lagrangian(std::span<const double> x, double tau, std::span<double> grad) {
    ++evals_;
    std::vector<double> gj(n_);
    double value = fscale_ * p_.objective(x, tau, grad);
    for (auto& g : grad) g *= fscale_;
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) {
      const double c = p_.constraints[j](x, tau, gj);
      c_[j] = c;
      const double shifted = mu_[j] + rho_ * c;
      if (shifted > 0.0) {
        value += (shifted * shifted - mu_[j] * mu_[j]) / (2.0 * rho_);
        for (std::size_t i = 0; i < n_; ++i) grad[i] += shifted * gj[i];
      } else {
        value -= mu_[j] * mu_[j] / (2.0 * rho_);
      }
    }
    return value;
  }

  double projected_gradient_norm(std::span<const double> x, std::span<const double> g) const {
    double r = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double moved = std::clamp(x[i] - g[i], p_.bounds.lower[i], p_.bounds.upper[i]);
      r = std::max(r, std::abs(moved - x[i]));
    }
    return r;
  }

  /// Projected BFGS on the augmented Lagrangian. The quasi-Newton matrix acts
  /// on the coordinates that are free of their bounds and is reset whenever
  /// that set changes. Leaves the constraint values at the returned point in c_.
  TerminationReason minimize(std::vector<double>& x, double tau, double tol) {
    const auto nn = static_cast<Eigen::Index>(n_);
    std::vector<double> g(n_), g_new(n_), x_new(n_);
    double value = lagrangian(x, tau, g);
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(nn, nn);
    bool h_is_identity = true;
    std::vector<bool> fixed(n_, false), prev_fixed;
    for (int it = 0; it < 5000; ++it) {
      if (evals_ >= cfg_.max_evals) return TerminationReason::MaxEvaluations;
      const double pg = projected_gradient_norm(x, g);
      if (pg <= tol) return TerminationReason::Converged;

      for (std::size_t i = 0; i < n_; ++i) {
        const double lo = p_.bounds.lower[i];
        const double hi = p_.bounds.upper[i];
        const double eps = 1e-12 * (1.0 + std::abs(x[i]));
        fixed[i] = (x[i] <= lo + eps && g[i] > 0.0) || (x[i] >= hi - eps && g[i] < 0.0);
      }
      if (fixed != prev_fixed) {
        h.setIdentity();
        h_is_identity = true;
        prev_fixed = fixed;
      }
      Eigen::VectorXd gf(nn);
      for (Eigen::Index i = 0; i < nn; ++i) gf[i] = fixed[static_cast<std::size_t>(i)] ? 0.0 : g[static_cast<std::size_t>(i)];
      Eigen::VectorXd d = -(h * gf);
      for (Eigen::Index i = 0; i < nn; ++i)
        if (fixed[static_cast<std::size_t>(i)]) d[i] = 0.0;
      if (!(d.dot(gf) < 0.0)) {
        h.setIdentity();
        h_is_identity = true;
        d = -gf;
      }

      double step = 1.0;
      bool accepted = false;
      double value_new = value;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < n_; ++i)
          x_new[i] = std::clamp(x[i] + step * d[static_cast<Eigen::Index>(i)], p_.bounds.lower[i], p_.bounds.upper[i]);
        double decrease = 0.0;
        for (std::size_t i = 0; i < n_; ++i) decrease += g[i] * (x_new[i] - x[i]);
        value_new = lagrangian(x_new, tau, g_new);
        if (std::isfinite(value_new) && value_new <= value + 1e-4 * decrease && decrease < 0.0) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        lagrangian(x, tau, g);
        if (!h_is_identity) {
          h.setIdentity();
          h_is_identity = true;
          continue;
        }
        return pg <= 100.0 * tol ? TerminationReason::Converged : TerminationReason::LineSearchFailure;
      }

      Eigen::VectorXd s(nn), y(nn);
      for (Eigen::Index i = 0; i < nn; ++i) {
        const auto k = static_cast<std::size_t>(i);
        s[i] = fixed[k] ? 0.0 : x_new[k] - x[k];
        y[i] = fixed[k] ? 0.0 : g_new[k] - g[k];
      }
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (h_is_identity) h *= sy / y.squaredNorm();
        const double r = 1.0 / sy;
        const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(nn, nn) - r * y * s.transpose();
        h = v.transpose() * h * v + r * s * s.transpose();
        h_is_identity = false;
      }
      x.swap(x_new);
      g.swap(g_new);
      value = value_new;
    }
    return TerminationReason::MaxEvaluations;
  }

  void record(std::span<const double> x) {
    trace_.iterates.push_back({std::vector<double>(x.begin(), x.end()), p_.objective_value(x), p_.max_violation(x)});
  }

  double kkt_residual(std::span<const double> x, double tau) {
    std::vector<double> grad(n_), gj(n_);
    p_.objective(x, tau, grad);
    for (auto& v : grad) v *= fscale_;
    double comp = 0.0;
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) {
      const double c = p_.constraints[j](x, tau, gj);
      for (std::size_t i = 0; i < n_; ++i) grad[i] += mu_[j] * gj[i];
      comp = std::max(comp, std::abs(mu_[j] * c));
    }
    return std::max(projected_gradient_norm(x, grad), comp);
  }

  const SaaProblem& p_;
  const SolverConfig& cfg_;
  std::size_t n_;
  double fscale_ = 1.0;
  double rho_ = 10.0;
  std::vector<double> mu_;
  std::vector<double> c_;
  std::size_t evals_ = 0;
  SolveTrace trace_;
};

}  // namespace

SolveTrace solve_convex_saa(const SaaProblem& p, const SolverConfig& cfg, std::span<const double> x0) {
  cfg.validate();
  if (p.convexity != Convexity::DeclaredConvex)
    throw std::invalid_argument("solve_convex_saa: problem is not declared convex");
  if (x0.size() != p.dim() && x0.size() != p.design_dim)
    throw std::invalid_argument("solve_convex_saa: x0 must be a design or a full (design, aux) point");
  if (cfg.smoothing_schedule.empty()) throw std::invalid_argument("solve_convex_saa: empty smoothing schedule");
  return ConvexSolver(p, cfg).run(x0);
}

}  // namespace riskopt

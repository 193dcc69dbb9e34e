#include "riskopt/solvers/dfo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "riskopt/solvers/lp.hpp"

namespace riskopt {

namespace {

struct Point {
  std::vector<double> u;
  double f = 0.0;
  std::vector<double> c;
  double viol = 0.0;
};

struct Models {
  std::vector<std::size_t> others;  // simplex indices other than the incumbent, row order of D
  Eigen::MatrixXd d;                // rows: u_k - u_best
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd grad_f;
  std::vector<Eigen::VectorXd> grad_c;
};

class Dfo {
 public:
  Dfo(const ConstrainedProblem& p, const SolverConfig& cfg, std::span<const double> x0)
      : p_(p), cfg_(cfg), n_(p.bounds.size()), rng_(cfg.seed) {
    cfg_.validate();
    if (!p_.objective) throw std::invalid_argument("solve_dfo: objective is required");
    if (x0.size() != n_) throw std::invalid_argument("solve_dfo: x0 has the wrong dimension");
    if (!p_.bounds.contains(x0, 1e-12)) throw std::invalid_argument("solve_dfo: x0 lies outside the box");
    origin_.resize(n_);
    width_.resize(n_);
    lo_.resize(n_);
    hi_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double l = p_.bounds.lower[j];
      const double h = p_.bounds.upper[j];
      if (std::isfinite(l) && std::isfinite(h)) {
        if (!(h > l)) throw std::invalid_argument("solve_dfo: degenerate box coordinate");
        origin_[j] = l;
        width_[j] = h - l;
      } else {
        origin_[j] = x0[j];
        width_[j] = std::max(1.0, std::abs(x0[j]));
      }
      lo_[j] = std::isfinite(l) ? (l - origin_[j]) / width_[j] : -kInf;
      hi_[j] = std::isfinite(h) ? (h - origin_[j]) / width_[j] : kInf;
    }
    u0_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) u0_[j] = std::clamp((x0[j] - origin_[j]) / width_[j], lo_[j], hi_[j]);
  }

  SolveTrace run() {
    rho_ = cfg_.initial_trust_radius;
    if (!initial_simplex(u0_)) return finish(TerminationReason::MaxEvaluations);
    std::size_t penalty_bumps = 0;
    while (true) {
      if (trace_.eval_count >= cfg_.max_evals) return finish(TerminationReason::MaxEvaluations);
      select_best();
      Models m;
      if (!build_models(m)) {
        if (!initial_simplex(simplex_[best_].u)) return finish(TerminationReason::MaxEvaluations);
        continue;
      }
      const auto s = trust_region_step(m);
      const Point& b = simplex_[best_];

      double pred_f = -m.grad_f.dot(s);
      double viol_after = 0.0;
      for (std::size_t j = 0; j < b.c.size(); ++j) viol_after = std::max(viol_after, b.c[j] + m.grad_c[j].dot(s));
      const double pred_v = b.viol - viol_after;
      if (pred_v > 0.0 && penalty_ * pred_v + pred_f <= 0.5 * penalty_ * pred_v && penalty_bumps < 8) {
        const double needed = -2.0 * pred_f / pred_v;
        penalty_ = penalty_ == 0.0 ? needed : penalty_;
        while (penalty_ < needed) penalty_ *= 10.0;
        ++penalty_bumps;
        continue;
      }
      penalty_bumps = 0;
      const double pred = pred_f + penalty_ * pred_v;
      if (s.lpNorm<Eigen::Infinity>() < 0.5 * rho_ || !(pred > 0.0)) {
        if (!improve_or_shrink(m)) return finish(stop_reason_);
        continue;
      }

      std::vector<double> u(n_);
      for (std::size_t j = 0; j < n_; ++j) u[j] = std::clamp(b.u[j] + s[j], lo_[j], hi_[j]);
      const double merit_old = merit(b);
      Point trial = evaluate(u);
      const double actual = merit_old - merit(trial);

      const Eigen::VectorXd lambda = m.lu.transpose().solve(s);
      if (actual > 0.0) {
        Eigen::Index k = 0;
        lambda.cwiseAbs().maxCoeff(&k);
        simplex_[m.others[static_cast<std::size_t>(k)]] = std::move(trial);
      } else {
        std::size_t far = 0;
        double far_dist = -1.0;
        for (std::size_t r = 0; r < m.others.size(); ++r) {
          const double dist = m.d.row(static_cast<Eigen::Index>(r)).lpNorm<Eigen::Infinity>();
          if (dist > far_dist) {
            far_dist = dist;
            far = r;
          }
        }
        if (far_dist > rho_ && std::abs(lambda[static_cast<Eigen::Index>(far)]) >= 0.1)
          simplex_[m.others[far]] = std::move(trial);
      }
      if (actual <= 0.1 * pred) {
        select_best();
        Models mm;
        if (!build_models(mm)) continue;
        if (!improve_or_shrink(mm)) return finish(stop_reason_);
      }
    }
  }

 private:
  double merit(const Point& q) const { return q.f + penalty_ * q.viol; }

  std::vector<double> to_x(std::span<const double> u) const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = origin_[j] + width_[j] * u[j];
    p_.bounds.project(x);
    return x;
  }

  Point evaluate(std::vector<double> u) {
    Point q;
    q.u = std::move(u);
    const auto x = to_x(q.u);
    q.f = p_.objective(x);
    q.c.reserve(p_.constraints.size());
    for (const auto& c : p_.constraints) {
      q.c.push_back(c(x));
      q.viol = std::max(q.viol, q.c.back());
    }
    ++trace_.eval_count;
    trace_.iterates.push_back({x, q.f, q.viol});
    const bool feasible = q.viol <= cfg_.feasibility_tol;
    if (!have_result_ || (feasible && (!result_feasible_ || q.f < result_.objective)) ||
        (!feasible && !result_feasible_ && q.viol < result_.max_violation)) {
      have_result_ = true;
      result_feasible_ = feasible;
      result_ = {x, q.f, q.viol};
    }
    return q;
  }

  bool budget_left() const { return trace_.eval_count < cfg_.max_evals; }

  /// Coordinate simplex of radius rho around u; the incumbent is kept.
  bool initial_simplex(const std::vector<double>& u) {
    std::vector<Point> fresh;
    if (!simplex_.empty() && simplex_[best_].u == u) {
      fresh.push_back(simplex_[best_]);
    } else {
      if (!budget_left()) return false;
      fresh.push_back(evaluate(u));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (!budget_left()) return false;
      auto v = u;
      double step = rho_;
      if (v[j] + step > hi_[j]) step = (v[j] - rho_ >= lo_[j]) ? -rho_ : (hi_[j] - v[j] >= v[j] - lo_[j] ? hi_[j] - v[j] : lo_[j] - v[j]);
      v[j] += step;
      fresh.push_back(evaluate(std::move(v)));
    }
    simplex_ = std::move(fresh);
    best_ = 0;
    return true;
  }

  void select_best() {
    std::size_t best = best_;
    for (std::size_t k = 0; k < simplex_.size(); ++k) {
      const double mk = merit(simplex_[k]);
      const double mb = merit(simplex_[best]);
      // Equal merit keeps the incumbent.
      if (mk < mb || (mk == mb && simplex_[k].viol < simplex_[best].viol)) best = k;
    }
    best_ = best;
  }

  bool build_models(Models& m) const {
    const Point& b = simplex_[best_];
    const auto nn = static_cast<Eigen::Index>(n_);
    m.d.resize(nn, nn);
    Eigen::VectorXd df(nn);
    const std::size_t nc = b.c.size();
    std::vector<Eigen::VectorXd> dc(nc, Eigen::VectorXd(nn));
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < simplex_.size(); ++k) {
      if (k == best_) continue;
      m.others.push_back(k);
      for (std::size_t j = 0; j < n_; ++j) m.d(r, static_cast<Eigen::Index>(j)) = simplex_[k].u[j] - b.u[j];
      df[r] = simplex_[k].f - b.f;
      for (std::size_t j = 0; j < nc; ++j) dc[j][r] = simplex_[k].c[j] - b.c[j];
      ++r;
    }
    m.lu.compute(m.d);
    if (!(m.lu.rcond() > 1e-12)) return false;
    m.grad_f = m.lu.solve(df);
    for (std::size_t j = 0; j < nc; ++j) m.grad_c.push_back(m.lu.solve(dc[j]));
    return true;
  }

  Eigen::VectorXd trust_region_step(const Models& m) const {
    const Point& b = simplex_[best_];
    const std::size_t nc = b.c.size();
    const auto zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));

    auto base = [&](std::size_t extra) {
      LpTableau lp;
      lp.cost.assign(n_ + extra, 0.0);
      lp.lower.assign(n_ + extra, 0.0);
      lp.upper.assign(n_ + extra, kInf);
      for (std::size_t j = 0; j < n_; ++j) {
        lp.lower[j] = std::max(-rho_, lo_[j] - b.u[j]);
        lp.upper[j] = std::min(rho_, hi_[j] - b.u[j]);
        if (lp.lower[j] > lp.upper[j]) lp.lower[j] = lp.upper[j] = 0.0;
      }
      return lp;
    };

    double allowed = 0.0;
    Eigen::VectorXd fallback = zero;
    if (b.viol > 0.0) {
      LpTableau lp = base(1);
      lp.cost[n_] = 1.0;
      for (std::size_t j = 0; j < nc; ++j) {
        for (std::size_t i = 0; i < n_; ++i) lp.a.push_back(m.grad_c[j][static_cast<Eigen::Index>(i)]);
        lp.a.push_back(-1.0);
        lp.b.push_back(-b.c[j]);
      }
      const auto res = solve_lp(lp);
      if (res.status != LpStatus::Optimal) return zero;
      allowed = std::max(0.0, res.x[n_]);
      for (std::size_t i = 0; i < n_; ++i) fallback[static_cast<Eigen::Index>(i)] = res.x[i];
      allowed += 1e-12 * (1.0 + allowed);
    }
    LpTableau lp = base(0);
    for (std::size_t i = 0; i < n_; ++i) lp.cost[i] = m.grad_f[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < nc; ++j) {
      for (std::size_t i = 0; i < n_; ++i) lp.a.push_back(m.grad_c[j][static_cast<Eigen::Index>(i)]);
      lp.b.push_back(allowed - b.c[j]);
    }
    const auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return fallback;
    Eigen::VectorXd s(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) s[static_cast<Eigen::Index>(i)] = res.x[i];
    return s;
  }

  /// Repairs the simplex geometry if it is poor, otherwise halves the trust
  /// radius. Returns false when the run should stop.
  bool improve_or_shrink(const Models& m) {
    if (!budget_left()) {
      stop_reason_ = TerminationReason::MaxEvaluations;
      return false;
    }
    // A vertex far outside the trust region, or one close to the face spanned
    // by the others, is replaced by a step along the face normal.
    const Eigen::MatrixXd inv = m.lu.inverse();
    std::size_t worst = m.others.size();
    double worst_score = 0.0;
    for (std::size_t r = 0; r < m.others.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const double dist = m.d.row(ri).lpNorm<Eigen::Infinity>();
      const double height = 1.0 / inv.col(ri).norm();
      double score = 0.0;
      if (dist > 2.0 * rho_) score = dist / rho_;
      else if (height < 0.25 * rho_) score = 1.0 + rho_ / height;
      if (score > worst_score) {
        worst_score = score;
        worst = r;
      }
    }
    if (worst < m.others.size()) {
      Eigen::VectorXd dir = inv.col(static_cast<Eigen::Index>(worst));
      dir /= dir.lpNorm<Eigen::Infinity>();
      const Point& b = simplex_[best_];
      const double first = std::bernoulli_distribution(0.5)(rng_) ? 1.0 : -1.0;
      std::vector<double> chosen;
      double chosen_len = -1.0;
      for (double sign : {first, -first}) {
        std::vector<double> u(n_);
        double len = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          u[j] = std::clamp(b.u[j] + sign * rho_ * dir[static_cast<Eigen::Index>(j)], lo_[j], hi_[j]);
          len = std::max(len, std::abs(u[j] - b.u[j]));
        }
        if (len > chosen_len + 1e-15) {
          chosen = std::move(u);
          chosen_len = len;
        }
        if (len >= 0.5 * rho_) break;
      }
      if (chosen_len > 1e-3 * rho_) {
        simplex_[m.others[worst]] = evaluate(std::move(chosen));
        return true;
      }
    }
    rho_ *= 0.5;
    if (rho_ < cfg_.final_trust_radius) {
      stop_reason_ = TerminationReason::Converged;
      return false;
    }
    return true;
  }

  SolveTrace finish(TerminationReason reason) {
    trace_.termination_reason = reason;
    if (have_result_) {
      trace_.x = result_.x;
      trace_.objective = result_.objective;
      trace_.max_violation = result_.max_violation;
      if (!result_feasible_) trace_.termination_reason = TerminationReason::NoFeasiblePoint;
    }
    return std::move(trace_);
  }

  const ConstrainedProblem& p_;
  SolverConfig cfg_;
  std::size_t n_;
  std::mt19937_64 rng_;
  std::vector<double> origin_, width_, lo_, hi_, u0_;
  std::vector<Point> simplex_;
  std::size_t best_ = 0;
  double rho_ = 0.0;
  double penalty_ = 0.0;
  TerminationReason stop_reason_ = TerminationReason::Converged;
  SolveTrace trace_;
  bool have_result_ = false;
  bool result_feasible_ = false;
  Iterate result_{};
};

}  // namespace

SolveTrace solve_dfo(const ConstrainedProblem& p, const SolverConfig& cfg, std::span<const double> x0) {
  return Dfo(p, cfg, x0).run();
}

SolveTrace solve_dfo(const SaaProblem& p, const SolverConfig& cfg, std::span<const double> design0) {
  return solve_dfo(p.reduced(), cfg, design0);
}

}  // namespace riskopt

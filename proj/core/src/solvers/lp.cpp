#include "riskopt/solvers/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskopt {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr std::size_t kDegenerateRunForBland = 50;

enum class Shift { Lower, Upper, Free };

struct Column {
  Shift kind;
  std::size_t col;
  std::size_t neg_col;  // Free only
  double offset;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& z) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &at(pr, 0);
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &at(r, 0);
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    const double f = z[pc];
    if (f != 0.0) {
      for (std::size_t c = 0; c <= cols_; ++c) z[c] -= f * prow[c];
      z[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
};

struct SimplexState {
  Tableau tab;
  std::vector<std::size_t> basis;
  std::vector<bool> live;
  std::size_t iterations = 0;
};

/// Runs primal simplex on the reduced-cost row z (z[cols] holds -objective).
/// Columns with allowed[c] == false never enter.
LpStatus iterate(SimplexState& s, std::vector<double>& z, const std::vector<bool>& allowed, std::size_t max_iter) {
  std::size_t degenerate_run = 0;
  const std::size_t m = s.tab.rows();
  const std::size_t n = s.tab.cols();
  while (true) {
    if (s.iterations >= max_iter) return LpStatus::NumericalFailure;
    const bool bland = degenerate_run >= kDegenerateRunForBland;
    std::size_t enter = n;
    double best = -kCostTol;
    for (std::size_t c = 0; c < n; ++c) {
      if (!allowed[c] || z[c] >= -kCostTol) continue;
      if (bland) {
        enter = c;
        break;
      }
      if (z[c] < best) {
        best = z[c];
        enter = c;
      }
    }
    if (enter == n) return LpStatus::Optimal;

    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (!s.live[r]) continue;
      const double a = s.tab.at(r, enter);
      if (a <= kPivotTol) continue;
      const double q = std::max(0.0, s.tab.rhs(r)) / a;
      const double eps = 1e-12 * std::max(1.0, q);
      if (leave == m || q < ratio - eps) {
        ratio = q;
        leave = r;
      } else if (q <= ratio + eps && s.basis[r] < s.basis[leave]) {
        ratio = std::min(ratio, q);
        leave = r;
      }
    }
    if (leave == m) return LpStatus::Unbounded;
    degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
    s.tab.pivot(leave, enter, z);
    s.basis[leave] = enter;
    ++s.iterations;
  }
}

}  // namespace

LpResult solve_lp(const LpTableau& lp, std::size_t max_iterations) {
  lp.validate();
  const std::size_t nx = lp.vars();
  const std::size_t r0 = lp.rows();

  // Map every x_j onto nonnegative columns.
  std::vector<Column> map(nx);
  std::size_t ny = 0;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (column, upper limit)
  for (std::size_t j = 0; j < nx; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (std::isfinite(lo)) {
      map[j] = {Shift::Lower, ny++, 0, lo};
      if (std::isfinite(hi)) bound_rows.emplace_back(map[j].col, hi - lo);
    } else if (std::isfinite(hi)) {
      map[j] = {Shift::Upper, ny++, 0, hi};
    } else {
      map[j] = {Shift::Free, ny, ny + 1, 0.0};
      ny += 2;
    }
  }

  const std::size_t rows = r0 + bound_rows.size();
  std::vector<double> a(rows * ny, 0.0);
  std::vector<double> b(rows, 0.0);
  std::vector<double> cost(ny, 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    const auto& mj = map[j];
    const double sign = mj.kind == Shift::Upper ? -1.0 : 1.0;
    cost[mj.col] += sign * lp.cost[j];
    if (mj.kind == Shift::Free) cost[mj.neg_col] -= lp.cost[j];
  }
  for (std::size_t r = 0; r < r0; ++r) {
    double rhs = lp.b[r];
    for (std::size_t j = 0; j < nx; ++j) {
      const double v = lp.a_at(r, j);
      if (v == 0.0) continue;
      const auto& mj = map[j];
      a[r * ny + mj.col] += mj.kind == Shift::Upper ? -v : v;
      if (mj.kind == Shift::Free) a[r * ny + mj.neg_col] -= v;
      rhs -= v * mj.offset;
    }
    b[r] = rhs;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    a[(r0 + k) * ny + bound_rows[k].first] = 1.0;
    b[r0 + k] = bound_rows[k].second;
  }

  // Columns: structural | slacks | artificials.
  std::size_t n_art = 0;
  for (double v : b)
    if (v < 0.0) ++n_art;
  const std::size_t slack0 = ny;
  const std::size_t art0 = ny + rows;
  const std::size_t cols = art0 + n_art;
  SimplexState s{Tableau(rows, cols), std::vector<std::size_t>(rows), std::vector<bool>(rows, true), 0};
  std::size_t next_art = art0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < ny; ++c) s.tab.at(r, c) = sign * a[r * ny + c];
    s.tab.at(r, slack0 + r) = sign;
    s.tab.rhs(r) = sign * b[r];
    if (sign < 0.0) {
      s.tab.at(r, next_art) = 1.0;
      s.basis[r] = next_art++;
    } else {
      s.basis[r] = slack0 + r;
    }
  }

  LpResult out;
  std::vector<double> z(cols + 1, 0.0);
  if (n_art > 0) {
    for (std::size_t c = art0; c < cols; ++c) z[c] = 1.0;
    for (std::size_t r = 0; r < rows; ++r)
      if (s.basis[r] >= art0)
        for (std::size_t c = 0; c <= cols; ++c) z[c] -= s.tab.at(r, c);
    const std::vector<bool> all(cols, true);
    const auto st = iterate(s, z, all, max_iterations);
    if (st == LpStatus::NumericalFailure) {
      out.status = st;
      out.iterations = s.iterations;
      out.diagnostics = "phase I hit the iteration limit";
      return out;
    }
    double bmax = 1.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    if (-z[cols] > 1e-9 * bmax) {
      out.status = LpStatus::Infeasible;
      out.iterations = s.iterations;
      out.diagnostics = "phase I residual " + std::to_string(-z[cols]);
      return out;
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant.
    for (std::size_t r = 0; r < rows; ++r) {
      if (s.basis[r] < art0) continue;
      std::size_t pc = art0;
      double best = 1e-9;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(s.tab.at(r, c)) > best) {
          best = std::abs(s.tab.at(r, c));
          pc = c;
        }
      }
      if (pc == art0) {
        s.live[r] = false;
      } else {
        s.tab.pivot(r, pc, z);
        s.basis[r] = pc;
      }
    }
  }

  // Phase II reduced costs.
  std::vector<double> full_cost(cols, 0.0);
  std::copy(cost.begin(), cost.end(), full_cost.begin());
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t c = 0; c < cols; ++c) z[c] = full_cost[c];
  for (std::size_t r = 0; r < rows; ++r) {
    const double cb = full_cost[s.basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) z[c] -= cb * s.tab.at(r, c);
  }
  std::vector<bool> allowed(cols, true);
  for (std::size_t c = art0; c < cols; ++c) allowed[c] = false;
  const auto st = iterate(s, z, allowed, max_iterations);
  out.iterations = s.iterations;
  if (st != LpStatus::Optimal) {
    out.status = st;
    out.diagnostics = st == LpStatus::Unbounded ? "objective unbounded below" : "phase II hit the iteration limit";
    return out;
  }

  std::vector<double> y(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) y[s.basis[r]] = std::max(0.0, s.tab.rhs(r));
  out.x.assign(nx, 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    const auto& mj = map[j];
    switch (mj.kind) {
      case Shift::Lower:
        out.x[j] = mj.offset + y[mj.col];
        break;
      case Shift::Upper:
        out.x[j] = mj.offset - y[mj.col];
        break;
      case Shift::Free:
        out.x[j] = y[mj.col] - y[mj.neg_col];
        break;
    }
  }
  out.objective = lp.cost_offset;
  for (std::size_t j = 0; j < nx; ++j) out.objective += lp.cost[j] * out.x[j];
  out.duals.resize(r0);
  for (std::size_t r = 0; r < r0; ++r) out.duals[r] = z[slack0 + r];
  double worst = 0.0;
  for (std::size_t c = 0; c < art0; ++c) worst = std::min(worst, z[c]);
  out.dual_infeasibility = worst;

  double viol = 0.0;
  double scale = 1.0;
  for (std::size_t r = 0; r < r0; ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < nx; ++j) lhs += lp.a_at(r, j) * out.x[j];
    viol = std::max(viol, lhs - lp.b[r]);
    scale = std::max(scale, std::abs(lp.b[r]));
  }
  if (viol > 1e-7 * scale || worst < -1e-9) {
    out.status = LpStatus::NumericalFailure;
    out.diagnostics = "certificate check failed: primal violation " + std::to_string(viol) +
                      ", dual infeasibility " + std::to_string(worst);
    return out;
  }
  out.status = LpStatus::Optimal;
  return out;
}

}  // namespace riskopt

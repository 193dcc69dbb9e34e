#include "riskopt/problems/short_column.hpp"

#include <cmath>
#include <stdexcept>

namespace riskopt {

namespace {

void check_size(std::span<const double> design, std::span<const double> z) {
  if (design.size() != 2 || z.size() != 3)
    throw std::invalid_argument("short column: expects a 2-vector design and z = (F, M, Y)");
}

}  // namespace

double short_column_limit_state(std::span<const double> design, std::span<const double> z) {
  check_size(design, z);
  const double w = design[0];
  const double h = design[1];
  const double f = z[0];
  const double m = z[1];
  const double y = z[2];
  if (!(w > 0.0) || !(h > 0.0)) throw std::domain_error("short column: w and h must be positive");
  if (!(y > 0.0)) throw std::domain_error("short column: yield strength must be positive");
  return 4.0 * m / (w * h * h * y) + (f * f) / (w * w * h * h * y * y);
}

std::pair<double, double> short_column_convex_forms(std::span<const double> x, std::span<const double> z) {
  check_size(x, z);
  if (!(z[2] > 0.0)) throw std::domain_error("short column: yield strength must be positive");
  const double a = 4.0 * z[1] / z[2];
  const double b = z[0] * z[0] / (z[2] * z[2]);
  const double g = a * std::exp(-x[0] - 2.0 * x[1]) + b * std::exp(-2.0 * x[0] - 2.0 * x[1]);
  return {std::exp(x[0] + x[1]), g};
}

std::vector<DistributionSpec> short_column_inputs() {
  return {DistributionSpec::normal(500.0, 100.0), DistributionSpec::normal(2000.0, 400.0),
          DistributionSpec::lognormal(5.0, 0.5)};
}

CorrelationSpec short_column_correlation() { return CorrelationSpec::identity(3).set(0, 1, 0.5); }

Box ShortColumnModel::design_bounds() const { return Box({5.0, 15.0}, {15.0, 25.0}); }

ModelEvaluation ShortColumnModel::evaluate(std::span<const double> design, std::span<const double> z) const {
  return {design[0] * design[1], short_column_limit_state(design, z)};
}

std::optional<double> ShortColumnModel::deterministic_objective(std::span<const double> design) const {
  return design[0] * design[1];
}

void ShortColumnModel::deterministic_objective_gradient(std::span<const double> design,
                                                        std::span<double> grad) const {
  grad[0] = design[1];
  grad[1] = design[0];
}

void ShortColumnModel::limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                                    std::span<double> grad) const {
  const std::size_t m = batch.rows();
  if (g.size() != m || (!grad.empty() && grad.size() != 2 * m))
    throw std::invalid_argument("short column: output span size mismatch");
  const double w = design[0];
  const double h = design[1];
  if (!(w > 0.0) || !(h > 0.0)) throw std::domain_error("short column: w and h must be positive");
  const double c1 = 4.0 / (w * h * h);
  const double c2 = 1.0 / (w * w * h * h);
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = batch.row(i);
    const double t1 = c1 * z[1] / z[2];
    const double t2 = c2 * (z[0] * z[0]) / (z[2] * z[2]);
    g[i] = t1 + t2;
    if (!grad.empty()) {
      grad[2 * i] = -(t1 + 2.0 * t2) / w;
      grad[2 * i + 1] = -(2.0 * t1 + 2.0 * t2) / h;
    }
  }
}

Box ShortColumnConvexModel::design_bounds() const {
  return Box({std::log(5.0), std::log(15.0)}, {std::log(15.0), std::log(25.0)});
}

ModelEvaluation ShortColumnConvexModel::evaluate(std::span<const double> design, std::span<const double> z) const {
  const auto [f, g] = short_column_convex_forms(design, z);
  return {f, g};
}

std::optional<double> ShortColumnConvexModel::deterministic_objective(std::span<const double> design) const {
  return std::exp(design[0] + design[1]);
}

void ShortColumnConvexModel::deterministic_objective_gradient(std::span<const double> design,
                                                              std::span<double> grad) const {
  const double e = std::exp(design[0] + design[1]);
  grad[0] = e;
  grad[1] = e;
}

void ShortColumnConvexModel::limit_states(std::span<const double> design, const RandomBatch& batch,
                                          std::span<double> g, std::span<double> grad) const {
  const std::size_t m = batch.rows();
  if (g.size() != m || (!grad.empty() && grad.size() != 2 * m))
    throw std::invalid_argument("short column: output span size mismatch");
  const double e1 = std::exp(-design[0] - 2.0 * design[1]);
  const double e2 = std::exp(-2.0 * design[0] - 2.0 * design[1]);
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = batch.row(i);
    const double t1 = 4.0 * z[1] / z[2] * e1;
    const double t2 = (z[0] * z[0]) / (z[2] * z[2]) * e2;
    g[i] = t1 + t2;
    if (!grad.empty()) {
      grad[2 * i] = -t1 - 2.0 * t2;
      grad[2 * i + 1] = -2.0 * t1 - 2.0 * t2;
    }
  }
}

}  // namespace riskopt

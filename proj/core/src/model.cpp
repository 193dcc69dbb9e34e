#include "riskopt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace riskopt {

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

namespace {

template <typename Pick>
void loop_with_fd(const StochasticModel& model, std::span<const double> design, const RandomBatch& batch,
                  std::span<double> out, std::span<double> grad, Pick pick) {
  const std::size_t m = batch.rows();
  const std::size_t n = design.size();
  if (out.size() != m) throw std::invalid_argument("StochasticModel: output span size mismatch");
  if (!grad.empty() && grad.size() != m * n) throw std::invalid_argument("StochasticModel: gradient span size mismatch");
  std::vector<double> x(design.begin(), design.end());
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = batch.row(i);
    out[i] = pick(model.evaluate(design, z));
    if (grad.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = fd_step(design[j]);
      x[j] = design[j] + h;
      const double up = pick(model.evaluate(x, z));
      x[j] = design[j] - h;
      const double down = pick(model.evaluate(x, z));
      x[j] = design[j];
      grad[i * n + j] = (up - down) / (2.0 * h);
    }
  }
}

}  // namespace

void StochasticModel::limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                                   std::span<double> grad) const {
  loop_with_fd(*this, design, batch, g, grad, [](const ModelEvaluation& e) { return e.limit_state; });
}

void StochasticModel::objectives(std::span<const double> design, const RandomBatch& batch, std::span<double> f,
                                 std::span<double> grad) const {
  loop_with_fd(*this, design, batch, f, grad, [](const ModelEvaluation& e) { return e.objective; });
}

void StochasticModel::deterministic_objective_gradient(std::span<const double> design, std::span<double> grad) const {
  std::vector<double> x(design.begin(), design.end());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = fd_step(design[j]);
    x[j] = design[j] + h;
    const double up = deterministic_objective(x).value();
    x[j] = design[j] - h;
    const double down = deterministic_objective(x).value();
    x[j] = design[j];
    grad[j] = (up - down) / (2.0 * h);
  }
}

std::vector<double> StochasticModel::limit_states_on_rows(std::span<const double> design,
                                                          std::span<const double> rows) const {
  const std::size_t n = random_dim();
  const std::size_t m = rows.size() / n;
  RandomBatch batch(m, n, std::vector<double>(rows.begin(), rows.end()), 0, 0);
  std::vector<double> g(m);
  limit_states(design, batch, g, {});
  return g;
}

}  // namespace riskopt

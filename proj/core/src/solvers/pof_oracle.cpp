#include "riskopt/solvers/pof_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskopt {

namespace {

constexpr std::size_t kEvalBlockRows = std::size_t{1} << 16;
constexpr std::uint64_t kOracleStream = 0x706f66;

}  // namespace

AdaptivePofResult adaptive_pof_oracle(const StochasticModel& model, std::span<const double> design, double t,
                                      double target_rel_err, std::size_t cap, const SampleStream& stream,
                                      std::size_t initial, bool keep_values) {
  if (!(target_rel_err > 0.0)) throw std::invalid_argument("adaptive_pof_oracle: target_rel_err must be positive");
  if (cap == 0 || initial == 0) throw std::invalid_argument("adaptive_pof_oracle: sample counts must be positive");
  if (stream.cols() != model.random_dim())
    throw std::invalid_argument("adaptive_pof_oracle: stream width does not match the model");

  std::size_t evaluated = 0;
  std::size_t failures = 0;
  std::size_t m = std::min(initial, cap);
  AdaptivePofResult out;
  while (true) {
    for (std::size_t b = evaluated; b < m; b += kEvalBlockRows) {
      const std::size_t e = std::min(m, b + kEvalBlockRows);
      const auto g = model.limit_states_on_rows(design, stream.rows(b, e));
      failures += static_cast<std::size_t>(std::count_if(g.begin(), g.end(), [t](double v) { return v > t; }));
      if (keep_values) out.values.insert(out.values.end(), g.begin(), g.end());
    }
    evaluated = m;
    const double p = static_cast<double>(failures) / static_cast<double>(m);
    out.relative_error = p > 0.0 ? std::sqrt((1.0 - p) / (p * static_cast<double>(m))) : kInf;
    out.estimate = RiskEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(m)), m, std::nullopt};
    if (p > 0.0 && out.relative_error <= target_rel_err) {
      out.converged = true;
      break;
    }
    if (m >= cap) break;
    m = std::min(cap, 2 * m);
  }
  out.zero_at_cap = failures == 0;
  return out;
}

AdaptivePofResult adaptive_pof_oracle(const StochasticModel& model, std::span<const double> design, double t,
                                      double target_rel_err, std::size_t cap, std::uint64_t seed,
                                      std::size_t initial) {
  const SampleStream stream(model.input_distributions(), model.input_correlation(), seed, kOracleStream,
                            std::min(cap, std::size_t{1} << 24));
  return adaptive_pof_oracle(model, design, t, target_rel_err, cap, stream, initial);
}

}  // namespace riskopt

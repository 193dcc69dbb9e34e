#include "riskopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace riskopt {

namespace {

void require_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("risk level alpha must lie in (0, 1)");
}

double superquantile_at(std::span<const double> sorted_desc, double gamma, double denom) {
  double hinge = 0.0;
  for (double g : sorted_desc) {
    if (g <= gamma) break;
    hinge += g - gamma;
  }
  return gamma + hinge / denom;
}

double bpof_scan(std::span<const double> sorted_desc, double t, std::size_t* k_out) {
  const std::size_t m = sorted_desc.size();
  // t at or above the sample maximum: the zero branch. The bare scan would
  // instead return the mass sitting exactly at the maximum.
  if (sorted_desc.front() <= t) {
    *k_out = 1;
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    sum += sorted_desc[k - 1];
    if (sum / static_cast<double>(k) < t) {
      *k_out = k;
      return static_cast<double>(k - 1) / static_cast<double>(m);
    }
  }
  *k_out = m + 1;
  return 1.0;
}

double bootstrap_std_error(const SampleSet& s, const BootstrapOptions& opts,
                           const std::function<double(const SampleSet&)>& estimator) {
  if (opts.replicates < 2) throw std::invalid_argument("bootstrap: need at least two replicates");
  std::mt19937_64 engine(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  const auto values = s.values();
  std::vector<double> stats;
  stats.reserve(opts.replicates);
  std::vector<double> resample(s.size());
  for (std::size_t r = 0; r < opts.replicates; ++r) {
    for (auto& v : resample) v = values[pick(engine)];
    stats.push_back(estimator(SampleSet(resample)));
  }
  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(stats.size());
  double ss = 0.0;
  for (double v : stats) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(stats.size() - 1));
}

}  // namespace

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("SampleSet: at least one value is required");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("SampleSet: values must be finite");
  sorted_ = values_;
  std::stable_sort(sorted_.begin(), sorted_.end(), std::greater<>());
}

double SampleSet::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

void RiskSpec::validate() const {
  switch (kind) {
    case RiskKind::Quantile:
    case RiskKind::Superquantile:
      require_level(parameter);
      break;
    case RiskKind::PoF:
    case RiskKind::BPoF:
      if (!std::isfinite(parameter)) throw std::invalid_argument("RiskSpec: threshold must be finite");
      break;
  }
}

std::size_t tail_count(std::size_t m, double alpha) {
  require_level(alpha);
  const double x = static_cast<double>(m) * (1.0 - alpha);
  double k = std::ceil(x);
  if (k - 1.0 >= x - 1e-10 * std::max(1.0, x)) k -= 1.0;
  return std::clamp(static_cast<std::size_t>(std::max(k, 1.0)), std::size_t{1}, m);
}

RiskEstimate estimate_pof(const SampleSet& s, double t) {
  const auto values = s.values();
  const auto failures = std::count_if(values.begin(), values.end(), [t](double g) { return g > t; });
  const double m = static_cast<double>(s.size());
  const double p = static_cast<double>(failures) / m;
  return RiskEstimate{p, std::sqrt(p * (1.0 - p) / m), s.size(), std::nullopt};
}

RiskEstimate estimate_quantile(const SampleSet& s, double alpha, const std::optional<BootstrapOptions>& bootstrap) {
  const std::size_t k = tail_count(s.size(), alpha);
  RiskEstimate out{s.sorted_descending()[k - 1], std::nullopt, s.size(), std::nullopt};
  if (bootstrap) {
    out.std_error = bootstrap_std_error(s, *bootstrap, [alpha](const SampleSet& r) {
      return r.sorted_descending()[tail_count(r.size(), alpha) - 1];
    });
  }
  return out;
}

RiskEstimate estimate_superquantile(const SampleSet& s, double alpha,
                                    const std::optional<BootstrapOptions>& bootstrap) {
  const auto sorted = s.sorted_descending();
  const std::size_t k = tail_count(s.size(), alpha);
  const double q = sorted[k - 1];
  const double denom = static_cast<double>(s.size()) * (1.0 - alpha);
  RiskEstimate out{superquantile_at(sorted, q, denom), std::nullopt, s.size(), q};
  if (bootstrap) {
    out.std_error = bootstrap_std_error(s, *bootstrap, [alpha](const SampleSet& r) {
      return estimate_superquantile(r, alpha).value;
    });
  }
  return out;
}

RiskEstimate estimate_superquantile_minform(const SampleSet& s, double alpha) {
  require_level(alpha);
  const auto sorted = s.sorted_descending();
  const std::size_t m = sorted.size();
  const double denom = static_cast<double>(m) * (1.0 - alpha);
  double prefix = 0.0;
  double best = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double gamma = sorted[k - 1];
    prefix += gamma;
    const double value = gamma + (prefix - static_cast<double>(k) * gamma) / denom;
    // Equal objective values keep the larger gamma.
    if (best_k == 0 || value < best - 1e-13 * std::max(1.0, std::abs(best))) {
      best = value;
      best_k = k;
    }
  }
  const double gamma_star = sorted[best_k - 1];
  return RiskEstimate{superquantile_at(sorted, gamma_star, denom), std::nullopt, m, gamma_star};
}

RiskEstimate estimate_bpof_alg2(const SampleSet& s, double t, const std::optional<BootstrapOptions>& bootstrap) {
  const auto sorted = s.sorted_descending();
  std::size_t k = 0;
  const double value = bpof_scan(sorted, t, &k);
  RiskEstimate out{value, std::nullopt, s.size(), std::nullopt};
  if (k >= 2) out.aux = sorted[k - 2];
  if (bootstrap) {
    out.std_error = bootstrap_std_error(s, *bootstrap, [t](const SampleSet& r) {
      std::size_t kk = 0;
      return bpof_scan(r.sorted_descending(), t, &kk);
    });
  }
  return out;
}

RiskEstimate estimate_bpof_minform(const SampleSet& s, double t) {
  const auto sorted = s.sorted_descending();
  const std::size_t m = sorted.size();
  if (t >= sorted.front()) return RiskEstimate{0.0, std::nullopt, m, std::nullopt};
  if (s.mean() >= t) return RiskEstimate{1.0, std::nullopt, m, std::nullopt};

  // The ratio is monotone between consecutive order statistics, so its
  // minimum over lambda < t sits at a sample value below t.
  double prefix = 0.0;
  double best = 2.0;
  double best_lambda = t;
  for (std::size_t j = 1; j <= m; ++j) {
    const double lambda = sorted[j - 1];
    prefix += lambda;
    if (!(lambda < t)) continue;
    const double ratio = (prefix - static_cast<double>(j) * lambda) / (static_cast<double>(m) * (t - lambda));
    if (ratio < best) {
      best = ratio;
      best_lambda = lambda;
    }
  }
  return RiskEstimate{std::clamp(best, 0.0, 1.0), std::nullopt, m, best_lambda};
}

RiskEstimate estimate(const SampleSet& s, const RiskSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case RiskKind::PoF:
      return estimate_pof(s, spec.parameter);
    case RiskKind::Quantile:
      return estimate_quantile(s, spec.parameter);
    case RiskKind::Superquantile:
      return estimate_superquantile(s, spec.parameter);
    case RiskKind::BPoF:
      return estimate_bpof_alg2(s, spec.parameter);
  }
  throw std::logic_error("estimate: unknown risk kind");
}

ThreePointRisk analytic_threepoint(double t) {
  ThreePointRisk r{};
  if (t < -1.0) r.pof = 1.0;
  else if (t < 0.0) r.pof = 0.2;
  else if (t < 1.0) r.pof = 0.1;
  else r.pof = 0.0;

  if (t < -0.7) r.bpof = 1.0;
  else if (t < 0.5) r.bpof = 0.3 / (t + 1.0);
  else if (t < 1.0) r.bpof = 0.1 / t;
  else r.bpof = 0.0;
  return r;
}

double threepoint_from_uniform(double u) {
  if (u < 0.8) return -1.0;
  if (u < 0.9) return 0.0;
  return 1.0;
}

}  // namespace riskopt

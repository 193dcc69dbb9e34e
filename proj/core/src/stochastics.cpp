#include "riskopt/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>

#include "riskopt/parallel.hpp"

namespace riskopt {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double to_unit_open(std::uint64_t bits) {
  // 53 random bits mapped to the midpoints of a 2^-53 grid: never 0 or 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

void validate_inputs(std::span<const DistributionSpec> specs, const CorrelationSpec& corr) {
  if (specs.empty()) throw std::invalid_argument("sample_batch: empty distribution list");
  for (const auto& s : specs) s.validate();
  if (!corr.empty()) {
    if (corr.dimension() != specs.size())
      throw std::invalid_argument("sample_batch: correlation dimension " + std::to_string(corr.dimension()) +
                                  " does not match " + std::to_string(specs.size()) + " components");
    corr.validate();
  }
}

double transform_marginal(const DistributionSpec& s, double u, double z) {
  switch (s.kind) {
    case DistributionKind::Normal:
      return s.mean + s.std_dev * z;
    case DistributionKind::LogNormal:
      return std::exp(s.log_mean() + s.log_std_dev() * z);
    case DistributionKind::TruncatedNormal:
      return truncated_normal_icdf(u, s.mean, s.std_dev, s.truncation->lo, s.truncation->hi);
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// DistributionSpec

DistributionSpec DistributionSpec::normal(double mean, double std_dev) {
  DistributionSpec s{DistributionKind::Normal, mean, std_dev, std::nullopt};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::lognormal(double mean, double std_dev) {
  DistributionSpec s{DistributionKind::LogNormal, mean, std_dev, std::nullopt};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::truncated_normal(double mean, double std_dev, double lo, double hi) {
  DistributionSpec s{DistributionKind::TruncatedNormal, mean, std_dev, Interval{lo, hi}};
  s.validate();
  return s;
}

void DistributionSpec::validate() const {
  if (!(std_dev > 0.0) || !std::isfinite(std_dev) || !std::isfinite(mean))
    throw std::invalid_argument("DistributionSpec: std_dev must be positive and finite");
  if (kind == DistributionKind::LogNormal && !(mean > 0.0))
    throw std::invalid_argument("DistributionSpec: lognormal mean must be positive");
  if (kind == DistributionKind::TruncatedNormal) {
    if (!truncation) throw std::invalid_argument("DistributionSpec: truncated normal needs an interval");
    if (!(truncation->lo < truncation->hi)) throw std::invalid_argument("DistributionSpec: truncation lo >= hi");
    const double a = (truncation->lo - mean) / std_dev;
    const double b = (truncation->hi - mean) / std_dev;
    const double mass = a > 0.0 ? standard_normal_sf(a) - standard_normal_sf(b)
                                : standard_normal_cdf(b) - standard_normal_cdf(a);
    if (!(mass > 0.0)) throw std::invalid_argument("DistributionSpec: truncation interval has zero mass");
  } else if (truncation) {
    throw std::invalid_argument("DistributionSpec: truncation only applies to TruncatedNormal");
  }
}

double DistributionSpec::log_mean() const {
  return std::log(mean * mean / std::sqrt(mean * mean + std_dev * std_dev));
}

double DistributionSpec::log_std_dev() const { return std::sqrt(std::log1p(std_dev * std_dev / (mean * mean))); }

// ---------------------------------------------------------------------------
// CorrelationSpec

CorrelationSpec::CorrelationSpec(std::size_t n, std::vector<double> matrix) : n_(n), matrix_(std::move(matrix)) {
  if (matrix_.size() != n * n) throw std::invalid_argument("CorrelationSpec: matrix must be n x n");
}

CorrelationSpec CorrelationSpec::identity(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return CorrelationSpec(n, std::move(m));
}

CorrelationSpec& CorrelationSpec::set(std::size_t i, std::size_t j, double rho) {
  if (i >= n_ || j >= n_) throw std::out_of_range("CorrelationSpec::set: index out of range");
  matrix_[i * n_ + j] = rho;
  matrix_[j * n_ + i] = rho;
  return *this;
}

bool CorrelationSpec::is_identity() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (matrix_[i * n_ + j] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

void CorrelationSpec::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (std::abs((*this)(i, i) - 1.0) > 1e-12) throw std::invalid_argument("CorrelationSpec: diagonal must be 1");
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12)
        throw std::invalid_argument("CorrelationSpec: entries must lie in [-1, 1]");
      if (std::abs(v - (*this)(j, i)) > 1e-12) throw std::invalid_argument("CorrelationSpec: matrix not symmetric");
    }
  }
  if (n_ == 0) return;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
      matrix_.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("CorrelationSpec: matrix is not positive semidefinite");
}

std::vector<double> CorrelationSpec::symmetric_root() const {
  const auto n = static_cast<Eigen::Index>(n_);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(matrix_.data(), n,
                                                                                                   n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd s = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  std::vector<double> out(n_ * n_);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)] = s(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// RandomBatch

RandomBatch::RandomBatch(std::size_t rows, std::size_t cols, std::vector<double> draws, std::uint64_t seed,
                         std::uint64_t stream_id)
    : rows_(rows), cols_(cols), draws_(std::move(draws)), seed_(seed), stream_id_(stream_id) {
  if (draws_.size() != rows * cols) throw std::invalid_argument("RandomBatch: draw count mismatch");
}

std::vector<double> RandomBatch::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = draws_[i * cols_ + j];
  return out;
}

RandomBatch RandomBatch::prefix(std::size_t m) const {
  m = std::min(m, rows_);
  return RandomBatch(m, cols_, std::vector<double>(draws_.begin(), draws_.begin() + static_cast<std::ptrdiff_t>(m * cols_)),
                     seed_, stream_id_);
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<double> sample_rows(std::span<const DistributionSpec> specs, const CorrelationSpec& corr,
                                std::size_t row_begin, std::size_t row_end, std::uint64_t seed,
                                std::uint64_t stream_id, unsigned threads) {
  validate_inputs(specs, corr);
  if (row_end < row_begin) throw std::invalid_argument("sample_rows: row_end < row_begin");
  const std::size_t n = specs.size();
  std::vector<double> out((row_end - row_begin) * n);
  if (row_end == row_begin) return out;

  const bool correlated = !corr.empty() && !corr.is_identity();
  const std::vector<double> root = correlated ? corr.symmetric_root() : std::vector<double>{};

  const std::size_t first_chunk = row_begin / kSamplingChunkRows;
  const std::size_t last_chunk = (row_end - 1) / kSamplingChunkRows;

  parallel_for_blocks(last_chunk - first_chunk + 1, 1, threads, [&](std::size_t b, std::size_t) {
    const std::size_t chunk = first_chunk + b;
    auto engine = chunk_engine(seed, stream_id, chunk);
    const std::size_t chunk_start = chunk * kSamplingChunkRows;
    std::vector<double> u(n), z(n), zc(n);
    for (std::size_t r = 0; r < kSamplingChunkRows; ++r) {
      for (std::size_t j = 0; j < n; ++j) u[j] = to_unit_open(engine());
      const std::size_t row = chunk_start + r;
      if (row < row_begin) continue;
      if (row >= row_end) break;
      double* dst = out.data() + (row - row_begin) * n;
      if (!correlated) {
        for (std::size_t j = 0; j < n; ++j) {
          const double zj = specs[j].kind == DistributionKind::TruncatedNormal ? 0.0 : standard_normal_icdf(u[j]);
          dst[j] = transform_marginal(specs[j], u[j], zj);
        }
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) z[j] = standard_normal_icdf(u[j]);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += root[i * n + j] * z[j];
        zc[i] = acc;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double uj = specs[j].kind == DistributionKind::TruncatedNormal ? standard_normal_cdf(zc[j]) : 0.5;
        dst[j] = transform_marginal(specs[j], std::clamp(uj, 0x1p-60, 1.0 - 0x1p-53), zc[j]);
      }
    }
  });
  return out;
}

RandomBatch sample_batch(std::span<const DistributionSpec> specs, const CorrelationSpec& corr, std::size_t m,
                         std::uint64_t seed, std::uint64_t stream_id, unsigned threads) {
  if (m < 1) throw std::invalid_argument("sample_batch: m must be at least 1");
  auto draws = sample_rows(specs, corr, 0, m, seed, stream_id, threads);
  return RandomBatch(m, specs.size(), std::move(draws), seed, stream_id);
}

SampleStream::SampleStream(std::vector<DistributionSpec> specs, CorrelationSpec corr, std::uint64_t seed,
                           std::uint64_t stream_id, std::size_t cache_limit_rows)
    : specs_(std::move(specs)), corr_(std::move(corr)), seed_(seed), stream_id_(stream_id),
      cache_limit_(cache_limit_rows) {
  validate_inputs(specs_, corr_);
}

std::vector<double> SampleStream::rows(std::size_t begin, std::size_t end) const {
  const std::size_t n = specs_.size();
  if (end < begin) throw std::invalid_argument("SampleStream::rows: end < begin");
  std::lock_guard lock(mutex_);
  const std::size_t cached = cache_.size() / n;
  const std::size_t want = std::min(end, cache_limit_);
  if (want > cached) {
    std::size_t target = (want + kSamplingChunkRows - 1) / kSamplingChunkRows * kSamplingChunkRows;
    target = std::min(target, cache_limit_);
    auto more = sample_rows(specs_, corr_, cached, target, seed_, stream_id_);
    cache_.insert(cache_.end(), more.begin(), more.end());
  }
  const std::size_t have = cache_.size() / n;
  std::vector<double> out;
  out.reserve((end - begin) * n);
  const std::size_t from_cache_end = std::min(end, have);
  if (begin < from_cache_end) {
    out.insert(out.end(), cache_.begin() + static_cast<std::ptrdiff_t>(begin * n),
               cache_.begin() + static_cast<std::ptrdiff_t>(from_cache_end * n));
  }
  if (end > have) {
    auto tail = sample_rows(specs_, corr_, std::max(begin, have), end, seed_, stream_id_);
    out.insert(out.end(), tail.begin(), tail.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal-law helpers

double standard_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double standard_normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double standard_normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("standard_normal_icdf: p must lie in (0, 1)");
  if (p < 0.5) return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
  return kSqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double truncated_normal_icdf(double u, double mean, double std_dev, double lo, double hi) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("truncated_normal_icdf: u must lie in (0, 1)");
  if (!(std_dev > 0.0) || !(lo < hi)) throw std::invalid_argument("truncated_normal_icdf: invalid parameters");
  const double a = (lo - mean) / std_dev;
  const double b = (hi - mean) / std_dev;
  double x = 0.0;
  if (a >= 0.0) {
    // Both ends in the upper tail: work with survival probabilities.
    const double qa = standard_normal_sf(a);
    const double qb = standard_normal_sf(b);
    if (!(qa > qb)) throw std::invalid_argument("truncated_normal_icdf: zero-mass interval");
    const double q = qa - u * (qa - qb);
    x = -standard_normal_icdf(q);
  } else {
    const double pa = standard_normal_cdf(a);
    const double pb = standard_normal_cdf(b);
    const double mass = pb - pa;
    if (!(mass > 0.0)) throw std::invalid_argument("truncated_normal_icdf: zero-mass interval");
    const double p = pa + u * mass;
    if (p <= 0.5) {
      x = standard_normal_icdf(p);
    } else {
      const double q = standard_normal_sf(b) + (1.0 - u) * mass;
      x = -standard_normal_icdf(q);
    }
  }
  return std::clamp(mean + std_dev * x, lo, hi);
}

double distribution_cdf(const DistributionSpec& spec, double x) {
  switch (spec.kind) {
    case DistributionKind::Normal:
      return standard_normal_cdf((x - spec.mean) / spec.std_dev);
    case DistributionKind::LogNormal:
      if (x <= 0.0) return 0.0;
      return standard_normal_cdf((std::log(x) - spec.log_mean()) / spec.log_std_dev());
    case DistributionKind::TruncatedNormal: {
      const auto [lo, hi] = *spec.truncation;
      if (x <= lo) return 0.0;
      if (x >= hi) return 1.0;
      const double a = standard_normal_cdf((lo - spec.mean) / spec.std_dev);
      const double b = standard_normal_cdf((hi - spec.mean) / spec.std_dev);
      return (standard_normal_cdf((x - spec.mean) / spec.std_dev) - a) / (b - a);
    }
  }
  return 0.0;
}

}  // namespace riskopt

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace riskopt {

enum class DistributionKind { Normal, LogNormal, TruncatedNormal };

struct Interval {
  double lo;
  double hi;
};

/// Marginal law of one random input. Mean and std_dev are always those of the
/// variable itself; for LogNormal the log-space parameters are derived by
/// moment matching. Truncation bounds are in natural units.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::Normal;
  double mean = 0.0;
  double std_dev = 1.0;
  std::optional<Interval> truncation;

  static DistributionSpec normal(double mean, double std_dev);
  static DistributionSpec lognormal(double mean, double std_dev);
  static DistributionSpec truncated_normal(double mean, double std_dev, double lo, double hi);

  void validate() const;

  /// Location/scale of the underlying normal for LogNormal.
  double log_mean() const;
  double log_std_dev() const;
};

/// Gaussian-copula correlation over the latent normals of every component.
/// An empty spec means independent components.
class CorrelationSpec {
 public:
  CorrelationSpec() = default;
  /// Row-major n x n matrix.
  CorrelationSpec(std::size_t n, std::vector<double> matrix);

  static CorrelationSpec identity(std::size_t n);
  CorrelationSpec& set(std::size_t i, std::size_t j, double rho);

  std::size_t dimension() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }
  bool is_identity() const;
  double operator()(std::size_t i, std::size_t j) const { return matrix_[i * n_ + j]; }

  /// Throws if the matrix is not a symmetric, unit-diagonal, PSD correlation.
  void validate() const;

  /// Symmetric square root S with S S^T = C (row-major n x n).
  std::vector<double> symmetric_root() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> matrix_;
};

/// m x n_z realizations, row-major. Immutable once built.
class RandomBatch {
 public:
  RandomBatch() = default;
  RandomBatch(std::size_t rows, std::size_t cols, std::vector<double> draws, std::uint64_t seed,
              std::uint64_t stream_id);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::span<const double> row(std::size_t i) const { return {draws_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return draws_; }
  std::vector<double> column(std::size_t j) const;

  /// First `m` rows as a new batch (same seed/stream).
  RandomBatch prefix(std::size_t m) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> draws_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
};

/// Rows are generated in fixed chunks of this many rows, each chunk from its
/// own engine keyed by (seed, stream_id, chunk index).
inline constexpr std::size_t kSamplingChunkRows = 4096;

/// Draws rows [row_begin, row_end) of the stream defined by (seed, stream_id).
/// Row r is identical no matter which range it was requested in.
std::vector<double> sample_rows(std::span<const DistributionSpec> specs, const CorrelationSpec& corr,
                                std::size_t row_begin, std::size_t row_end, std::uint64_t seed,
                                std::uint64_t stream_id, unsigned threads = 1);

RandomBatch sample_batch(std::span<const DistributionSpec> specs, const CorrelationSpec& corr, std::size_t m,
                         std::uint64_t seed, std::uint64_t stream_id, unsigned threads = 1);

/// Growable view of one (seed, stream) sequence that caches generated rows so
/// repeated evaluations at different designs reuse the same draws.
class SampleStream {
 public:
  SampleStream(std::vector<DistributionSpec> specs, CorrelationSpec corr, std::uint64_t seed,
               std::uint64_t stream_id, std::size_t cache_limit_rows = std::size_t{1} << 24);

  std::size_t cols() const noexcept { return specs_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Rows [begin, end). Cached rows are returned from memory; rows past the
  /// cache limit are regenerated on each request. Thread-safe.
  std::vector<double> rows(std::size_t begin, std::size_t end) const;

 private:
  std::vector<DistributionSpec> specs_;
  CorrelationSpec corr_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::size_t cache_limit_;
  mutable std::mutex mutex_;
  mutable std::vector<double> cache_;
};

double standard_normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x.
double standard_normal_sf(double x);
double standard_normal_icdf(double p);
double standard_normal_pdf(double x);

/// Inverse CDF of N(mean, std_dev^2) restricted to [lo, hi]; u in (0, 1).
double truncated_normal_icdf(double u, double mean, double std_dev, double lo, double hi);

/// Analytic CDF of a marginal spec.
double distribution_cdf(const DistributionSpec& spec, double x);

}  // namespace riskopt

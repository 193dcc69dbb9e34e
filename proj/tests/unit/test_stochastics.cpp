#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "riskopt/stochastics.hpp"

using namespace riskopt;

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_density(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * kPi));
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson quadrature, independent of the library's CDF code.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
double ks_critical_1pct(std::size_t m) { return 1.6276 / std::sqrt(static_cast<double>(m)); }

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / (v.size() - 1));
}

std::vector<DistributionSpec> mixed_specs() {
  return {DistributionSpec::normal(500, 100), DistributionSpec::normal(2000, 400), DistributionSpec::lognormal(5, 0.5),
          DistributionSpec::truncated_normal(5, 0.5, 3, 6)};
}

CorrelationSpec mixed_corr() { return CorrelationSpec::identity(4).set(0, 1, 0.5); }

}  // namespace

TEST_CASE("standard normal: moments within 3/sqrt(m)") {
  const std::vector<DistributionSpec> specs{DistributionSpec::normal(0, 1)};
  const std::size_t m = 200000;
  const auto x = sample_batch(specs, {}, m, 11, 1).column(0);
  CHECK(std::abs(mean_of(x)) < 3.0 / std::sqrt(double(m)));
  CHECK(std::abs(sd_of(x) - 1.0) < 3.0 / std::sqrt(double(m)));
}

TEST_CASE("correlated F, M: Pearson correlation 0.5") {
  const std::vector<DistributionSpec> specs{DistributionSpec::normal(500, 100), DistributionSpec::normal(2000, 400)};
  const auto batch = sample_batch(specs, CorrelationSpec::identity(2).set(0, 1, 0.5), 1000000, 3, 7, 4);
  const auto f = batch.column(0);
  const auto m = batch.column(1);
  const double mf = mean_of(f), mm = mean_of(m);
  double sff = 0, smm = 0, sfm = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    sff += (f[i] - mf) * (f[i] - mf);
    smm += (m[i] - mm) * (m[i] - mm);
    sfm += (f[i] - mf) * (m[i] - mm);
  }
  CHECK(std::abs(sfm / std::sqrt(sff * smm) - 0.5) < 0.01);
}

TEST_CASE("lognormal: log-space parameters reproduce the variable-space moments") {
  const auto spec = DistributionSpec::lognormal(5, 0.5);
  // Brute-force integration of the lognormal density in log space.
  const double mu = spec.log_mean(), s = spec.log_std_dev();
  const double lo = mu - 12 * s, hi = mu + 12 * s;
  const double m1 = integrate([&](double y) { return std::exp(y) * normal_density(y, mu, s); }, lo, hi);
  const double m2 = integrate([&](double y) { return std::exp(2 * y) * normal_density(y, mu, s); }, lo, hi);
  CHECK(m1 == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(std::sqrt(m2 - m1 * m1) == doctest::Approx(0.5).epsilon(1e-8));

  const std::vector<DistributionSpec> specs{spec};
  const auto x = sample_batch(specs, {}, 1000000, 5, 2, 2).column(0);
  CHECK(std::abs(mean_of(x) - 5.0) < 0.01);
  CHECK(std::abs(sd_of(x) - 0.5) < 0.01);
}

TEST_CASE("truncated normal icdf: examples") {
  CHECK(std::abs(truncated_normal_icdf(0.5, 0, 1, -4, 4)) < 1e-9);
  CHECK(truncated_normal_icdf(1e-15, 0, 1, -4, 4) == doctest::Approx(-4.0).epsilon(1e-6));
  CHECK(truncated_normal_icdf(1 - 1e-15, 0, 1, -4, 4) == doctest::Approx(4.0).epsilon(1e-6));

  const double x = truncated_normal_icdf(0.5, 0, 0.1, -0.4, 0.2);
  CHECK(x > -0.4);
  CHECK(x < 0.2);
  CHECK(x < 0.0);

  // Root of the quadrature-based truncated CDF.
  auto cdf = [](double v) {
    const auto dens = [](double y) { return normal_density(y, 0, 0.1); };
    return integrate(dens, -0.4, v) / integrate(dens, -0.4, 0.2);
  };
  double a = -0.4, b = 0.2;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (a + b);
    (cdf(mid) < 0.5 ? a : b) = mid;
  }
  CHECK(x == doctest::Approx(0.5 * (a + b)).epsilon(1e-9));

  CHECK_THROWS_AS(truncated_normal_icdf(0.0, 0, 1, -1, 1), std::domain_error);
  CHECK_THROWS_AS(truncated_normal_icdf(1.0, 0, 1, -1, 1), std::domain_error);
}

TEST_CASE("truncated normal icdf: strictly increasing and inside the interval") {
  for (auto [mu, sd, lo, hi] : {std::array{0.0, 1.0, -4.0, 2.0}, std::array{5.0, 0.1, 4.6, 5.2},
                                std::array{0.0, 1.0, 3.0, 5.0}, std::array{0.0, 1.0, -9.0, -7.0}}) {
    double prev = lo;
    for (int k = 1; k < 1000; ++k) {
      const double x = truncated_normal_icdf(k / 1000.0, mu, sd, lo, hi);
      CHECK(x >= lo);
      CHECK(x <= hi);
      CHECK(x > prev);
      prev = x;
    }
  }
}

TEST_CASE("marginals pass KS at the 1% level, m = 1e5") {
  const auto specs = mixed_specs();
  const std::size_t m = 100000;
  const auto batch = sample_batch(specs, mixed_corr(), m, 2024, 9, 2);
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto& spec = specs[j];
    const double d = ks_statistic(batch.column(j), [&](double v) { return distribution_cdf(spec, v); });
    CAPTURE(j);
    CHECK(d < ks_critical_1pct(m));
  }

  // The fin perturbations.
  std::vector<DistributionSpec> fin;
  for (int i = 0; i < 5; ++i) fin.push_back(DistributionSpec::truncated_normal(0, 0.1, -0.4, 0.2));
  fin.push_back(DistributionSpec::truncated_normal(0, 0.02, -0.08, 0.04));
  const auto fb = sample_batch(fin, {}, m, 77, 3, 2);
  for (std::size_t j = 0; j < fin.size(); ++j) {
    const auto col = fb.column(j);
    CHECK(*std::min_element(col.begin(), col.end()) >= fin[j].truncation->lo);
    CHECK(*std::max_element(col.begin(), col.end()) <= fin[j].truncation->hi);
    // Analytic truncated CDF from the untruncated normal CDF.
    const double sd = fin[j].std_dev;
    const double plo = standard_normal_cdf(fin[j].truncation->lo / sd);
    const double phi = standard_normal_cdf(fin[j].truncation->hi / sd);
    const double d = ks_statistic(col, [&](double v) { return (standard_normal_cdf(v / sd) - plo) / (phi - plo); });
    CHECK(d < ks_critical_1pct(m));
  }
}

TEST_CASE("batches are bit-identical across thread counts and row ranges") {
  const auto specs = mixed_specs();
  const auto corr = mixed_corr();
  const std::size_t m = 3 * kSamplingChunkRows + 123;
  const auto ref = sample_batch(specs, corr, m, 42, 5, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    const auto other = sample_batch(specs, corr, m, 42, 5, threads);
    CHECK(std::equal(ref.data().begin(), ref.data().end(), other.data().begin(), other.data().end()));
  }
  CHECK(sample_batch(specs, corr, m, 42, 5, 1).data()[17] == ref.data()[17]);

  const auto mid = sample_rows(specs, corr, 5000, 9000, 42, 5, 3);
  CHECK(std::equal(mid.begin(), mid.end(), ref.data().begin() + 5000 * specs.size()));

  const auto prefix = ref.prefix(100);
  const auto small = sample_batch(specs, corr, 100, 42, 5);
  CHECK(std::equal(prefix.data().begin(), prefix.data().end(), small.data().begin(), small.data().end()));

  SampleStream stream(specs, corr, 42, 5, 8192);
  const auto cached = stream.rows(10, 20);
  const auto beyond = stream.rows(9000, 9010);
  CHECK(std::equal(cached.begin(), cached.end(), ref.data().begin() + 10 * specs.size()));
  CHECK(std::equal(beyond.begin(), beyond.end(), ref.data().begin() + 9000 * specs.size()));
}

TEST_CASE("different seeds or streams give different draws") {
  const auto specs = mixed_specs();
  const auto a = sample_batch(specs, {}, 10, 1, 1);
  const auto b = sample_batch(specs, {}, 10, 2, 1);
  const auto c = sample_batch(specs, {}, 10, 1, 2);
  CHECK(a.data()[0] != b.data()[0]);
  CHECK(a.data()[0] != c.data()[0]);
}

TEST_CASE("invalid specifications are rejected") {
  CHECK_THROWS_AS(DistributionSpec::normal(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::lognormal(-1, 1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::truncated_normal(0, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::truncated_normal(0, 1, 50, 60), std::invalid_argument);
  CHECK_THROWS_AS(CorrelationSpec(2, {1, 0.5, 0.4, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CorrelationSpec(3, {1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1}).validate(), std::invalid_argument);
  const std::vector<DistributionSpec> none;
  CHECK_THROWS_AS(sample_batch(none, {}, 10, 1, 1), std::invalid_argument);
  const std::vector<DistributionSpec> one{DistributionSpec::normal(0, 1)};
  CHECK_THROWS_AS(sample_batch(one, {}, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_batch(one, CorrelationSpec::identity(2), 10, 1, 1), std::invalid_argument);
}

TEST_CASE("correlation root reproduces the matrix") {
  const auto c = CorrelationSpec::identity(3).set(0, 1, 0.5).set(1, 2, -0.3);
  c.validate();
  const auto s = c.symmetric_root();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0;
      for (int k = 0; k < 3; ++k) v += s[i * 3 + k] * s[j * 3 + k];
      CHECK(v == doctest::Approx(c(i, j)).epsilon(1e-12));
    }
}

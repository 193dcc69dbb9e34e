#include "riskopt/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskopt {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw std::invalid_argument("Box: bound vectors differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
      throw std::invalid_argument("Box: lower bound exceeds upper bound");
  }
}

Box Box::unbounded(std::size_t n) { return Box(std::vector<double>(n, -kInf), std::vector<double>(n, kInf)); }

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

void Box::project(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

std::vector<double> Box::center() const {
  std::vector<double> c(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const bool lo = std::isfinite(lower[i]);
    const bool hi = std::isfinite(upper[i]);
    if (lo && hi) c[i] = 0.5 * (lower[i] + upper[i]);
    else if (lo) c[i] = lower[i];
    else if (hi) c[i] = upper[i];
    else c[i] = 0.0;
  }
  return c;
}

Box Box::append(const Box& other) const {
  Box out = *this;
  out.lower.insert(out.lower.end(), other.lower.begin(), other.lower.end());
  out.upper.insert(out.upper.end(), other.upper.begin(), other.upper.end());
  return out;
}

void DesignVector::validate() const {
  if (values.size() != bounds.size()) throw std::invalid_argument("DesignVector: dimension mismatch with bounds");
  if (!bounds.contains(values)) throw std::invalid_argument("DesignVector: values outside bounds");
}

}  // namespace riskopt

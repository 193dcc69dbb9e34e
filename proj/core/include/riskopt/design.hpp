#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace riskopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box; infinite entries mean the side is unbounded.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  static Box unbounded(std::size_t n);

  std::size_t size() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  void project(std::span<double> x) const;
  std::vector<double> center() const;

  /// Concatenates two boxes (design box followed by an auxiliary box).
  Box append(const Box& other) const;
};

struct DesignVector {
  std::vector<double> values;
  Box bounds;

  void validate() const;
};

}  // namespace riskopt

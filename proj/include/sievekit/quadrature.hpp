#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sievekit {

/// Chain-of-intervals integration domain in up to 6 variables: the bounds
/// of variable i may depend on variables 0..i-1. Empty slices (lower >=
/// upper) contribute 0. hull_lo/hull_hi give a static bounding box used by
/// the Monte Carlo cross-check.
struct NestedDomain {
  int dim = 0;
  std::vector<std::function<double(const double*)>> lower;
  std::vector<std::function<double(const double*)>> upper;
  std::array<double, 6> hull_lo{};
  std::array<double, 6> hull_hi{};

  /// Fixed-box helper; per-variable bounds can be replaced afterwards.
  static NestedDomain box(int dim, const std::array<double, 6>& lo,
                          const std::array<double, 6>& hi);
};

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::uint64_t evaluations = 0;
};

/// Raised when the adaptive pass cannot meet the tolerance; carries the
/// best estimate so far.
struct ToleranceNotMet : std::runtime_error {
  IntegralResult best;
  explicit ToleranceNotMet(const IntegralResult& r)
      : std::runtime_error("integrate_nested: tolerance not met"), best(r) {}
};

using Integrand = std::function<double(const double*)>;

/// Iterated 1-D adaptive Gauss-Kronrod quadrature, innermost variable last.
/// Deterministic: fixed subdivision rule, fixed-order reduction.
IntegralResult integrate_nested(const NestedDomain& domain, const Integrand& f, double rel_tol);

/// Bounding-box rejection Monte Carlo with a seeded generator; error
/// estimate is the sample standard error. Cross-check only.
IntegralResult integrate_mc(const NestedDomain& domain, const Integrand& f,
                            std::uint64_t samples, std::uint64_t seed);

}  // namespace sievekit

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sievekit/rational.hpp"

namespace sievekit {

enum class WeightVariant { Plus, Minus, Star };

/// Desk-scale parameters for the star variant: D = floor(x^(7/12+eta)),
/// D0 = floor(x^(7/12)), with all threshold comparisons p ? x^(a/b) done as
/// exact integer power comparisons p^b ? x^a.
struct StarScale {
  std::int64_t x = 0;
  Rational eta;
};

/// Integer-scale sieve weights: weight(d) = mu(d) for squarefree d | P(z)
/// in the support set, 0 otherwise. Lookups are concurrency-safe after
/// construction.
struct WeightTable {
  std::int64_t level_D = 0;
  std::int64_t z = 0;
  WeightVariant variant = WeightVariant::Plus;
  bool include_two = true;  // sieve over all primes < z, or odd primes only
  std::optional<StarScale> star;
  std::vector<std::int64_t> primes;          // sieving primes < z
  std::map<std::int64_t, int> entries;       // support only; absent = weight 0

  int weight(std::int64_t d) const;
  std::vector<std::int64_t> support() const;
};

/// Enumerates squarefree d | P(z), d <= D and tags support membership.
/// For the star variant pass StarScale (D is derived from it).
/// Throws on table sizes past the desk-scale limit.
WeightTable build_weights(std::int64_t D, std::int64_t z, WeightVariant variant,
                          bool include_two = true,
                          const std::optional<StarScale>& star = std::nullopt);

/// 1_{n=1} <= sum_{d|n} weight(d), for n | P(z).
bool check_pointwise_inequality(std::int64_t n, const WeightTable& w);

/// prod_{p|n}(1 - h(p)) <= sum_{d|n} weight(d) h(d) for multiplicative h
/// with 0 <= h(p) <= 1, evaluated in exact rational arithmetic.
bool check_multiplicative_inequality(std::int64_t n, const std::map<std::int64_t, Rational>& h,
                                     const WeightTable& w);

struct SiftResult {
  std::int64_t exact = 0;  // #{p <= X : p+2 coprime to P(z)}
  std::int64_t upper = 0;  // sum_d weight(d) |A_d|
};

/// Sifts A = {p+2 : p <= X} by the table's prime set. For upper-bound
/// tables (plus/star) the contract exact <= upper holds.
SiftResult toy_sift(std::int64_t X, const WeightTable& w);

}  // namespace sievekit

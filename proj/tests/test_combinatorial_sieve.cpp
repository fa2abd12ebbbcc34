#include <doctest.h>

#include <cstdint>
#include <map>
#include <vector>

#include "sievekit/combinatorial_sieve.hpp"

using namespace sievekit;

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::int64_t> divisors_of(std::int64_t n, const std::vector<std::int64_t>& primes) {
  std::vector<std::int64_t> fs;
  for (auto p : primes)
    if (n % p == 0) fs.push_back(p);
  std::vector<std::int64_t> divs;
  for (std::size_t mask = 0; mask < (std::size_t{1} << fs.size()); ++mask) {
    std::int64_t d = 1;
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (mask & (std::size_t{1} << i)) d *= fs[i];
    divs.push_back(d);
  }
  return divs;
}

}  // namespace

TEST_CASE("plus support at D=100, z=10 is {1,2,3,6}") {
  const WeightTable w = build_weights(100, 10, WeightVariant::Plus);
  CHECK(w.support() == std::vector<std::int64_t>{1, 2, 3, 6});
  CHECK(w.weight(1) == 1);
  CHECK(w.weight(2) == -1);
  CHECK(w.weight(6) == 1);
  CHECK(w.weight(5) == 0);
  CHECK(w.weight(30) == 0);
}

TEST_CASE("minus support at D=100, z=10") {
  const WeightTable w = build_weights(100, 10, WeightVariant::Minus);
  // 1, every single prime below sqrt(100), and the even-l pairs
  CHECK(w.support() == std::vector<std::int64_t>{1, 2, 3, 5, 6, 7, 10, 14});
}

TEST_CASE("z=2 leaves only d=1") {
  const WeightTable w = build_weights(1000, 2, WeightVariant::Plus);
  CHECK(w.support() == std::vector<std::int64_t>{1});
}

TEST_CASE("build_weights argument validation") {
  CHECK_THROWS_AS(build_weights(100, 200, WeightVariant::Plus), std::invalid_argument);
  CHECK_THROWS_AS(build_weights(100, 10, WeightVariant::Star), std::invalid_argument);
}

TEST_CASE("pointwise inequality examples") {
  const WeightTable w = build_weights(100, 10, WeightVariant::Plus);
  CHECK(check_pointwise_inequality(1, w));
  CHECK(check_pointwise_inequality(210, w));  // 1 - 1 - 1 + 1 = 0 >= 0
  CHECK_THROWS_AS(check_pointwise_inequality(11, w), std::invalid_argument);
}

TEST_CASE("sandwich at integer scale for all n | P(z)") {
  for (std::int64_t D : {100, 1000}) {
    for (std::int64_t z : {10, 30}) {
      const WeightTable plus = build_weights(D, z, WeightVariant::Plus);
      const WeightTable minus = build_weights(D, z, WeightVariant::Minus);
      const auto& primes = plus.primes;
      int lower_violations = 0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << primes.size()); ++mask) {
        std::int64_t n = 1;
        for (std::size_t i = 0; i < primes.size(); ++i)
          if (mask & (std::size_t{1} << i)) n *= primes[i];
        REQUIRE(check_pointwise_inequality(n, plus));
        // lower side: sum of minus weights over divisors <= 1_{n=1}
        long long lower = 0;
        for (auto d : divisors_of(n, primes)) lower += minus.weight(d);
        if (lower > (n == 1 ? 1 : 0)) ++lower_violations;
      }
      if (z * z <= D) {
        // s = log D / log z >= 2: the lower weights are a genuine sieve
        REQUIRE(lower_violations == 0);
      } else {
        // z above sqrt(D): primes in (sqrt(D), z) leave the D- support via
        // the head condition and the lower inequality degenerates; report
        WARN_MESSAGE(lower_violations == 0,
                     "lower sandwich violated for z > sqrt(D) (expected degeneracy): D="
                         << D << " z=" << z << " count=" << lower_violations);
      }
    }
  }
}

TEST_CASE("multiplicative inequality") {
  const WeightTable w = build_weights(1000, 30, WeightVariant::Plus);
  std::map<std::int64_t, Rational> h0, h1, hr;
  for (auto p : w.primes) {
    h0[p] = 0;
    h1[p] = 1;
  }
  std::int64_t n = 1;
  for (auto p : w.primes) n *= p;
  CHECK(check_multiplicative_inequality(n, h0, w));  // 1 <= 1
  CHECK(check_multiplicative_inequality(n, h1, w));  // reduces to pointwise
  CHECK(check_multiplicative_inequality(1, h1, w));
  std::uint64_t rng = 3;
  for (int trial = 0; trial < 1000; ++trial) {
    for (auto p : w.primes) hr[p] = Rational(static_cast<long>(splitmix(rng) % 1001), 1000);
    std::int64_t m = 1;
    for (auto p : w.primes)
      if (splitmix(rng) & 1) m *= p;
    REQUIRE(check_multiplicative_inequality(m, hr, w));
  }
  std::map<std::int64_t, Rational> bad = h0;
  bad[3] = Rational(3, 2);
  CHECK_THROWS_AS(check_multiplicative_inequality(3, bad, w), std::invalid_argument);
}

TEST_CASE("star support sits between plus levels") {
  const StarScale sc{1000000, Rational(1, 204)};
  const WeightTable star = build_weights(0, 20, WeightVariant::Star, true, sc);
  // star level D = floor(x^(7/12+eta)); inner level D0 = floor(x^(7/12))
  const WeightTable outer = build_weights(star.level_D, 20, WeightVariant::Plus);
  std::int64_t d0 = 1;
  {
    // floor(x^(7/12)) by exact power comparison (d0+1)^12 <= x^7
    BigInt rhs = 1;
    for (int i = 0; i < 7; ++i) rhs *= sc.x;
    for (;;) {
      BigInt lhs = 1;
      for (int i = 0; i < 12; ++i) lhs *= (d0 + 1);
      if (lhs <= rhs) ++d0;
      else break;
    }
  }
  CHECK(d0 < star.level_D);
  const WeightTable inner = build_weights(d0, 20, WeightVariant::Plus);
  for (auto d : inner.support()) REQUIRE(star.weight(d) == inner.weight(d));
  for (auto d : star.support()) REQUIRE(outer.weight(d) == star.weight(d));
}

TEST_CASE("toy sift") {
  // z=3 with odd sieving primes: P(z) = 1, both sides count pi(X)
  const WeightTable w3 = build_weights(100, 3, WeightVariant::Plus, false);
  const SiftResult r3 = toy_sift(10000, w3);
  CHECK(r3.exact == 1229);  // pi(10^4)
  CHECK(r3.upper == 1229);

  const WeightTable w10 = build_weights(100, 10, WeightVariant::Plus, false);
  const SiftResult r10 = toy_sift(100000, w10);
  CHECK(r10.exact <= r10.upper);

  const WeightTable w31 = build_weights(10000, 31, WeightVariant::Plus, false);
  const SiftResult r31 = toy_sift(1000000, w31);
  CHECK(r31.exact <= r31.upper);

  // exploratory only: higher level should not loosen the bound
  const WeightTable w31b = build_weights(100, 31, WeightVariant::Plus, false);
  const SiftResult r31b = toy_sift(1000000, w31b);
  WARN_MESSAGE(r31.upper <= r31b.upper, "upper bound not monotone in D (finding, not a failure)");
}

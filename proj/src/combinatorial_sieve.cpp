#include "sievekit/combinatorial_sieve.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace sievekit {

namespace {

constexpr std::size_t kMaxEntries = 4'000'000;

std::vector<std::int64_t> primes_below(std::int64_t z, bool include_two) {
  std::vector<std::int64_t> out;
  if (z <= 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(z), false);
  for (std::int64_t p = 2; p < z; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    if (p != 2 || include_two) out.push_back(p);
    for (std::int64_t m = p * p; m < z; m += p) composite[static_cast<std::size_t>(m)] = true;
  }
  return out;
}

// p ? x^(num/den): exact via p^den ? x^num
int cmp_power(std::int64_t p, std::int64_t x, const Rational& e) {
  const BigInt num = numerator(e), den = denominator(e);
  BigInt lhs = 1, rhs = 1;
  for (BigInt i = 0; i < den; ++i) lhs *= p;
  for (BigInt i = 0; i < num; ++i) rhs *= x;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

std::int64_t floor_power(std::int64_t x, const Rational& e) {
  // floor(x^(num/den)) by binary search on t^den <= x^num
  const BigInt num = numerator(e), den = denominator(e);
  BigInt rhs = 1;
  for (BigInt i = 0; i < num; ++i) rhs *= x;
  std::int64_t lo = 1, hi = x;  // e < 1 in all uses
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    BigInt lhs = 1;
    for (BigInt i = 0; i < den; ++i) lhs *= mid;
    if (lhs <= rhs) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

// factorization of d with primes descending (d squarefree over `primes`)
std::vector<std::int64_t> descending_factors(std::int64_t d,
                                             const std::vector<std::int64_t>& primes) {
  std::vector<std::int64_t> fs;
  for (auto p : primes)
    if (d % p == 0) fs.push_back(p);
  std::sort(fs.rbegin(), fs.rend());
  return fs;
}

// p1...p_(l-1) p_l^3 <= D checks, parity 1 = odd l, 0 = even l, with the
// D^(1/2) >= p1 head condition.
bool int_level_conditions(const std::vector<std::int64_t>& fs, std::int64_t D, int parity) {
  if (fs.empty()) return true;
  if (BigInt(fs[0]) * fs[0] > D) return false;
  BigInt prefix = 1;
  for (std::size_t l = 1; l <= fs.size(); ++l) {
    const BigInt pl(fs[l - 1]);
    if (static_cast<int>(l % 2) == parity) {
      if (prefix * pl * pl * pl > D) return false;
    }
    prefix *= pl;
  }
  return true;
}

bool int_in_P4(const std::vector<std::int64_t>& fs, std::int64_t x, const Rational& eta) {
  return cmp_power(fs[0], x, Rational(1, 6) + 2 * eta) < 0 &&
         cmp_power(fs[1] * fs[3], x, Rational(1, 4) - 3 * eta) > 0;
}

bool int_in_P61(const std::vector<std::int64_t>& fs, std::int64_t x, const Rational& eta) {
  return cmp_power(fs[0] * fs[1], x, Rational(1, 6) + 2 * eta) < 0 &&
         cmp_power(fs[1] * fs[2] * fs[3], x, Rational(1, 4) - 3 * eta) > 0 &&
         cmp_power(fs[5], x, Rational(1, 12) - 5 * eta) > 0;
}

bool int_in_P62(const std::vector<std::int64_t>& fs, std::int64_t x, const Rational& eta) {
  return cmp_power(fs[0], x, Rational(1, 6) + 2 * eta) < 0 &&
         cmp_power(fs[1] * fs[2], x, Rational(1, 6) + 2 * eta) < 0 &&
         cmp_power(fs[0] * fs[3], x, Rational(1, 4) - 3 * eta) > 0 &&
         cmp_power(fs[1] * fs[2] * fs[3], x, Rational(1, 4) - 3 * eta) > 0 &&
         cmp_power(fs[5], x, Rational(1, 12) - 5 * eta) > 0;
}

bool in_support(const std::vector<std::int64_t>& fs, const WeightTable& table, std::int64_t D0) {
  switch (table.variant) {
    case WeightVariant::Plus:
      return int_level_conditions(fs, table.level_D, 1);
    case WeightVariant::Minus:
      return int_level_conditions(fs, table.level_D, 0);
    case WeightVariant::Star: {
      if (int_level_conditions(fs, D0, 1)) return true;
      if (!int_level_conditions(fs, table.level_D, 1)) return false;
      const auto& sc = *table.star;
      if (fs.size() >= 4) {
        std::vector<std::int64_t> p4(fs.begin(), fs.begin() + 4);
        if (int_in_P4(p4, sc.x, sc.eta)) return false;
      }
      if (fs.size() >= 6) {
        std::vector<std::int64_t> p6(fs.begin(), fs.begin() + 6);
        if (int_in_P61(p6, sc.x, sc.eta) || int_in_P62(p6, sc.x, sc.eta)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

int WeightTable::weight(std::int64_t d) const {
  const auto it = entries.find(d);
  return it == entries.end() ? 0 : it->second;
}

std::vector<std::int64_t> WeightTable::support() const {
  std::vector<std::int64_t> out;
  out.reserve(entries.size());
  for (const auto& [d, w] : entries) out.push_back(d);
  return out;
}

WeightTable build_weights(std::int64_t D, std::int64_t z, WeightVariant variant, bool include_two,
                          const std::optional<StarScale>& star) {
  WeightTable table;
  table.variant = variant;
  table.include_two = include_two;
  std::int64_t D0 = 0;
  if (variant == WeightVariant::Star) {
    if (!star) throw std::invalid_argument("build_weights: star variant needs StarScale");
    table.star = star;
    table.level_D = floor_power(star->x, Rational(7, 12) + star->eta);
    D0 = floor_power(star->x, Rational(7, 12));
  } else {
    table.level_D = D;
  }
  if (!(z >= 2 && z <= table.level_D && table.level_D <= 10'000'000))
    throw std::invalid_argument("build_weights: need 2 <= z <= D <= 1e7");
  table.z = z;
  table.primes = primes_below(z, include_two);

  // DFS over products of distinct primes <= D, ascending prime order
  std::vector<std::pair<std::int64_t, int>> found = {{1, 1}};
  const std::vector<std::int64_t>& sorted = table.primes;  // ascending already
  std::size_t count = 1;

  std::function<void(std::int64_t, std::size_t, int)> dfs = [&](std::int64_t d, std::size_t from,
                                                                int mu) {
    for (std::size_t k = from; k < sorted.size(); ++k) {
      if (d > table.level_D / sorted[k]) break;
      const std::int64_t nd = d * sorted[k];
      if (++count > kMaxEntries)
        throw std::runtime_error("build_weights: table exceeds the desk-scale entry limit");
      found.emplace_back(nd, -mu);
      dfs(nd, k + 1, -mu);
    }
  };
  dfs(1, 0, 1);

  for (const auto& [d, mu] : found) {
    const auto fs = descending_factors(d, table.primes);
    if (in_support(fs, table, D0)) table.entries.emplace(d, mu);
  }
  return table;
}

bool check_pointwise_inequality(std::int64_t n, const WeightTable& w) {
  const auto fs = descending_factors(n, w.primes);
  std::int64_t residual = n;
  for (auto p : fs) residual /= p;
  if (residual != 1) throw std::invalid_argument("check_pointwise_inequality: n must divide P(z)");
  long long sum = 0;
  const std::size_t k = fs.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::int64_t d = 1;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (std::size_t{1} << i)) d *= fs[i];
    sum += w.weight(d);
  }
  return sum >= (n == 1 ? 1 : 0);
}

bool check_multiplicative_inequality(std::int64_t n, const std::map<std::int64_t, Rational>& h,
                                     const WeightTable& w) {
  const auto fs = descending_factors(n, w.primes);
  std::int64_t residual = n;
  for (auto p : fs) residual /= p;
  if (residual != 1)
    throw std::invalid_argument("check_multiplicative_inequality: n must divide P(z)");
  auto h_of = [&](std::int64_t p) {
    const auto it = h.find(p);
    if (it == h.end())
      throw std::invalid_argument("check_multiplicative_inequality: h missing a prime of n");
    if (it->second < 0 || it->second > 1)
      throw std::invalid_argument("check_multiplicative_inequality: h(p) must lie in [0,1]");
    return it->second;
  };

  Rational lhs = 1;
  for (auto p : fs) lhs *= 1 - h_of(p);
  Rational rhs = 0;
  const std::size_t k = fs.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::int64_t d = 1;
    Rational hd = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) {
        d *= fs[i];
        hd *= h_of(fs[i]);
      }
    }
    const int wd = w.weight(d);
    if (wd != 0) rhs += wd * hd;
  }
  return lhs <= rhs;
}

SiftResult toy_sift(std::int64_t X, const WeightTable& w) {
  if (!(X >= 2 && X <= 10'000'000)) throw std::invalid_argument("toy_sift: need 2 <= X <= 1e7");
  const std::size_t limit = static_cast<std::size_t>(X) + 3;
  std::vector<bool> composite(limit, false);
  for (std::size_t p = 2; p * p < limit; ++p) {
    if (composite[p]) continue;
    for (std::size_t m = p * p; m < limit; m += p) composite[m] = true;
  }
  auto is_prime = [&](std::int64_t v) {
    return v >= 2 && !composite[static_cast<std::size_t>(v)];
  };

  SiftResult out;
  for (std::int64_t p = 2; p <= X; ++p) {
    if (!is_prime(p)) continue;
    bool rough = true;
    for (auto q : w.primes) {
      if ((p + 2) % q == 0) {
        rough = false;
        break;
      }
    }
    if (rough) ++out.exact;
  }
  for (const auto& [d, wd] : w.entries) {
    // |A_d| = #{p <= X : d | p+2}
    std::int64_t count = 0;
    for (std::int64_t m = d; m <= X + 2; m += d)
      if (m - 2 <= X && is_prime(m - 2)) ++count;
    out.upper += wd * count;
  }
  return out;
}

}  // namespace sievekit

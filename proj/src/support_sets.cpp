#include "sievekit/support_sets.hpp"

#include <algorithm>
#include <stdexcept>

namespace sievekit {

ExponentTuple::ExponentTuple(std::vector<Rational> t) : exponents(std::move(t)) {
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] <= 0) throw std::invalid_argument("ExponentTuple: exponents must be positive");
    if (i > 0 && exponents[i] > exponents[i - 1])
      throw std::invalid_argument("ExponentTuple: exponents must be nonincreasing");
  }
}

Rational ExponentTuple::sum() const {
  Rational s = 0;
  for (const auto& t : exponents) s += t;
  return s;
}

ExponentTuple ExponentTuple::prefix(std::size_t len) const {
  ExponentTuple p;
  p.exponents.assign(exponents.begin(), exponents.begin() + static_cast<std::ptrdiff_t>(len));
  return p;
}

namespace {

// Shared scan over p_1...p_{l-1} p_l^k <= D conditions. parity: 1 = odd l,
// 0 = even l, -1 = every l.
bool level_conditions(const ExponentTuple& t, const Rational& theta, int parity, int k) {
  if (t.empty()) return true;
  if (2 * t[0] > theta) return false;  // p_1 <= D^(1/2)
  Rational prefix = 0;
  for (std::size_t l = 1; l <= t.r(); ++l) {
    const Rational& tl = t[l - 1];
    if (parity < 0 || static_cast<int>(l % 2) == parity) {
      if (prefix + k * tl > theta) return false;
    }
    prefix += tl;
  }
  return true;
}

const Rational kSeventhTwelfths(7, 12);

}  // namespace

bool in_D_plus(const ExponentTuple& t, const Rational& theta) {
  return level_conditions(t, theta, 1, 3);
}

bool in_D_minus(const ExponentTuple& t, const Rational& theta) {
  return level_conditions(t, theta, 0, 3);
}

bool in_D_well(const ExponentTuple& t, const Rational& theta) {
  return level_conditions(t, theta, -1, 2);
}

bool in_P4(const ExponentTuple& t, const Rational& eta) {
  if (t.r() != 4) throw std::invalid_argument("in_P4: tuple must have length 4");
  const Rational lo = Rational(1, 6) + 2 * eta;
  const Rational hi = Rational(1, 4) - 3 * eta;
  return t[0] < lo && t[1] + t[3] > hi;
}

bool in_P61(const ExponentTuple& t, const Rational& eta) {
  if (t.r() != 6) throw std::invalid_argument("in_P61: tuple must have length 6");
  const Rational lo = Rational(1, 6) + 2 * eta;
  const Rational hi = Rational(1, 4) - 3 * eta;
  const Rational p6 = Rational(1, 12) - 5 * eta;
  return t[0] + t[1] < lo && t[1] + t[2] + t[3] > hi && t[5] > p6;
}

bool in_P62(const ExponentTuple& t, const Rational& eta) {
  if (t.r() != 6) throw std::invalid_argument("in_P62: tuple must have length 6");
  const Rational lo = Rational(1, 6) + 2 * eta;
  const Rational hi = Rational(1, 4) - 3 * eta;
  const Rational p6 = Rational(1, 12) - 5 * eta;
  return t[0] < lo && t[1] + t[2] < lo && t[0] + t[3] > hi && t[1] + t[2] + t[3] > hi &&
         t[5] > p6;
}

bool in_D_star(const ExponentTuple& t, const Rational& eta) {
  if (in_D_plus(t, kSeventhTwelfths)) return true;
  if (!in_D_plus(t, kSeventhTwelfths + eta)) return false;
  if (t.r() >= 4 && in_P4(t.prefix(4), eta)) return false;
  if (t.r() >= 6 && (in_P61(t.prefix(6), eta) || in_P62(t.prefix(6), eta))) return false;
  return true;
}

Rational theta_max(const Rational& t) {
  if (t > Rational(1, 5)) return (2 - t) / 3;
  return (1 + t) / 2;
}

Rational theta_max3(const Rational& t1, const Rational& t2, const Rational& t3) {
  if (!(t1 >= t2 && t2 >= t3 && t3 > 0))
    throw std::invalid_argument("theta_max3: need t1 >= t2 >= t3 > 0");
  if (t1 > Rational(1, 5)) throw std::invalid_argument("theta_max3: need t1 <= 1/5");
  Rational best = (3 - t3) / 5;
  for (const Rational& s : {theta_max(t1), theta_max(t2), theta_max(t1 + t2 + t3),
                            theta_max(t1 + t2), theta_max(t1 + t3), theta_max(t2 + t3)}) {
    best = std::max(best, s);
  }
  return best;
}

bool in_vector_support(const std::vector<Rational>& D_exps, const Rational& theta,
                       const Rational& tau, VectorSupport variant) {
  const std::size_t r = D_exps.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (D_exps[i] <= 0) throw std::invalid_argument("in_vector_support: exponents must be positive");
    if (i > 0 && D_exps[i] > D_exps[i - 1])
      throw std::invalid_argument("in_vector_support: exponents must be nonincreasing");
  }
  if (r == 0) return true;

  if (variant == VectorSupport::Well) {
    Rational prefix = 0;
    for (std::size_t m = 1; m <= r; ++m) {
      if (prefix + 2 * D_exps[m - 1] >= theta) return false;
      prefix += D_exps[m - 1];
    }
    return true;
  }

  const Rational level = variant == VectorSupport::PlusOdd ? theta / (1 + tau) : theta;
  if (2 * D_exps[0] > theta) return false;  // D_1 <= sqrt(D)
  Rational prefix = 0;
  for (std::size_t m = 1; m <= r; ++m) {
    if (m % 2 == 1 && prefix + 3 * D_exps[m - 1] >= level) return false;
    prefix += D_exps[m - 1];
  }
  return true;
}

}  // namespace sievekit

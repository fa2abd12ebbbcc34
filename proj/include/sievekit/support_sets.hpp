#pragma once

#include <vector>

#include "sievekit/rational.hpp"

namespace sievekit {

/// Exponents t_i = log p_i / log x of d = p_1...p_r, sorted nonincreasing,
/// all strictly positive. The empty tuple stands for d = 1.
struct ExponentTuple {
  std::vector<Rational> exponents;

  ExponentTuple() = default;
  explicit ExponentTuple(std::vector<Rational> t);

  std::size_t r() const { return exponents.size(); }
  bool empty() const { return exponents.empty(); }
  const Rational& operator[](std::size_t i) const { return exponents[i]; }
  Rational sum() const;
  ExponentTuple prefix(std::size_t len) const;
};

/// Level/parameter bundle for the constrained factorization:
/// level D = x^theta, exceptional-set parameter eta, slack delta, and the
/// target bin A = x^A_exp.
struct LevelContext {
  Rational theta;
  Rational eta;
  Rational delta = 0;
  Rational A_exp;
};

// Membership in the standard support sets, in exponent space. Boundary
// equality counts as membership (the printed conditions are "<= D").
bool in_D_plus(const ExponentTuple& t, const Rational& theta);
bool in_D_minus(const ExponentTuple& t, const Rational& theta);
bool in_D_well(const ExponentTuple& t, const Rational& theta);

// The exceptional polytopes, as the bare printed inequalities (strict, no
// D+ membership re-imposed; callers intersect with D+ where needed).
// in_P4 requires r == 4, in_P61/in_P62 require r == 6.
bool in_P4(const ExponentTuple& t, const Rational& eta);
bool in_P61(const ExponentTuple& t, const Rational& eta);
bool in_P62(const ExponentTuple& t, const Rational& eta);

/// D* = D+(7/12) union { d in D+(7/12+eta) : no length-4/6 prefix lies in
/// P4 / P6 }.
bool in_D_star(const ExponentTuple& t, const Rational& eta);

/// Maximum level exponent theta admitting the key interval at t:
/// (2-t)/3 for t > 1/5, (1+t)/2 otherwise.
Rational theta_max(const Rational& t);

/// Three-prime refinement: max of (3-t3)/5 and theta_max over the single
/// and pairwise sums. Requires t1 >= t2 >= t3 > 0 and t1 <= 1/5.
Rational theta_max3(const Rational& t1, const Rational& t2, const Rational& t3);

enum class VectorSupport { PlusEven, PlusOdd, Well };

/// Membership of a vector (D_1,...,D_r) of box exponents in the vector
/// support sets; strict inequalities as printed. For PlusOdd the level is
/// shrunk to theta/(1+tau).
bool in_vector_support(const std::vector<Rational>& D_exps, const Rational& theta,
                       const Rational& tau, VectorSupport variant);

}  // namespace sievekit

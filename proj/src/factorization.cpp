#include "sievekit/factorization.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sievekit {

namespace {

const Rational kTheta0(7, 12);

Rational sum_over(const ExponentTuple& t, const std::vector<std::size_t>& idx) {
  Rational s = 0;
  for (auto i : idx) s += t[i - 1];
  return s;
}

void set_label(std::string* out, const char* label) {
  if (out) *out = label;
}

// Parameters of one run of the case analysis. eta_eff is 0 on the
// D+(x^(7/12)) branch of D* and eta on the enlarged branch; thetaL is the
// matching level exponent.
struct TreeCtx {
  const ExponentTuple& t;
  Rational thetaL;
  Rational eta_eff;
  Rational delta;
  Rational A;
  Rational lo, hi;    // key interval [1/6+2eta, 1/4-3eta]
  Rational cap2;      // D2 = D^2/x
  Rational cap3;      // D3 = x^(1-2delta)/(DA)
  Rational p6max;     // 1/12 - 5 eta

  TreeCtx(const ExponentTuple& tuple, Rational theta, Rational eta, Rational del, Rational a)
      : t(tuple),
        thetaL(std::move(theta)),
        eta_eff(std::move(eta)),
        delta(std::move(del)),
        A(std::move(a)) {
    lo = Rational(1, 6) + 2 * eta_eff;
    hi = Rational(1, 4) - 3 * eta_eff;
    cap2 = 2 * thetaL - 1;
    cap3 = 1 - 2 * delta - thetaL - A;
    p6max = Rational(1, 12) - 5 * eta_eff;
  }
};

// Places `todo` (ascending index order = descending exponents) into the A
// bin when it fits, else the C bin. The product invariant behind every use
// guarantees one of the two always fits for the callers below.
bool two_bin_place(const ExponentTuple& t, const std::vector<std::size_t>& todo,
                   const Rational& capA, const Rational& capC, Rational& a, Rational& c,
                   std::vector<std::size_t>& I1, std::vector<std::size_t>& I3) {
  for (auto i : todo) {
    const Rational& ti = t[i - 1];
    if (a + ti <= capA) {
      a += ti;
      I1.push_back(i);
    } else if (c + ti <= capC) {
      c += ti;
      I3.push_back(i);
    } else {
      return false;
    }
  }
  return true;
}

// Factorization with a prescribed middle part b: b must land in the key
// interval, the rest is split two-bin against capacities A and D/(Ab).
std::optional<FactorTriple> criterion_construct(const TreeCtx& ctx,
                                                const std::vector<std::size_t>& B) {
  const Rational b = sum_over(ctx.t, B);
  if (b < ctx.lo || b > ctx.hi) return std::nullopt;
  const Rational capC = ctx.thetaL - ctx.A - b;
  if (capC < 0) return std::nullopt;

  std::vector<std::size_t> todo;
  for (std::size_t i = 1; i <= ctx.t.r(); ++i)
    if (std::find(B.begin(), B.end(), i) == B.end()) todo.push_back(i);

  Rational a = 0, c = 0;
  std::vector<std::size_t> I1, I3;
  if (!two_bin_place(ctx.t, todo, ctx.A, capC, a, c, I1, I3)) return std::nullopt;
  FactorTriple out = make_triple(ctx.t, std::move(I1), B, std::move(I3));
  if (!check_JM_system(out.a_exp, out.b_exp, out.c_exp, ctx.A, ctx.delta)) return std::nullopt;
  return out;
}

// Greedy pass: append primes to three bins with capacities
// (A, D^2/x, x^(1-2delta)/(DA)); at a terminal index the middle bin is
// promoted into the key interval and the remainder re-split two-bin against
// (A, D2*D3/e2).
std::optional<FactorTriple> greedy_run(const TreeCtx& ctx, std::vector<std::size_t> I1,
                                       std::vector<std::size_t> I2, std::vector<std::size_t> I3,
                                       std::size_t first_free) {
  Rational d1 = sum_over(ctx.t, I1);
  Rational d2 = sum_over(ctx.t, I2);
  Rational d3 = sum_over(ctx.t, I3);
  if (d1 > ctx.A || d2 > ctx.cap2 || d3 > ctx.cap3) return std::nullopt;

  const std::size_t r = ctx.t.r();
  for (std::size_t j = first_free; j <= r; ++j) {
    const Rational& tj = ctx.t[j - 1];
    if (d1 + tj <= ctx.A) {
      d1 += tj;
      I1.push_back(j);
    } else if (d2 + tj <= ctx.cap2) {
      d2 += tj;
      I2.push_back(j);
    } else if (d3 + tj <= ctx.cap3) {
      d3 += tj;
      I3.push_back(j);
    } else {
      // terminal index: e2 = d2*p_j enters the key interval, the rest of
      // the product d1*d3*p_(j+1)...p_r re-splits against (A, D2*D3/e2)
      const Rational e2 = d2 + tj;
      if (e2 > ctx.hi) return std::nullopt;
      I2.push_back(j);
      const Rational capC = ctx.cap2 + ctx.cap3 - e2;
      std::vector<std::size_t> todo = I1;
      todo.insert(todo.end(), I3.begin(), I3.end());
      for (std::size_t l = j + 1; l <= r; ++l) todo.push_back(l);
      std::sort(todo.begin(), todo.end());
      Rational a = 0, c = 0;
      std::vector<std::size_t> J1, J3;
      if (!two_bin_place(ctx.t, todo, ctx.A, capC, a, c, J1, J3)) return std::nullopt;
      FactorTriple out = make_triple(ctx.t, std::move(J1), std::move(I2), std::move(J3));
      if (!check_JM_system(out.a_exp, out.b_exp, out.c_exp, ctx.A, ctx.delta))
        return std::nullopt;
      return out;
    }
  }
  FactorTriple out = make_triple(ctx.t, std::move(I1), std::move(I2), std::move(I3));
  if (!check_JM_system(out.a_exp, out.b_exp, out.c_exp, ctx.A, ctx.delta)) return std::nullopt;
  return out;
}

// Seeds {i, j} (exponents ti >= tj) into bins 1/3 for a greedy run:
// together into whichever bin holds the pair, else the larger prime into
// the larger bin and the smaller into the other.
bool seed_pair(const TreeCtx& ctx, std::size_t i, std::size_t j, std::vector<std::size_t>& I1,
               std::vector<std::size_t>& I3) {
  const Rational pair_sum = ctx.t[i - 1] + ctx.t[j - 1];
  if (pair_sum <= ctx.A) {
    I1 = {i, j};
    return true;
  }
  if (pair_sum <= ctx.cap3) {
    I3 = {i, j};
    return true;
  }
  const bool a_is_max = ctx.A >= ctx.cap3;
  const Rational& cap_max = a_is_max ? ctx.A : ctx.cap3;
  const Rational& cap_min = a_is_max ? ctx.cap3 : ctx.A;
  if (ctx.t[i - 1] > cap_max || ctx.t[j - 1] > cap_min) return false;
  if (a_is_max) {
    I1 = {i};
    I3 = {j};
  } else {
    I1 = {j};
    I3 = {i};
  }
  return true;
}

// Seeds a single index into bin 1 or 3.
bool seed_single(const TreeCtx& ctx, std::size_t i, std::vector<std::size_t>& I1,
                 std::vector<std::size_t>& I3) {
  if (ctx.t[i - 1] <= ctx.A) {
    I1 = {i};
    return true;
  }
  if (ctx.t[i - 1] <= ctx.cap3) {
    I3 = {i};
    return true;
  }
  return false;
}

[[noreturn]] void tree_bug(const char* where) {
  throw std::logic_error(std::string("factorization internal error at ") + where +
                         " (construction the proof guarantees has failed)");
}

bool p6_small(const TreeCtx& ctx) {
  return ctx.t.r() < 6 || ctx.t[5] <= ctx.p6max;
}

// Full case analysis of the D* factorization, run at one
// (thetaL, eta_eff) pair. Assumes t is in D+(thetaL) and, when eta_eff > 0,
// that no length-4/6 prefix lies in P4/P6.
FactorTriple dstar_tree(const TreeCtx& ctx, std::string* label) {
  const ExponentTuple& t = ctx.t;
  const std::size_t r = t.r();

  if (r == 0) {
    set_label(label, "trivial");
    return make_triple(t, {}, {}, {});
  }

  // CASE 1: p1 already in the key interval (t1 <= thetaL/3 < hi always).
  if (t[0] >= ctx.lo) {
    if (auto out = criterion_construct(ctx, {1})) {
      set_label(label, "case1");
      return *out;
    }
    tree_bug("case1");
  }

  if (r <= 3) {
    // all primes below the interval: a plain greedy pass suffices
    std::vector<std::size_t> I1, I2, I3;
    if (t[0] <= ctx.cap2) {
      I2 = {1};
    } else if (!seed_single(ctx, 1, I1, I3)) {
      tree_bug("small-greedy seed");
    }
    if (auto out = greedy_run(ctx, I1, I2, I3, 2)) {
      set_label(label, "small-greedy");
      return *out;
    }
    tree_bug("small-greedy");
  }

  const Rational p23 = t[1] + t[2];
  if (p23 >= ctx.lo && p23 <= ctx.hi) {
    if (auto out = criterion_construct(ctx, {2, 3})) {
      set_label(label, "reduce:p2p3");
      return *out;
    }
    tree_bug("reduce:p2p3");
  }

  if (p23 > ctx.hi) {
    // CASE 2
    const Rational p24 = t[1] + t[3];
    if (p24 >= ctx.lo && p24 <= ctx.hi) {
      if (auto out = criterion_construct(ctx, {2, 4})) {
        set_label(label, "case2:reduce:p2p4");
        return *out;
      }
      tree_bug("case2:reduce:p2p4");
    }
    if (p24 > ctx.hi)
      throw std::domain_error("factor_dstar case2: prefix lies in P4, not a D* element");
    const Rational p14 = t[0] + t[3];
    if (p14 >= ctx.lo) {
      if (auto out = criterion_construct(ctx, {1, 4})) {
        set_label(label, "case2:reduce:p1p4");
        return *out;
      }
      tree_bug("case2:reduce:p1p4");
    }
    if (!p6_small(ctx))
      throw std::domain_error("factor_dstar case2: p6 above x^(1/12-5eta)");
    std::vector<std::size_t> I1, I3;
    if (!seed_pair(ctx, 2, 3, I1, I3)) tree_bug("case2 seed");
    if (auto out = greedy_run(ctx, I1, {1, 4}, I3, 5)) {
      set_label(label, "case2:greedy");
      return *out;
    }
    tree_bug("case2:greedy");
  }

  // CASE 3: p1 < lo and p2p3 < lo
  const Rational p14 = t[0] + t[3];
  if (p14 >= ctx.lo && p14 <= ctx.hi) {
    if (auto out = criterion_construct(ctx, {1, 4})) {
      set_label(label, "case3:reduce:p1p4");
      return *out;
    }
    tree_bug("case3:reduce:p1p4");
  }

  if (p14 < ctx.lo) {
    // Subcase 3.1. The chain of p1p3 / p1p2 / p2p3p4 comparisons either
    // hands the tuple to a fixed-subproduct split or pins p6 below the width,
    // after which the greedy run with d2 = p2p3 finishes.
    auto greedy31 = [&](const char* lbl) -> FactorTriple {
      if (!p6_small(ctx))
        throw std::domain_error("factor_dstar case3.1: p6 above x^(1/12-5eta)");
      std::vector<std::size_t> I1, I3;
      const Rational pair_sum = t[0] + t[3];
      if (pair_sum <= ctx.A) {
        I1 = {1, 4};
      } else if (pair_sum <= ctx.cap3) {
        I3 = {1, 4};
      } else {
        tree_bug("case3.1 seed: p1p4 exceeds both free bins");
      }
      if (auto out = greedy_run(ctx, I1, {2, 3}, I3, 5)) {
        set_label(label, lbl);
        return *out;
      }
      tree_bug("case3.1:greedy");
    };

    if (r <= 5) return greedy31("case3.1:greedy");

    const Rational p13 = t[0] + t[2];
    if (p13 > ctx.hi) return greedy31("case3.1:greedy(p1p3)");
    if (p13 >= ctx.lo) {
      if (auto out = criterion_construct(ctx, {1, 3})) {
        set_label(label, "case3.1:reduce:p1p3");
        return *out;
      }
      tree_bug("case3.1:reduce:p1p3");
    }
    const Rational p12 = t[0] + t[1];
    if (p12 > ctx.hi) return greedy31("case3.1:greedy(p1p2)");
    if (p12 >= ctx.lo) {
      if (auto out = criterion_construct(ctx, {1, 2})) {
        set_label(label, "case3.1:reduce:p1p2");
        return *out;
      }
      tree_bug("case3.1:reduce:p1p2");
    }
    const Rational p234 = t[1] + t[2] + t[3];
    if (p234 < ctx.lo) return greedy31("case3.1:greedy(p234)");
    if (p234 <= ctx.hi) {
      if (auto out = criterion_construct(ctx, {2, 3, 4})) {
        set_label(label, "case3.1:reduce:p234");
        return *out;
      }
      tree_bug("case3.1:reduce:p234");
    }
    // p2p3p4 > hi with p1p2 < lo: excluded by P61 unless p6 is small
    return greedy31("case3.1:greedy(P61)");
  }

  // Subcase 3.2: p1p4 > hi
  const Rational p234 = t[1] + t[2] + t[3];
  if (p234 < ctx.lo) {
    if (!p6_small(ctx))
      throw std::domain_error("factor_dstar case3.2: p6 above x^(1/12-5eta)");
    std::vector<std::size_t> I1, I3;
    if (!seed_single(ctx, 1, I1, I3)) tree_bug("case3.2 single seed");
    if (auto out = greedy_run(ctx, I1, {2, 3, 4}, I3, 5)) {
      set_label(label, "case3.2:greedy(p234)");
      return *out;
    }
    tree_bug("case3.2:greedy(p234)");
  }
  if (p234 <= ctx.hi) {
    if (auto out = criterion_construct(ctx, {2, 3, 4})) {
      set_label(label, "case3.2:reduce:p234");
      return *out;
    }
    tree_bug("case3.2:reduce:p234");
  }
  // p2p3p4 > hi: excluded by P62 unless p6 is small
  if (!p6_small(ctx))
    throw std::domain_error("factor_dstar case3.2: prefix lies in P62, not a D* element");
  std::vector<std::size_t> I1, I3;
  if (!seed_pair(ctx, 1, 4, I1, I3)) tree_bug("case3.2 pair seed");
  if (auto out = greedy_run(ctx, I1, {2, 3}, I3, 5)) {
    set_label(label, "case3.2:greedy");
    return *out;
  }
  tree_bug("case3.2:greedy");
}

}  // namespace

FactorTriple make_triple(const ExponentTuple& t, std::vector<std::size_t> I1,
                         std::vector<std::size_t> I2, std::vector<std::size_t> I3) {
  FactorTriple out;
  out.I1 = std::move(I1);
  out.I2 = std::move(I2);
  out.I3 = std::move(I3);
  std::sort(out.I1.begin(), out.I1.end());
  std::sort(out.I2.begin(), out.I2.end());
  std::sort(out.I3.begin(), out.I3.end());
  std::vector<bool> seen(t.r(), false);
  std::size_t covered = 0;
  for (const auto* part : {&out.I1, &out.I2, &out.I3}) {
    for (auto i : *part) {
      if (i < 1 || i > t.r() || seen[i - 1])
        throw std::invalid_argument("make_triple: index sets must partition {1..r}");
      seen[i - 1] = true;
      ++covered;
    }
  }
  if (covered != t.r()) throw std::invalid_argument("make_triple: index sets must cover {1..r}");
  out.a_exp = sum_over(t, out.I1);
  out.b_exp = sum_over(t, out.I2);
  out.c_exp = sum_over(t, out.I3);
  return out;
}

bool check_program_system(const Rational& q1, const Rational& q2, const Rational& q3,
                          const Rational& n, const Rational& delta) {
  if (q1 < 0 || q2 < 0 || q3 < 0) throw std::invalid_argument("check_program_system: exponents must be >= 0");
  return q1 <= n - delta && 2 * n + q2 + 2 * q3 <= 1 - delta &&
         2 * n + q1 + 4 * q2 + 3 * q3 <= 2 - delta && n + q1 + 5 * q2 + 2 * q3 <= 2 - delta;
}

bool check_JM_system(const Rational& a, const Rational& b, const Rational& c,
                     const Rational& A_exp, const Rational& delta) {
  return a <= A_exp && 2 * A_exp + b + 2 * c <= 1 - 3 * delta &&
         2 * A_exp + a + 4 * b + 3 * c <= 2 - 3 * delta &&
         A_exp + a + 5 * b + 2 * c <= 2 - 2 * delta;
}

std::vector<Rational> jm_slacks(const Rational& a, const Rational& b, const Rational& c,
                                const Rational& A_exp, const Rational& delta) {
  return {A_exp - a, (1 - 3 * delta) - (2 * A_exp + b + 2 * c),
          (2 - 3 * delta) - (2 * A_exp + a + 4 * b + 3 * c),
          (2 - 2 * delta) - (A_exp + a + 5 * b + 2 * c)};
}

bool criterion_split(const ExponentTuple& t, const FactorTriple& split, const LevelContext& ctx) {
  (void)t;
  const Rational lo = Rational(1, 6) + 2 * ctx.eta;
  const Rational hi = Rational(1, 4) - 3 * ctx.eta;
  return split.a_exp <= ctx.A_exp && split.c_exp <= ctx.theta - ctx.A_exp - split.b_exp &&
         split.b_exp >= lo && split.b_exp <= hi;
}

FactorTriple greedy_factor(const ExponentTuple& t, const std::vector<std::size_t>& seed1,
                           const std::vector<std::size_t>& seed2,
                           const std::vector<std::size_t>& seed3, const LevelContext& ctx) {
  const std::size_t k = std::min<std::size_t>(4, t.r());
  std::vector<bool> seen(k, false);
  std::size_t covered = 0;
  for (const auto* part : {&seed1, &seed2, &seed3}) {
    for (auto i : *part) {
      if (i < 1 || i > k || seen[i - 1])
        throw std::invalid_argument("greedy_factor: seed must partition indices 1..min(4,r)");
      seen[i - 1] = true;
      ++covered;
    }
  }
  if (covered != k) throw std::invalid_argument("greedy_factor: seed must cover indices 1..min(4,r)");

  TreeCtx tree(t, ctx.theta, ctx.eta, ctx.delta, ctx.A_exp);
  if (sum_over(t, seed1) > tree.A || sum_over(t, seed2) > tree.cap2 ||
      sum_over(t, seed3) > tree.cap3)
    throw std::domain_error("greedy_factor: seed violates the capacity preconditions");
  auto out = greedy_run(tree, seed1, seed2, seed3, k + 1);
  if (!out)
    throw std::domain_error(
        "greedy_factor: greedy pass failed (capacity preconditions not met)");
  return *out;
}

FactorTriple factor_dstar(const ExponentTuple& t, const LevelContext& ctx,
                          std::string* case_label) {
  const Rational& eta = ctx.eta;
  const Rational& delta = ctx.delta;
  if (!(delta >= 0 && delta < Rational(1, 100000)))
    throw std::domain_error("factor_dstar: need 0 <= delta < 1e-5");
  if (!(eta > 0 && eta < Rational(1, 204) - 3 * delta))
    throw std::domain_error("factor_dstar: need 0 < eta < 1/204 - 3delta");
  if (!(ctx.A_exp >= delta && ctx.A_exp <= Rational(1, 3) - delta / 2))
    throw std::domain_error("factor_dstar: need delta <= A_exp <= 1/3 - delta/2");
  const Rational theta_eta = kTheta0 + eta - 50 * delta;
  if (ctx.theta != theta_eta)
    throw std::domain_error("factor_dstar: ctx.theta must equal 7/12 + eta - 50delta");

  // D* branch selection, levels shifted by -50delta:
  // the D+(x^(7/12)) part runs the tree with the eta = 0 interval, the
  // enlarged part with eta itself.
  const Rational theta0 = kTheta0 - 50 * delta;
  if (in_D_plus(t, theta0)) {
    TreeCtx tree(t, theta0, Rational(0), delta, ctx.A_exp);
    return dstar_tree(tree, case_label);
  }
  if (in_D_plus(t, theta_eta)) {
    const bool bad4 = t.r() >= 4 && in_P4(t.prefix(4), eta);
    const bool bad6 = t.r() >= 6 && (in_P61(t.prefix(6), eta) || in_P62(t.prefix(6), eta));
    if (!bad4 && !bad6) {
      TreeCtx tree(t, theta_eta, eta, delta, ctx.A_exp);
      return dstar_tree(tree, case_label);
    }
  }
  throw std::domain_error("factor_dstar: tuple is not in D*");
}

FactorTriple factor_dwell(const ExponentTuple& t, const LevelContext& ctx,
                          std::string* case_label) {
  const Rational eta = ctx.theta - kTheta0 + 50 * ctx.delta;
  if (!(eta > Rational(-1, 84) && eta < Rational(1, 60) - 30 * ctx.delta))
    throw std::domain_error("factor_dwell: level outside (-1/84, 1/60 - 30delta) range");
  if (!in_D_well(t, ctx.theta)) throw std::domain_error("factor_dwell: tuple not in D_well(theta)");
  TreeCtx tree(t, ctx.theta, eta, ctx.delta, ctx.A_exp);
  if (t.r() == 0) {
    set_label(case_label, "trivial");
    return make_triple(t, {}, {}, {});
  }
  if (t[0] > tree.hi) throw std::domain_error("factor_dwell: t1 above the key interval");

  // b | p1 p2 p3, b != p3, tried in a fixed order: prefixes first, then
  // the three remaining subproducts.
  struct Choice {
    std::vector<std::size_t> B;
    const char* label;
  };
  std::vector<Choice> choices = {{{1}, "prefix:p1"}, {{1, 2}, "prefix:p1p2"}};
  if (t.r() >= 3) {
    choices.push_back({{1, 2, 3}, "prefix:p1p2p3"});
    choices.push_back({{2, 3}, "bullet:p2p3"});
    choices.push_back({{1, 3}, "bullet:p1p3"});
  }
  if (t.r() >= 2) choices.push_back({{2}, "bullet:p2"});
  for (const auto& choice : choices) {
    if (choice.B.size() > t.r()) continue;
    const Rational b = sum_over(t, choice.B);
    if (b < tree.lo || b > tree.hi) continue;
    if (auto out = criterion_construct(tree, choice.B)) {
      set_label(case_label, choice.label);
      return *out;
    }
    tree_bug("factor_dwell criterion branch");
  }

  // greedy route: needs p3 at most the interval width
  if (t.r() >= 3 && t[2] > tree.p6max)
    throw std::domain_error("factor_dwell: hypotheses not met (no b in interval, p3 too large)");
  std::vector<std::size_t> I1, I2, I3;
  std::size_t first_free;
  if (t.r() >= 3) {
    I2 = {1, 3};
    if (sum_over(t, I2) > tree.cap2) throw std::domain_error("factor_dwell: d2 = p1p3 too large");
    if (!seed_single(tree, 2, I1, I3))
      throw std::domain_error("factor_dwell: p2 fits neither free bin");
    first_free = 4;
  } else {
    // r <= 2 with every subproduct below the interval: plain greedy pass
    if (t[0] <= tree.cap2) {
      I2 = {1};
    } else if (!seed_single(tree, 1, I1, I3)) {
      throw std::domain_error("factor_dwell: p1 fits no bin");
    }
    first_free = 2;
  }
  if (auto out = greedy_run(tree, I1, I2, I3, first_free)) {
    set_label(case_label, "greedy");
    return *out;
  }
  throw std::domain_error("factor_dwell: greedy route failed");
}

std::optional<FactorTriple> brute_force_factor(const ExponentTuple& t, const LevelContext& ctx) {
  if (t.r() > 20) throw std::invalid_argument("brute_force_factor: r must be <= 20");
  const std::size_t r = t.r();
  std::vector<int> assign(r, 0);
  const Rational one_minus_3d = 1 - 3 * ctx.delta;
  const Rational two_minus_3d = 2 - 3 * ctx.delta;
  const Rational two_minus_2d = 2 - 2 * ctx.delta;

  // depth-first over 3^r assignments with monotone pruning: every system
  // line only grows as exponents are added
  std::optional<FactorTriple> found;
  auto feasible = [&](const Rational& a, const Rational& b, const Rational& c) {
    return a <= ctx.A_exp && 2 * ctx.A_exp + b + 2 * c <= one_minus_3d &&
           2 * ctx.A_exp + a + 4 * b + 3 * c <= two_minus_3d &&
           ctx.A_exp + a + 5 * b + 2 * c <= two_minus_2d;
  };
  std::function<bool(std::size_t, Rational, Rational, Rational)> dfs =
      [&](std::size_t i, Rational a, Rational b, Rational c) -> bool {
    if (!feasible(a, b, c)) return false;
    if (i == r) {
      std::vector<std::size_t> I1, I2, I3;
      for (std::size_t k = 0; k < r; ++k) {
        if (assign[k] == 0) I1.push_back(k + 1);
        else if (assign[k] == 1) I2.push_back(k + 1);
        else I3.push_back(k + 1);
      }
      found = make_triple(t, std::move(I1), std::move(I2), std::move(I3));
      return true;
    }
    const Rational& ti = t[i];
    assign[i] = 0;
    if (dfs(i + 1, a + ti, b, c)) return true;
    assign[i] = 1;
    if (dfs(i + 1, a, b + ti, c)) return true;
    assign[i] = 2;
    if (dfs(i + 1, a, b, c + ti)) return true;
    return false;
  };
  dfs(0, 0, 0, 0);
  return found;
}

std::vector<Rational> a_exp_grid(const Rational& eta, const Rational& delta, int uniform_points) {
  const Rational a_min = delta;
  const Rational a_max = Rational(1, 3) - delta / 2;
  const Rational thetaL = kTheta0 + eta - 50 * delta;
  std::vector<Rational> grid;
  for (int i = 0; i < uniform_points; ++i)
    grid.push_back(a_min + (a_max - a_min) * i / (uniform_points - 1));
  // breakpoints appearing in the proof's min/max comparisons
  const std::vector<Rational> breaks = {
      (1 - 2 * delta - thetaL) / 2,
      Rational(1, 6) + 2 * eta,
      Rational(1, 4) - 3 * eta,
      Rational(1, 6) - 2 * eta - 64 * delta,
      Rational(1, 4) + eta - 16 * delta,
      Rational(1, 6) - 4 * eta - 2 * delta,
      Rational(1, 4) + 3 * eta,
      Rational(1, 12) + eta,
      Rational(1, 12) - 5 * eta,
      1 - 2 * delta - thetaL - (Rational(1, 6) + 2 * eta),
      1 - 2 * delta - thetaL - (Rational(1, 4) - 3 * eta),
  };
  for (const auto& b : breaks)
    if (b >= a_min && b <= a_max) grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t floor_toward(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt fl = n / d;
  if (n < 0 && fl * d != n) fl -= 1;
  return fl.convert_to<std::int64_t>();
}

}  // namespace

DstarSampler::DstarSampler(Rational eta, std::uint64_t seed, std::size_t max_r,
                           std::int64_t denom)
    : eta_(std::move(eta)), state_(seed ^ 0x5bd1e995u), max_r_(max_r), denom_(denom) {}

std::uint64_t DstarSampler::next_u64() { return splitmix64(state_); }

std::int64_t DstarSampler::uniform(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

ExponentTuple DstarSampler::next() {
  for (;;) {
    const std::size_t r = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(max_r_)));
    const Rational level = (next_u64() & 1) ? kTheta0 : kTheta0 + eta_;
    std::vector<Rational> exps;
    Rational prefix = 0;
    Rational prev = level;  // dummy upper bound for t1 before the odd-l cap
    bool ok = true;
    for (std::size_t l = 1; l <= r; ++l) {
      Rational bound = l == 1 ? level / 3 : prev;
      if (l % 2 == 1) bound = std::min(bound, (level - prefix) / 3);
      const std::int64_t hi_num = floor_toward(bound * denom_);
      if (hi_num < 1) {
        ok = false;
        break;
      }
      // occasional exactly-binding numerators to stress the boundaries
      const std::int64_t num = (next_u64() % 10 == 0) ? hi_num : uniform(1, hi_num);
      const Rational tl(num, denom_);
      exps.push_back(tl);
      prefix += tl;
      prev = tl;
    }
    if (!ok) continue;
    ExponentTuple t(std::move(exps));
    if (in_D_star(t, eta_)) return t;
  }
}

FuzzReport run_factor_fuzz(std::size_t samples, const Rational& eta, const Rational& delta,
                           std::uint64_t seed, std::size_t brute_subsample, unsigned threads) {
  const auto grid = a_exp_grid(eta, delta);
  const Rational theta = kTheta0 + eta - 50 * delta;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  // Fixed chunk layout independent of the worker count, so results only
  // depend on (samples, eta, delta, seed).
  const std::size_t chunks = 64;
  struct Chunk {
    std::size_t start = 0, count = 0;
    std::uint64_t seed = 0;
    FuzzReport rep;
  };
  std::vector<Chunk> work(chunks);
  std::size_t start = 0;
  std::uint64_t seq = seed;
  for (std::size_t c = 0; c < chunks; ++c) {
    work[c].start = start;
    work[c].count = samples / chunks + (c < samples % chunks ? 1 : 0);
    work[c].seed = splitmix64(seq);
    start += work[c].count;
  }
  const std::size_t brute_stride =
      brute_subsample ? std::max<std::size_t>(samples / brute_subsample, 1) : 0;

  auto run_chunk = [&](Chunk& chunk) {
    DstarSampler sampler(eta, chunk.seed);
    FuzzReport& rep = chunk.rep;
    for (std::size_t i = 0; i < chunk.count; ++i) {
      const std::size_t global = chunk.start + i;
      const ExponentTuple t = sampler.next();
      LevelContext ctx{theta, eta, delta, grid[global % grid.size()]};
      ++rep.samples;
      try {
        const FactorTriple triple = factor_dstar(t, ctx);
        if (!check_JM_system(triple.a_exp, triple.b_exp, triple.c_exp, ctx.A_exp, delta)) {
          ++rep.jm_failures;
        } else {
          ++rep.successes;
        }
      } catch (const std::exception& e) {
        ++rep.factor_errors;
        if (rep.first_counterexample.empty()) {
          std::ostringstream os;
          os << "tuple=(";
          for (std::size_t k = 0; k < t.r(); ++k) os << (k ? "," : "") << to_string(t[k]);
          os << ") A=" << to_string(ctx.A_exp) << " : " << e.what();
          rep.first_counterexample = os.str();
        }
        continue;
      }
      if (brute_stride && global % brute_stride == 0) {
        ++rep.brute_checked;
        if (!brute_force_factor(t, ctx)) ++rep.brute_disagreements;
      }
    }
  };

  std::atomic<std::size_t> next_chunk{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next_chunk.fetch_add(1);
      if (c >= chunks) return;
      run_chunk(work[c]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  FuzzReport total;
  for (const auto& chunk : work) {
    const FuzzReport& rep = chunk.rep;
    total.samples += rep.samples;
    total.successes += rep.successes;
    total.jm_failures += rep.jm_failures;
    total.factor_errors += rep.factor_errors;
    total.brute_checked += rep.brute_checked;
    total.brute_disagreements += rep.brute_disagreements;
    if (total.first_counterexample.empty()) total.first_counterexample = rep.first_counterexample;
  }
  return total;
}

}  // namespace sievekit

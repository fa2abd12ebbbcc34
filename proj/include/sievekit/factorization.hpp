#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sievekit/support_sets.hpp"

namespace sievekit {

/// A factorization d = a*b*c as a partition of tuple indices (1-based),
/// together with the exponent sums over each part.
struct FactorTriple {
  std::vector<std::size_t> I1, I2, I3;
  Rational a_exp, b_exp, c_exp;
};

FactorTriple make_triple(const ExponentTuple& t, std::vector<std::size_t> I1,
                         std::vector<std::size_t> I2, std::vector<std::size_t> I3);

/// The four-inequality linear system of programmable factorization, in
/// exponent form: q1 <= n - delta, 2n + q2 + 2q3 <= 1 - delta,
/// 2n + q1 + 4q2 + 3q3 <= 2 - delta, n + q1 + 5q2 + 2q3 <= 2 - delta.
bool check_program_system(const Rational& q1, const Rational& q2, const Rational& q3,
                          const Rational& n, const Rational& delta);

/// Same system relative to A = N x^-delta: a <= A, 2A + b + 2c <= 1 - 3delta,
/// 2A + a + 4b + 3c <= 2 - 3delta, A + a + 5b + 2c <= 2 - 2delta.
bool check_JM_system(const Rational& a, const Rational& b, const Rational& c,
                     const Rational& A_exp, const Rational& delta);

/// Slacks of the four JM inequalities (all >= 0 iff the system holds).
std::vector<Rational> jm_slacks(const Rational& a, const Rational& b, const Rational& c,
                                const Rational& A_exp, const Rational& delta);

/// General-purpose criterion: a <= A, c <= theta - A - b and b in the key
/// interval [1/6 + 2eta, 1/4 - 3eta] together imply the JM system at level
/// theta = 7/12 + eta - 50delta.
bool criterion_split(const ExponentTuple& t, const FactorTriple& split, const LevelContext& ctx);

/// Greedy three-bin factorization with capacities A, D^2/x, x^(1-2delta)/(DA)
/// and the terminal-index fallback into the key interval. The seed must
/// partition indices 1..min(4,r) and respect the capacities.
FactorTriple greedy_factor(const ExponentTuple& t, const std::vector<std::size_t>& seed1,
                           const std::vector<std::size_t>& seed2,
                           const std::vector<std::size_t>& seed3, const LevelContext& ctx);

/// Factorization of elements of D*. Requires 0 < eta < 1/204 - 3delta,
/// delta <= A_exp <= 1/3 - delta/2, ctx.theta = 7/12 + eta - 50delta, and
/// membership of t in D* (at the delta-shifted levels). Runs the full
/// case analysis; the returned triple always passes
/// check_JM_system. case_label, when non-null, receives the branch taken.
FactorTriple factor_dstar(const ExponentTuple& t, const LevelContext& ctx,
                          std::string* case_label = nullptr);

/// Variable-level factorization of elements of D^well(x^theta) with
/// t1 <= 1/4 - 3eta, eta = theta - 7/12 + 50delta in (-1/84, 1/60 - 30delta).
/// Succeeds when some b | p1 p2 p3 (b != p3) lands in the key interval, or
/// when t3 <= 1/12 - 5eta (greedy route).
FactorTriple factor_dwell(const ExponentTuple& t, const LevelContext& ctx,
                          std::string* case_label = nullptr);

/// Exhaustive 3^r oracle over index assignments; first assignment (in
/// index-major order) passing check_JM_system. Requires r <= 20.
std::optional<FactorTriple> brute_force_factor(const ExponentTuple& t, const LevelContext& ctx);

/// A_exp values used to probe "for every N" factorability: a uniform grid
/// over [delta, 1/3 - delta/2] plus the breakpoints appearing in the proof.
std::vector<Rational> a_exp_grid(const Rational& eta, const Rational& delta,
                                 int uniform_points = 64);

/// Rejection sampler for D* tuples: descending rationals with denominator
/// `denom`, built against the D+ prefix conditions and filtered by
/// in_D_star.
class DstarSampler {
 public:
  DstarSampler(Rational eta, std::uint64_t seed, std::size_t max_r = 8,
               std::int64_t denom = 1000000);
  ExponentTuple next();

 private:
  Rational eta_;
  std::uint64_t state_;
  std::size_t max_r_;
  std::int64_t denom_;

  std::uint64_t next_u64();
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
};

struct FuzzReport {
  std::size_t samples = 0;
  std::size_t successes = 0;
  std::size_t jm_failures = 0;        // returned triple failed the system
  std::size_t factor_errors = 0;      // factor_dstar threw
  std::size_t brute_checked = 0;
  std::size_t brute_disagreements = 0;  // brute failed where factor_dstar succeeded
  std::string first_counterexample;   // empty when clean
};

/// Samples D* tuples and drives factor_dstar over the A_exp grid (one grid
/// point per sample, cycling), cross-checking a subsample against the brute
/// oracle. Parallelized across samples.
FuzzReport run_factor_fuzz(std::size_t samples, const Rational& eta, const Rational& delta,
                           std::uint64_t seed, std::size_t brute_subsample = 0,
                           unsigned threads = 0);

}  // namespace sievekit

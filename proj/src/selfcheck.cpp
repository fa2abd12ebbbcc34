#include "sievekit/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "sievekit/bound_pipeline.hpp"
#include "sievekit/combinatorial_sieve.hpp"
#include "sievekit/factorization.hpp"
#include "sievekit/quadrature.hpp"
#include "sievekit/sieve_functions.hpp"

namespace sievekit::selfcheck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  bool pass = true;
  std::ostringstream detail;
};

void emit(std::ostream& out, int id, const char* name, const Line& line) {
  out << (line.pass ? "PASS" : "FAIL") << " [" << id << "] " << name;
  const std::string d = line.detail.str();
  if (!d.empty()) out << ": " << d;
  out << "\n";
  out.flush();
}

struct Published {
  // reference I_9..I_19 and G_1..G_8 rows at the published parameters
  static constexpr double I[11] = {0.0332157, 0.0228322, 0.0092564, 0.0150101,
                                   0.0547244, 0.0260202, 0.0124636, 0.0001314,
                                   0.000315,  0.000269,  0.000164};
  static constexpr double G[8] = {39.00163, -5.591009, -3.986553, -5.060499,
                                  1.864133, 0.741181,  0.453663,  0.923736};
};

std::uint64_t xorshift(std::uint64_t& s) {
  s ^= s << 13;
  s ^= s >> 7;
  s ^= s << 17;
  return s;
}

}  // namespace

bool run_all(std::ostream& out, unsigned threads) {
  bool all_pass = true;
  out << std::setprecision(10);

  // ---- 1: closed forms exact, DDE continuation vs analytic integral ----
  {
    Line line;
    const auto t0 = Clock::now();
    const SieveFunctionGrid grid = solve_linear_sieve(10.0, 1e-4);
    double worst_F = 0.0, worst_f = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double s = 1.0 + 2.0 * k / 20000.0;
      worst_F = std::max(worst_F, std::abs(eval_F(grid, s) - kTwoExpGamma / s));
      const double sf = 2.0 + 2.0 * k / 20000.0;
      worst_f = std::max(worst_f, std::abs(eval_f(grid, sf) -
                                           (sf <= 2.0 ? 0.0 : kTwoExpGamma * std::log(sf - 1.0) / sf)));
    }
    // independent oracle: F(4.5) = [2e^g + int_2^3.5 f_closed] / 4.5
    const auto fint = integrate_nested(
        NestedDomain::box(1, {2.0}, {3.5}),
        [](const double* x) { return kTwoExpGamma * std::log(x[0] - 1.0) / x[0]; }, 1e-11);
    const double oracle = (kTwoExpGamma + fint.value) / 4.5;
    const double dde_diff = std::abs(eval_F(grid, 4.5) - oracle);
    const double elapsed = seconds_since(t0);
    line.pass = worst_F == 0.0 && worst_f == 0.0 && dde_diff <= 1e-6 && elapsed < 5.0;
    line.detail << "max|F-closed|=" << worst_F << " max|f-closed|=" << worst_f
                << " |F(4.5)-analytic|=" << dde_diff << " time=" << elapsed << "s";
    emit(out, 1, "linear-sieve closed forms and DDE continuation", line);
    all_pass &= line.pass;
  }

  // ---- 2: Buchstab values ----
  {
    Line line;
    const BuchstabGrid bg = solve_buchstab(10.0, 1e-4);
    const double w25 = eval_omega(bg, 2.5);
    const double w8 = eval_omega(bg, 8.0);
    const double exact25 = (1.0 + std::log(1.5)) / 2.5;
    line.pass = std::abs(w25 - exact25) <= 1e-8 && std::abs(w8 - kExpMinusGamma) <= 1e-4;
    line.detail << "|omega(2.5)-exact|=" << std::abs(w25 - exact25)
                << " |omega(8)-e^-gamma|=" << std::abs(w8 - kExpMinusGamma);
    emit(out, 2, "Buchstab function", line);
    all_pass &= line.pass;
  }

  // ---- 3: exceptional-set J values at eta = 1/204 ----
  {
    Line line;
    const auto t0 = Clock::now();
    const JRatio j = compute_J(1.0 / 204.0, 1e-7);
    const double elapsed = seconds_since(t0);
    // printed values are upper bounds rounded to 6 digits; computed values
    // may not exceed them by more than 1% relative
    line.pass = j.J4 >= 0.0160 && j.J4 <= 0.016896 * 1.01 && j.J60 >= 2.33 &&
                j.J60 <= 2.33838 * 1.01 && j.J61 <= 0.000806853 * 1.01 &&
                j.J62 <= 0.00397946 * 1.01 && j.ratio <= 1.000081 && elapsed < 60.0;
    line.detail << "J4=" << j.J4 << " J60=" << j.J60 << " J61=" << j.J61 << " J62=" << j.J62
                << " ratio=" << std::setprecision(9) << j.ratio << std::setprecision(10)
                << " time=" << elapsed << "s";
    emit(out, 3, "F*/F ratio ingredients at eta=1/204", line);
    all_pass &= line.pass;
  }

  // Shared evaluation context and full pipeline run for criteria 4-6.
  const SieveEval ev;
  const TwinParams params = TwinParams::published();
  const auto t_bound = Clock::now();
  const BoundReport report = final_bound(params, true, ev, 1e-7, threads);
  const double bound_elapsed = seconds_since(t_bound);

  // ---- 4: switched-term integral table ----
  {
    Line line;
    double worst_rel = 0.0;
    for (int k = 0; k < 11; ++k) {
      const double got = report.I[static_cast<std::size_t>(k)];
      const double rel = std::abs(got - Published::I[k]) / Published::I[k];
      worst_rel = std::max(worst_rel, rel);
      if (rel > 0.005) {
        line.pass = false;
        line.detail << "I" << 9 + k << "=" << got << " vs " << Published::I[k] << "; ";
      }
    }
    const double I20 = report.I[11], I21 = report.I[12];
    const double sumI = report.sum_I();
    if (!(I20 <= 2.70e-6)) line.pass = false;
    if (!(I21 <= 5.50e-9)) line.pass = false;
    if (!(sumI >= 0.1735 && sumI <= 0.17441)) line.pass = false;
    if (!(bound_elapsed < 300.0)) line.pass = false;
    line.detail << "max rel err=" << worst_rel << " I20=" << I20 << " I21=" << I21
                << " sumI=" << sumI << " time=" << bound_elapsed << "s";
    emit(out, 4, "integral table I9..I21", line);
    all_pass &= line.pass;
  }

  // ---- 5: G table ----
  {
    Line line;
    double worst_abs = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double got = report.G[static_cast<std::size_t>(k)];
      const double diff = std::abs(got - Published::G[k]);
      worst_abs = std::max(worst_abs, diff);
      if (diff > 2e-3) {
        line.pass = false;
        line.detail << "G" << 1 + k << "=" << got << " vs " << Published::G[k] << "; ";
      }
    }
    if (!(report.G_fifth <= 5.99237 * 1.001)) line.pass = false;
    const double sumG = report.sum_G(false);
    if (!(std::abs(sumG - 28.346) <= 0.01)) line.pass = false;
    line.detail << "max abs err=" << worst_abs << " G(1/5)=" << report.G_fifth
                << " sumG=" << sumG;
    emit(out, 5, "G table and G(1/5)", line);
    all_pass &= line.pass;
  }

  // ---- 6: final constants ----
  {
    Line line;
    const double plain = report.assemble(false);
    const double wu = report.assemble(true);
    const double g2wu = report.G2_wu;
    line.pass = std::abs(plain - 3.30042) <= 5e-4 && std::abs(wu - 3.299552) <= 5e-4 &&
                g2wu >= -5.598667 * 1.001 && g2wu <= -5.598667 * 0.999;
    line.detail << "constant=" << plain << " constant_wu=" << wu << " G2_wu=" << g2wu;
    emit(out, 6, "final twin-prime constants", line);
    all_pass &= line.pass;
  }

  // ---- 7: factorization fuzz ----
  {
    Line line;
    const auto t0 = Clock::now();
    const Rational eta = Rational(1, 204) - Rational(1, 1000000);
    const FuzzReport rep = run_factor_fuzz(100000, eta, 0, 0x5eedULL, 1000, threads);
    const double elapsed = seconds_since(t0);
    line.pass = rep.successes == rep.samples && rep.jm_failures == 0 && rep.factor_errors == 0 &&
                rep.brute_disagreements == 0 && rep.brute_checked >= 1000 && elapsed < 120.0;
    line.detail << rep.successes << "/" << rep.samples << " ok, brute " << rep.brute_checked
                << " checked, " << rep.brute_disagreements << " disagree, time=" << elapsed
                << "s";
    if (!rep.first_counterexample.empty()) line.detail << " cex: " << rep.first_counterexample;
    emit(out, 7, "factor_dstar soundness fuzz", line);
    all_pass &= line.pass;
  }

  // ---- 8: integer-scale sieve inequalities ----
  {
    Line line;
    std::uint64_t rng = 0x8badf00dULL;
    for (std::int64_t D : {100, 1000}) {
      for (std::int64_t z : {10, 30}) {
        const WeightTable plus = build_weights(D, z, WeightVariant::Plus, true);
        // every n | P(z)
        const auto& ps = plus.primes;
        const std::size_t k = ps.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
          std::int64_t n = 1;
          for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t{1} << i)) n *= ps[i];
          if (!check_pointwise_inequality(n, plus)) {
            line.pass = false;
            line.detail << "pointwise fail n=" << n << " D=" << D << " z=" << z << "; ";
          }
        }
        // random multiplicative h on random divisors
        for (int trial = 0; trial < 1000; ++trial) {
          std::map<std::int64_t, Rational> h;
          for (auto p : ps) h[p] = Rational(static_cast<long>(xorshift(rng) % 1001), 1000);
          std::int64_t n = 1;
          for (auto p : ps)
            if (xorshift(rng) & 1) n *= p;
          if (!check_multiplicative_inequality(n, h, plus)) {
            line.pass = false;
            line.detail << "multiplicative fail n=" << n << " D=" << D << " z=" << z << "; ";
            break;
          }
        }
        // twin sift with odd sieving primes
        const WeightTable odd = build_weights(D, z, WeightVariant::Plus, false);
        const SiftResult sift = toy_sift(1000000, odd);
        if (!(sift.exact <= sift.upper)) {
          line.pass = false;
          line.detail << "sift fail D=" << D << " z=" << z << " exact=" << sift.exact
                      << " upper=" << sift.upper << "; ";
        }
      }
    }
    if (line.pass) line.detail << "all pointwise/multiplicative/sift checks hold";
    emit(out, 8, "combinatorial sieve inequalities", line);
    all_pass &= line.pass;
  }

  // ---- 9: optimizer non-regression ----
  {
    Line line;
    const OptimizeResult opt = optimize_params(params, 500, ev, true, 1e-6, threads);
    line.pass = opt.report.constant <= 3.299552 + 1e-6;
    line.detail << "constant=" << opt.report.constant << " (rho'=" << opt.params.rho_prime
                << " tau1=" << opt.params.tau1 << " tau2=" << opt.params.tau2
                << " tau3=" << opt.params.tau3 << " rho=" << opt.params.rho << ")";
    emit(out, 9, "optimizer non-regression", line);
    all_pass &= line.pass;
  }

  out << (all_pass ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
  return all_pass;
}

}  // namespace sievekit::selfcheck

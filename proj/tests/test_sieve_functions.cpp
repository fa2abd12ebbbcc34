#include <doctest.h>

#include <cmath>

#include "sievekit/quadrature.hpp"
#include "sievekit/sieve_functions.hpp"

using namespace sievekit;

namespace {

const SieveFunctionGrid& grid() {
  static const SieveFunctionGrid g = solve_linear_sieve(10.0, 1e-4);
  return g;
}

const BuchstabGrid& buchstab() {
  static const BuchstabGrid g = solve_buchstab(10.0, 1e-4);
  return g;
}

// independent continuation oracle: F(s) = [2e^g + int_2^(s-1) f_closed]/s,
// valid for s <= 5 where f has its closed form
double F_oracle(double s) {
  const auto r = integrate_nested(
      NestedDomain::box(1, {2.0}, {s - 1.0}),
      [](const double* x) { return kTwoExpGamma * std::log(x[0] - 1.0) / x[0]; }, 1e-11);
  return (kTwoExpGamma + r.value) / s;
}

}  // namespace

TEST_CASE("closed forms are returned exactly") {
  CHECK(eval_F(grid(), 2.0) == kExpGamma);
  CHECK(eval_F(grid(), 1.0) == kTwoExpGamma);
  for (int k = 0; k <= 2000; ++k) {
    const double s = 1.0 + 2.0 * k / 2000.0;
    REQUIRE(eval_F(grid(), s) == kTwoExpGamma / s);
  }
  CHECK(eval_f(grid(), 2.0) == 0.0);
  CHECK(eval_f(grid(), 1.3) == 0.0);
  CHECK(eval_f(grid(), 3.0) == doctest::Approx(0.8230).epsilon(1e-4));
  CHECK(eval_f(grid(), 4.0) == doctest::Approx(kTwoExpGamma * std::log(3.0) / 4.0).epsilon(1e-14));
  for (int k = 0; k <= 2000; ++k) {
    const double s = 2.0 + 2.0 * k / 2000.0;
    REQUIRE(eval_f(grid(), s) == (s <= 2.0 ? 0.0 : kTwoExpGamma * std::log(s - 1.0) / s));
  }
}

TEST_CASE("F below 1 uses the F(1) convention, beyond s_max throws") {
  CHECK(eval_F(grid(), 0.5) == eval_F(grid(), 1.0));
  CHECK(eval_f(grid(), 0.5) == 0.0);
  CHECK_THROWS_AS((void)eval_F(grid(), 10.5), std::domain_error);
  CHECK_THROWS_AS((void)eval_f(grid(), 10.5), std::domain_error);
  CHECK_THROWS_AS((void)eval_omega(buchstab(), 10.5), std::domain_error);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(solve_linear_sieve(2.0, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(solve_linear_sieve(10.0, 2e-3), std::invalid_argument);
  CHECK_THROWS_AS(solve_linear_sieve(10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_buchstab(2.0, 1e-4), std::invalid_argument);
}

TEST_CASE("DDE continuation agrees with the analytic integral form") {
  // frozen from the oracle: F(3.5) = (1/3.5)[2e^g + int_2^2.5 f]
  const double f35 = F_oracle(3.5);
  CHECK(f35 == doctest::Approx(1.0651935580).epsilon(1e-9));
  CHECK(eval_F(grid(), 3.5) == doctest::Approx(f35).epsilon(1e-8));
  CHECK(eval_F(grid(), 4.5) == doctest::Approx(F_oracle(4.5)).epsilon(1e-8));
  // max over [3,4] of the deviation stays below 10h
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double s = 3.0 + k / 100.0;
    worst = std::max(worst, std::abs(eval_F(grid(), s) - F_oracle(s)));
  }
  CHECK(worst <= 10.0 * grid().step);
}

TEST_CASE("grid invariants") {
  double prevF = 1e300, prevf = -1.0, prev_gap = 1e300;
  for (std::size_t i = 0; i < grid().F_values.size(); ++i) {
    const double s = grid().grid_s(i);
    const double F = grid().F_values[i];
    const double f = grid().f_values[i];
    REQUIRE(F >= 1.0);
    REQUIRE(f >= 0.0);
    REQUIRE(f < 1.0);
    REQUIRE(F <= prevF + 1e-12);  // F nonincreasing
    if (s >= 2.0) {
      REQUIRE(f >= prevf - 1e-12);  // f nondecreasing
      REQUIRE(F - f > 0.0);
      REQUIRE(F - f <= prev_gap + 1e-12);
      prev_gap = F - f;
      prevf = f;
    }
    prevF = F;
  }
}

TEST_CASE("halving the step at least halves the discrepancy at s=5") {
  const auto g1 = solve_linear_sieve(6.0, 1e-3);
  const auto g2 = solve_linear_sieve(6.0, 5e-4);
  const auto g3 = solve_linear_sieve(6.0, 2.5e-4);
  const double d1 = std::abs(eval_F(g1, 5.0) - eval_F(g2, 5.0));
  const double d2 = std::abs(eval_F(g2, 5.0) - eval_F(g3, 5.0));
  CHECK(d2 <= 0.5 * d1 + 1e-15);
}

TEST_CASE("Buchstab closed forms and asymptote") {
  CHECK(eval_omega(buchstab(), 1.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(eval_omega(buchstab(), 2.0) == 0.5);
  CHECK(eval_omega(buchstab(), 2.5) ==
        doctest::Approx((1.0 + std::log(1.5)) / 2.5).epsilon(1e-12));
  CHECK(std::abs(eval_omega(buchstab(), 8.0) - kExpMinusGamma) <= 1e-4);
  for (std::size_t i = 0; i < buchstab().omega_values.size(); ++i) {
    const double u = 1.0 + static_cast<double>(i) * buchstab().step;
    const double w = buchstab().omega_values[i];
    REQUIRE(w >= 0.5 - 1e-12);
    REQUIRE(w <= 1.0 + 1e-12);
    if (u >= 2.0) REQUIRE(std::abs(w - kExpMinusGamma) <= 0.07);
  }
}

TEST_CASE("omega equals (f + F)/(2e^gamma) within 10h") {
  const double h = grid().step;
  for (int k = 0; k <= 800; ++k) {
    const double u = 2.0 + 8.0 * k / 800.0;
    const double lhs = eval_omega(buchstab(), u);
    const double rhs = (eval_f(grid(), u) + eval_F(grid(), u)) / kTwoExpGamma;
    REQUIRE(std::abs(lhs - rhs) <= 10.0 * h);
  }
}

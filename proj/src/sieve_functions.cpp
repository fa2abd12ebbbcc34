#include "sievekit/sieve_functions.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sievekit {

namespace {

double closed_F(double s) { return kTwoExpGamma / s; }
double closed_f(double s) { return s <= 2.0 ? 0.0 : kTwoExpGamma * std::log(s - 1.0) / s; }
double closed_omega(double u) {
  if (u <= 2.0) return 1.0 / u;
  return (1.0 + std::log(u - 1.0)) / u;
}

double lerp_grid(const std::vector<double>& v, double x, double x0, double step) {
  auto i = static_cast<std::ptrdiff_t>(std::floor((x - x0) / step));
  if (i < 0) i = 0;
  if (static_cast<std::size_t>(i) >= v.size() - 1) i = static_cast<std::ptrdiff_t>(v.size()) - 2;
  const double xi = x0 + static_cast<double>(i) * step;
  const double w = (x - xi) / step;
  return v[static_cast<std::size_t>(i)] * (1.0 - w) + v[static_cast<std::size_t>(i) + 1] * w;
}

}  // namespace

SieveFunctionGrid solve_linear_sieve(double s_max, double step) {
  if (!(s_max >= 3.0)) throw std::invalid_argument("solve_linear_sieve: s_max must be >= 3");
  if (!(step > 0.0 && step <= 1e-3))
    throw std::invalid_argument("solve_linear_sieve: step must be in (0, 1e-3]");

  SieveFunctionGrid grid;
  grid.s_min = 1.0;
  grid.s_max = s_max;
  grid.step = step;
  const auto n = static_cast<std::size_t>(std::ceil((s_max - 1.0) / step + 0.5)) + 1;
  grid.F_values.reserve(n);
  grid.f_values.reserve(n);

  // Values of the delayed integrands at points already on the grid. Closed
  // forms cover f on [0,4] and F on [1,3]; beyond that the partially built
  // tables are interpolated (the argument always lags by a full unit).
  auto f_at = [&](double x) {
    if (x <= 4.0) return closed_f(x);
    return lerp_grid(grid.f_values, x, grid.s_min, step);
  };
  auto F_at = [&](double x) {
    if (x <= 3.0) return closed_F(x);
    return lerp_grid(grid.F_values, x, grid.s_min, step);
  };

  // sF(s) = 2e^g + int_3^s f(t-1) dt  for s >= 3,
  // sf(s) = 2e^g log 3 + int_4^s F(t-1) dt  for s >= 4,
  // both advanced by trapezoid accumulation, with one partial trapezoid at
  // the seam when 3 (resp. 4) is not a grid point.
  double accF = 0.0;
  double accf = 0.0;
  double prev_s = grid.s_min;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.grid_s(i);
    double F;
    if (s <= 3.0) {
      F = closed_F(s);
    } else {
      const double lo = std::max(prev_s, 3.0);
      accF += 0.5 * (s - lo) * (f_at(lo - 1.0) + f_at(s - 1.0));
      F = (kTwoExpGamma + accF) / s;
    }
    grid.F_values.push_back(F);

    double f;
    if (s <= 4.0) {
      f = closed_f(s);
    } else {
      const double lo = std::max(prev_s, 4.0);
      accf += 0.5 * (s - lo) * (F_at(lo - 1.0) + F_at(s - 1.0));
      f = (kTwoExpGamma * std::log(3.0) + accf) / s;
    }
    grid.f_values.push_back(f);
    prev_s = s;
  }
  return grid;
}

BuchstabGrid solve_buchstab(double u_max, double step) {
  if (!(u_max >= 3.0)) throw std::invalid_argument("solve_buchstab: u_max must be >= 3");
  if (!(step > 0.0 && step <= 1e-3))
    throw std::invalid_argument("solve_buchstab: step must be in (0, 1e-3]");

  BuchstabGrid grid;
  grid.u_max = u_max;
  grid.step = step;
  const auto n = static_cast<std::size_t>(std::ceil((u_max - 1.0) / step + 0.5)) + 1;
  grid.omega_values.reserve(n);

  auto omega_at = [&](double x) {
    if (x <= 3.0) return closed_omega(x);
    return lerp_grid(grid.omega_values, x, 1.0, step);
  };

  // u*omega(u) = 1 + log(u-1) on [2,3]; beyond,
  // u*omega(u) = 3*omega(3) + int_3^u omega(t-1) dt.
  const double seed = 1.0 + std::log(2.0);
  double acc = 0.0;
  double prev_u = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 + static_cast<double>(i) * step;
    double w;
    if (u <= 3.0) {
      w = closed_omega(u);
    } else {
      const double lo = std::max(prev_u, 3.0);
      acc += 0.5 * (u - lo) * (omega_at(lo - 1.0) + omega_at(u - 1.0));
      w = (seed + acc) / u;
    }
    grid.omega_values.push_back(w);
    prev_u = u;
  }
  return grid;
}

double eval_F(const SieveFunctionGrid& grid, double s) {
  if (s > grid.s_max) throw std::domain_error("eval_F: s above s_max (" + std::to_string(s) + ")");
  if (s < 1.0) s = 1.0;  // F(s) = F(1) convention below the definition range
  if (s <= 3.0) return closed_F(s);
  return lerp_grid(grid.F_values, s, grid.s_min, grid.step);
}

double eval_f(const SieveFunctionGrid& grid, double s) {
  if (s > grid.s_max) throw std::domain_error("eval_f: s above s_max (" + std::to_string(s) + ")");
  if (s <= 2.0) return 0.0;
  if (s <= 4.0) return closed_f(s);
  return lerp_grid(grid.f_values, s, grid.s_min, grid.step);
}

double eval_omega(const BuchstabGrid& grid, double u) {
  if (u > grid.u_max)
    throw std::domain_error("eval_omega: u above u_max (" + std::to_string(u) + ")");
  if (u < 1.0) throw std::domain_error("eval_omega: u below 1");
  if (u <= 3.0) return closed_omega(u);
  return lerp_grid(grid.omega_values, u, 1.0, grid.step);
}

}  // namespace sievekit

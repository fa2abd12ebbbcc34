#pragma once

#include <cstddef>
#include <vector>

namespace sievekit {

// Euler-Mascheroni constants used multiplicatively everywhere.
inline constexpr double kExpGamma = 1.7810724179901979;    // e^gamma
inline constexpr double kTwoExpGamma = 2.0 * kExpGamma;    // 2e^gamma
inline constexpr double kExpMinusGamma = 0.5614594835668851;  // e^-gamma

/// Tabulated solution of the linear-sieve delay-differential system
///   sF(s) = 2e^gamma        (s <= 3),   (sF(s))' = f(s-1),
///   sf(s) = 0               (s <= 2),   (sf(s))' = F(s-1),
/// on a uniform grid over [1, s_max]. Closed forms are used exactly on
/// [1,3] (F) and [2,4] (f); beyond that the product forms are advanced by
/// trapezoid accumulation. Immutable after construction.
struct SieveFunctionGrid {
  double s_min = 1.0;
  double s_max = 0.0;
  double step = 0.0;
  std::vector<double> F_values;  // F at s_min + i*step
  std::vector<double> f_values;

  double grid_s(std::size_t i) const { return s_min + static_cast<double>(i) * step; }
};

/// Tabulated Buchstab function: omega(u) = 1/u on [1,2],
/// (u omega(u))' = omega(u-1) for u >= 2. Closed form (1 + log(u-1))/u is
/// used exactly on [2,3].
struct BuchstabGrid {
  double u_max = 0.0;
  double step = 0.0;
  std::vector<double> omega_values;  // omega at 1 + i*step
};

/// Solves the F/f system on [1, s_max]. Requires s_max >= 3 and
/// 0 < step <= 1e-3.
SieveFunctionGrid solve_linear_sieve(double s_max = 10.0, double step = 1e-4);

/// Forward integration of u*omega(u) = 1 + int_2^u omega(t-1) dt.
/// Requires u_max >= 3.
BuchstabGrid solve_buchstab(double u_max = 10.0, double step = 1e-4);

/// F(s) with the exact closed form on [1,3], linear interpolation beyond.
/// Accepts s < 1 with the convention F(s) = F(1); throws for s > s_max.
double eval_F(const SieveFunctionGrid& grid, double s);

/// f(s); returns 0 for s <= 2, exact closed form on [2,4], interpolation
/// beyond. Throws for s > s_max.
double eval_f(const SieveFunctionGrid& grid, double s);

/// omega(u); exact 1/u on [1,2] and (1+log(u-1))/u on [2,3], interpolation
/// beyond. Throws for u > u_max. (u < 1 is a domain error: callers that
/// need the rough-number convention omega = 0 below 1 handle it themselves.)
double eval_omega(const BuchstabGrid& grid, double u);

}  // namespace sievekit

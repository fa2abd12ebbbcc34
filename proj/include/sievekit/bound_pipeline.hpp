#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include "sievekit/quadrature.hpp"
#include "sievekit/sieve_functions.hpp"

namespace sievekit {

/// The five sieve parameters plus the Buchstab-iteration floor epsilon.
struct TwinParams {
  double rho = 0.27195;
  double rho_prime = 0.12313;
  double tau1 = 0.16288;
  double tau2 = 0.20867;
  double tau3 = 0.24589;
  double epsilon = 0.002;

  /// eps <= 0.1 <= rho' <= tau1 < 0.2 <= tau2 < tau3 <= rho <= 0.3
  bool valid() const;
  void validate() const;  // throws std::invalid_argument when !valid()
  static TwinParams published() { return TwinParams{}; }
};

/// Step function supported on [2,3]: value i applies on
/// (breakpoints[i], breakpoints[i+1]], the first interval closed on both
/// ends when closed_first is set. 0 outside.
struct StepTable {
  std::vector<double> breakpoints;
  std::vector<double> values;
  bool closed_first = false;
  double operator()(double t) const;
};

StepTable h_table_half();           // Wu's H_(1/2) rows
StepTable h_table_four_sevenths();  // Wu's H_(4/7) rows

/// Piecewise level exponent theta(t) and the three-prime variant, double
/// precision for quadrature use.
double theta_one(double t);
double theta_three(double t, double u, double v);

/// Shared F/f/omega evaluator with the pipeline conventions:
/// f = 0 below 2, F clamped to F(1) below 1, omega clamped to omega(1) = 1
/// below 1, and the asymptote value beyond the grids. Clamp events are
/// counted. Safe for concurrent use.
class SieveEval {
 public:
  SieveEval(double step = 1e-4, double s_max = 10.0, double u_max = 10.0);

  double F(double s) const;
  double f(double s) const;
  double omega(double u) const;

  const SieveFunctionGrid& grid() const { return grid_; }
  const BuchstabGrid& buchstab() const { return buchstab_; }
  std::uint64_t clamp_events() const { return clamps_.load(); }

 private:
  SieveFunctionGrid grid_;
  BuchstabGrid buchstab_;
  mutable std::atomic<std::uint64_t> clamps_{0};
};

/// Exceptional-set integrals at a given eta: J4, the J6 pieces, and the
/// F*/F ratio bound 1 + (7/12+eta) eta (J4 + (J61+J62) J60).
struct JRatio {
  double J4 = 0, J60 = 0, J61 = 0, J62 = 0;
  double ratio = 0;
  double abs_error = 0;
};
JRatio compute_J(double eta, double rel_tol = 1e-7);

/// Switched-term integrals I_9..I_21 with the Buchstab factor.
IntegralResult compute_I(const TwinParams& p, int n, const SieveEval& ev, double rel_tol = 1e-7);

/// The Buchstab-iteration main terms.
double compute_Gc(double c, const TwinParams& p, const SieveEval& ev, double rel_tol = 1e-7,
                  double* abs_err = nullptr);
double compute_Gbar(double c, const TwinParams& p, const SieveEval& ev, double rel_tol = 1e-7,
                    double* abs_err = nullptr, const StepTable* wu = nullptr);
double compute_G0(const TwinParams& p, const SieveEval& ev, double rel_tol = 1e-7,
                  double* abs_err = nullptr);
double compute_Gn(const TwinParams& p, int n, const SieveEval& ev, double rel_tol = 1e-7,
                  double* abs_err = nullptr);
double compute_G2_wu(const TwinParams& p, const StepTable& table, const SieveEval& ev,
                     double rel_tol = 1e-7, double* abs_err = nullptr);

struct BoundReport {
  TwinParams params;
  std::array<double, 8> G{};   // G_1..G_8 (plain G_2)
  double G2_wu = 0;            // only meaningful when used_wu
  std::array<double, 13> I{};  // I_9..I_21
  double G_fifth = 0;          // G(1/5)
  double constant = 0;
  double error_budget = 0;
  bool used_wu = false;

  double sum_G(bool with_wu) const;
  double sum_I() const;
  /// (sum G + G(1/5) sum I) / (5 e^gamma) from the stored pieces.
  double assemble(bool with_wu) const;
};

/// Evaluates every piece (concurrently across terms) and assembles the
/// final constant. With use_wu both the plain and substituted G_2 are
/// stored, so either constant can be re-assembled from the report.
BoundReport final_bound(const TwinParams& p, bool use_wu, const SieveEval& ev,
                        double rel_tol = 1e-7, unsigned threads = 0);

struct OptimizeResult {
  TwinParams params;
  BoundReport report;
  bool budget_exhausted = false;
};

/// Derivative-free Nelder-Mead over (rho', tau1, tau2, tau3, rho) with
/// epsilon fixed, rejecting points outside the ordering constraints.
/// Never returns a result worse than the initial point. budget counts
/// bound evaluations beyond the initial one.
OptimizeResult optimize_params(const TwinParams& initial, int budget, const SieveEval& ev,
                               bool use_wu = true, double rel_tol = 1e-6, unsigned threads = 0);

}  // namespace sievekit

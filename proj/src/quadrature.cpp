#include "sievekit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sievekit {

namespace {

// Gauss-Kronrod 7-15 abscissae/weights on [-1, 1]
constexpr double kXgk[8] = {0.991455371120812639206854697526329,
                            0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926,
                            0.741531185599394439863864773280788,
                            0.586087235467691130294144838258730,
                            0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245,
                            0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970,
                            0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518,
                            0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550,
                            0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649,
                            0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;
  double err;  // |K - G| + propagated inner error
};

// One evaluation of an integrand that itself carries an error estimate
// (the inner levels of the nest).
using NoisyFn = std::function<std::pair<double, double>(double)>;

Interval gk15(const NoisyFn& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const auto fc = g(c);
  double resK = kWgk[7] * fc.first;
  double resG = kWg[3] * fc.first;
  double inner = kWgk[7] * fc.second;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const auto f1 = g(c - dx);
    const auto f2 = g(c + dx);
    const double sum = f1.first + f2.first;
    resK += kWgk[j] * sum;
    inner += kWgk[j] * (f1.second + f2.second);
    if (j % 2 == 1) resG += kWg[(j - 1) / 2] * sum;
  }
  Interval out;
  out.a = a;
  out.b = b;
  out.value = resK * h;
  out.err = std::abs(resK - resG) * h + inner * h;
  return out;
}

constexpr std::size_t kMaxIntervals = 8192;
constexpr double kAbsFloor = 1e-14;

// Deterministic adaptive pass: repeatedly bisect the interval with the
// largest error contribution (ties to the leftmost).
std::pair<double, double> adaptive_gk(const NoisyFn& g, double a, double b, double rel_tol,
                                      bool* converged) {
  std::vector<Interval> ivs;
  ivs.push_back(gk15(g, a, b));
  for (;;) {
    double total = 0.0, err = 0.0;
    for (const auto& iv : ivs) {
      total += iv.value;
      err += iv.err;
    }
    if (err <= std::max(rel_tol * std::abs(total), kAbsFloor)) {
      if (converged) *converged = true;
      return {total, err};
    }
    if (ivs.size() >= kMaxIntervals) {
      if (converged) *converged = false;
      return {total, err};
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < ivs.size(); ++i)
      if (ivs[i].err > ivs[worst].err) worst = i;
    const Interval cur = ivs[worst];
    const double mid = 0.5 * (cur.a + cur.b);
    if (!(mid > cur.a && mid < cur.b)) {
      if (converged) *converged = false;  // interval at rounding resolution
      double t = 0.0, e = 0.0;
      for (const auto& iv : ivs) {
        t += iv.value;
        e += iv.err;
      }
      return {t, e};
    }
    ivs[worst] = gk15(g, cur.a, mid);
    ivs.push_back(gk15(g, mid, cur.b));
  }
}

struct Nester {
  const NestedDomain& dom;
  const Integrand& f;
  std::uint64_t evals = 0;
  bool converged = true;

  std::pair<double, double> level(int k, double* x, double rel_tol) {
    if (k == dom.dim) {
      ++evals;
      return {f(x), 0.0};
    }
    const double a = dom.lower[static_cast<std::size_t>(k)](x);
    const double b = dom.upper[static_cast<std::size_t>(k)](x);
    if (!(b > a)) return {0.0, 0.0};
    NoisyFn g = [&](double t) {
      x[k] = t;
      return level(k + 1, x, rel_tol * 0.3);
    };
    bool ok = true;
    auto out = adaptive_gk(g, a, b, rel_tol, &ok);
    if (!ok) converged = false;
    return out;
  }
};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

NestedDomain NestedDomain::box(int dim, const std::array<double, 6>& lo,
                               const std::array<double, 6>& hi) {
  NestedDomain d;
  d.dim = dim;
  d.hull_lo = lo;
  d.hull_hi = hi;
  for (int i = 0; i < dim; ++i) {
    const double a = lo[static_cast<std::size_t>(i)];
    const double b = hi[static_cast<std::size_t>(i)];
    d.lower.emplace_back([a](const double*) { return a; });
    d.upper.emplace_back([b](const double*) { return b; });
  }
  return d;
}

IntegralResult integrate_nested(const NestedDomain& domain, const Integrand& f, double rel_tol) {
  if (domain.dim < 1 || domain.dim > 6)
    throw std::invalid_argument("integrate_nested: dim must be 1..6");
  if (!(rel_tol > 0)) throw std::invalid_argument("integrate_nested: rel_tol must be positive");
  Nester nester{domain, f};
  double x[6] = {};
  auto [value, err] = nester.level(0, x, rel_tol);
  IntegralResult out{value, err, nester.evals};
  if (!nester.converged && err > std::max(rel_tol * 10 * std::abs(value), kAbsFloor))
    throw ToleranceNotMet(out);
  return out;
}

IntegralResult integrate_mc(const NestedDomain& domain, const Integrand& f, std::uint64_t samples,
                            std::uint64_t seed) {
  if (domain.dim < 1 || domain.dim > 6)
    throw std::invalid_argument("integrate_mc: dim must be 1..6");
  if (samples == 0) throw std::invalid_argument("integrate_mc: samples must be positive");
  double volume = 1.0;
  for (int i = 0; i < domain.dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    volume *= std::max(0.0, domain.hull_hi[k] - domain.hull_lo[k]);
  }
  std::uint64_t state = seed ^ 0x6a09e667f3bcc909ULL;
  double sum = 0.0, sumsq = 0.0;
  double x[6];
  for (std::uint64_t s = 0; s < samples; ++s) {
    bool inside = true;
    for (int i = 0; i < domain.dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      x[i] = domain.hull_lo[k] + (domain.hull_hi[k] - domain.hull_lo[k]) * uniform01(state);
      if (x[i] < domain.lower[k](x) || x[i] > domain.upper[k](x)) {
        inside = false;
        break;
      }
    }
    const double v = inside ? f(x) : 0.0;
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  IntegralResult out;
  out.value = volume * mean;
  out.abs_error_estimate = volume * std::sqrt(var / n);
  out.evaluations = samples;
  return out;
}

}  // namespace sievekit

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "wbounds/errors.hpp"

namespace wbounds {

/// Settings for the adaptive integrator. Breakpoints listed here are always
/// used as initial subdivision points so the integrand is smooth on every
/// leaf interval.
struct QuadratureSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_depth = 40;
  std::vector<double> mandatory_breakpoints;
};

inline void validate_quadrature(const QuadratureSettings& q) {
  if (!(q.rel_tol > 0.0) || !(q.abs_tol > 0.0))
    raise(errc::schema_error, "quadrature tolerances must be positive");
  if (q.max_depth < 1) raise(errc::schema_error, "quadrature max_depth must be >= 1");
}

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1,1]: 15 Kronrod nodes embedding the
// 7-point Gauss rule. Positive abscissae; even indices are Gauss nodes.
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kGk15Weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGauss7Weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kron = 0.0;
  double gauss = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double x = kGk15Nodes[i];
    const double fsum = (i == 7) ? f(c) : f(c - half * x) + f(c + half * x);
    kron += kGk15Weights[i] * fsum;
    // odd-indexed Kronrod nodes plus the center form the embedded Gauss rule
    if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * fsum;
    if (i == 7) gauss += kGauss7Weights[3] * fsum;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::fabs(kron - gauss)};
}

template <typename F>
double adapt(F&& f, double a, double b, double eps, int depth, int max_depth) {
  const auto [val, err] = gk15(f, a, b);
  if (err <= eps || b - a <= std::fabs(a) * 1e-15) return val;
  if (depth >= max_depth)
    raise(errc::tolerance_not_met, "adaptive refinement exceeded max depth");
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * eps, depth + 1, max_depth) +
         adapt(f, mid, b, 0.5 * eps, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b]. The interval is
/// pre-split at every mandatory breakpoint strictly inside (a,b); each
/// segment is then refined by bisection until the embedded-rule error
/// estimate meets max(rel_tol*|result|, abs_tol). Deterministic: fixed
/// node set and traversal order.
template <typename F>
double integrate(F&& f, double a, double b, const QuadratureSettings& q = {}) {
  validate_quadrature(q);
  if (!(a <= b)) raise(errc::domain_error, "integrate requires a <= b");
  if (a == b) return 0.0;

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double bp : q.mandatory_breakpoints)
    if (bp > a && bp < b) cuts.push_back(bp);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // first pass: whole-interval estimate fixes the error budget scale
  double rough = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    rough += detail::gk15(f, cuts[i], cuts[i + 1]).first;
  const double target = std::max(q.abs_tol, q.rel_tol * std::fabs(rough));

  double total = 0.0;
  const double span = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double eps = target * (cuts[i + 1] - cuts[i]) / span;
    total += detail::adapt(f, cuts[i], cuts[i + 1], std::max(eps, q.abs_tol * 1e-3), 0,
                           q.max_depth);
  }
  return total;
}

/// Integral of f(p)/p over [a,b]; requires the interval to avoid 0.
template <typename F>
double integrate_over_price(F&& f, double a, double b, const QuadratureSettings& q = {}) {
  if (a <= 0.0) raise(errc::domain_error, "price-deflated integral needs a > 0");
  return integrate([&f](double p) { return f(p) / p; }, a, b, q);
}

/// Splits the integral exactly at the cutoff; returns (left, right).
template <typename F>
std::pair<double, double> split_integrals(F&& f, double cutoff, double a, double b,
                                          const QuadratureSettings& q = {}) {
  if (!(a <= cutoff && cutoff <= b))
    raise(errc::domain_error, "split point must lie inside the interval");
  return {integrate(f, a, cutoff, q), integrate(f, cutoff, b, q)};
}

}  // namespace wbounds

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "wbounds/errors.hpp"
#include "wbounds/model.hpp"
#include "wbounds/quadrature.hpp"
#include "wbounds/supply_path.hpp"

namespace wbounds {

enum class AxisScale { Level, Log };

/// Reparameterization of demand: A rescales the quantity axis, B the price
/// axis. Level/Level states shape restrictions on the slope, Log/Log on
/// the elasticity, and the mixed pairs on the two semi-elasticities.
struct ShapeTransform {
  AxisScale a_kind = AxisScale::Level;
  AxisScale b_kind = AxisScale::Level;
};

enum class TransformAxis { PriceForward, PriceInverse, QtyForward, QtyInverse };

inline double transform_point(const ShapeTransform& t, TransformAxis axis, double v) {
  const AxisScale kind =
      (axis == TransformAxis::PriceForward || axis == TransformAxis::PriceInverse) ? t.b_kind
                                                                                   : t.a_kind;
  const bool forward = (axis == TransformAxis::PriceForward || axis == TransformAxis::QtyForward);
  if (kind == AxisScale::Level) return v;
  if (forward) {
    if (!(v > 0.0)) raise(errc::domain_error, "log transform needs a positive argument");
    return std::log(v);
  }
  return std::exp(v);
}

namespace detail {
inline double b_fwd(const ShapeTransform& t, double p) {
  return transform_point(t, TransformAxis::PriceForward, p);
}
inline double b_inv(const ShapeTransform& t, double s) {
  return transform_point(t, TransformAxis::PriceInverse, s);
}
inline double b_prime(const ShapeTransform& t, double p) {
  return t.b_kind == AxisScale::Level ? 1.0 : 1.0 / p;
}
inline double a_fwd(const ShapeTransform& t, double q) {
  return transform_point(t, TransformAxis::QtyForward, q);
}
inline double a_inv(const ShapeTransform& t, double g) {
  return transform_point(t, TransformAxis::QtyInverse, g);
}
}  // namespace detail

/// Band for the first derivative f = G' of the transformed demand curve.
/// Both ends are nonpositive: demand is weakly decreasing in the chosen
/// units.
struct GradientBand {
  double f_lo = 0.0;
  double f_hi = 0.0;
};

inline void validate_gradient_band(const GradientBand& b) {
  if (!std::isfinite(b.f_lo) || !std::isfinite(b.f_hi))
    raise(errc::schema_error, "gradient band must be finite");
  if (!(b.f_lo <= b.f_hi) || !(b.f_hi <= 0.0))
    raise(errc::schema_error, "gradient band must satisfy f_lo <= f_hi <= 0");
}

/// Band for the second derivative h = G''; delta_f = f(s1) - f(s0) is a
/// user-supplied boundary datum, since the snapshots do not pin it down.
struct CurvatureBand {
  double h_lo = 0.0;
  double h_hi = 0.0;
  double delta_f = 0.0;
};

inline void validate_curvature_band(const CurvatureBand& b) {
  if (!std::isfinite(b.h_lo) || !std::isfinite(b.h_hi) || !std::isfinite(b.delta_f))
    raise(errc::schema_error, "curvature band must be finite");
  if (!(b.h_lo <= 0.0) || !(0.0 <= b.h_hi))
    raise(errc::schema_error, "curvature band must satisfy h_lo <= 0 <= h_hi");
}

enum class WelfareObject { CS, PS, TS };

inline const char* welfare_object_name(WelfareObject o) {
  switch (o) {
    case WelfareObject::CS: return "cs";
    case WelfareObject::PS: return "ps";
    case WelfareObject::TS: return "ts";
  }
  return "?";
}

enum class SignClass { AllNonneg, AllNonpos, SingleSwitch };

inline const char* sign_class_name(SignClass c) {
  switch (c) {
    case SignClass::AllNonneg: return "all_nonneg";
    case SignClass::AllNonpos: return "all_nonpos";
    case SignClass::SingleSwitch: return "single_switch";
  }
  return "?";
}

/// The demand weight of a welfare object once the extremal path has been
/// substituted in: W(Q) = c0 + a0*int Q dp + a1*int_J Q dp, with J the
/// price region carrying the high path weight. In transformed units the
/// weight is phi(s) = (a0 + a1*1_{B(J)}(s)) / B'(p(s)); its sign pattern
/// drives the extremal-curve construction.
struct PhiProfile {
  WelfareObject object = WelfareObject::CS;
  PathBranch branch = PathBranch::Max;
  double kappa = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double c0 = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;
  double s_star = 0.0;
  double p_star = 0.0;
  bool region_is_left = true;  // B(J) = [s0, s_star] (Max branch) vs [s_star, s1]
  SignClass sign_class = SignClass::AllNonpos;
  double switch_s = std::numeric_limits<double>::quiet_NaN();
};

inline PhiProfile phi_coefficients(WelfareObject object, PathBranch branch, double kappa,
                                   const InversePassThroughBounds& inv, const PolicyChange& pc,
                                   const ShapeTransform& transform) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) raise(errc::domain_error, "kappa must lie in [0,1]");
  PhiProfile phi;
  phi.object = object;
  phi.branch = branch;
  phi.kappa = kappa;
  switch (object) {
    case WelfareObject::CS:
      phi.a0 = -1.0;
      phi.a1 = 0.0;
      phi.c0 = 0.0;
      break;
    case WelfareObject::PS:
      phi.a0 = 1.0 - inv.alpha - kappa;
      phi.a1 = inv.alpha - inv.beta;
      phi.c0 = 0.0;
      break;
    case WelfareObject::TS:
      phi.a0 = -inv.alpha - kappa;
      phi.a1 = inv.alpha - inv.beta;
      phi.c0 = delta_tr(pc);
      break;
  }
  const ExtremalPath path = extremal_cutoff(pc, inv, branch);
  phi.p_star = path.cutoff;
  phi.s0 = detail::b_fwd(transform, pc.pre.price);
  phi.s1 = detail::b_fwd(transform, pc.post.price);
  phi.s_star = detail::b_fwd(transform, path.cutoff);
  phi.region_is_left = (branch == PathBranch::Max);
  const double on_region = phi.a0 + phi.a1;
  const double off_region = phi.a0;
  if (off_region >= 0.0 && on_region >= 0.0) {
    phi.sign_class = SignClass::AllNonneg;
  } else if (off_region <= 0.0 && on_region <= 0.0) {
    phi.sign_class = SignClass::AllNonpos;
  } else {
    phi.sign_class = SignClass::SingleSwitch;
    phi.switch_s = phi.s_star;
  }
  return phi;
}

/// Length of the high-slope interval implied by the band and the chord.
inline double gradient_block_length(const GradientBand& band, double s0, double s1,
                                    double delta_a) {
  validate_gradient_band(band);
  const double span = s1 - s0;
  const double lo = band.f_lo * span;
  const double hi = band.f_hi * span;
  const double slack = kModelRelTol * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (band.f_hi - band.f_lo == 0.0) {
    if (!nearly_equal(delta_a, lo))
      raise(errc::degenerate_band, "point band cannot reach the observed endpoints");
    return 0.0;
  }
  if (delta_a < lo - slack || delta_a > hi + slack)
    raise(errc::infeasible_shape, "no admissible gradient hits both endpoints");
  const double m = (delta_a - lo) / (band.f_hi - band.f_lo);
  return std::clamp(m, 0.0, span);
}

/// Length of the high-curvature interval implied by the band and delta_f.
inline double curvature_block_length(const CurvatureBand& band, double s0, double s1) {
  validate_curvature_band(band);
  const double span = s1 - s0;
  const double lo = band.h_lo * span;
  const double hi = band.h_hi * span;
  const double slack = kModelRelTol * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (band.h_hi - band.h_lo == 0.0) {
    if (!nearly_equal(band.delta_f, lo))
      raise(errc::degenerate_band, "point curvature band cannot match delta_f");
    return 0.0;
  }
  if (band.delta_f < lo - slack || band.delta_f > hi + slack)
    raise(errc::infeasible_shape, "no admissible curvature matches delta_f");
  const double n = (band.delta_f - lo) / (band.h_hi - band.h_lo);
  return std::clamp(n, 0.0, span);
}

enum class ShapeClass { Gradient, Curvature };

enum class Direction { Upper, Lower };

/// A piecewise demand curve in transformed space. Pieces live between
/// consecutive knots; on piece i the transformed slope is
/// f(s) = f_knot[i] + h_piece[i]*(s - knots[i]), so G is piecewise linear
/// for the gradient class and piecewise quadratic for the curvature class.
/// Evaluation maps back through Q(p) = A^{-1}(G(B(p))).
struct ExtremalDemandCurve {
  ShapeTransform transform;
  ShapeClass shape_class = ShapeClass::Gradient;
  double p0 = 0.0, p1 = 0.0;
  double s0 = 0.0, s1 = 0.0;
  double q0 = 0.0, q1 = 0.0;
  double g0 = 0.0;
  std::vector<double> knots;
  std::vector<double> f_knot;
  std::vector<double> h_piece;
  std::vector<double> g_knot;
  std::vector<std::pair<double, double>> blocks;  // high-band interval(s) in s
  double block_len = 0.0;                         // m (gradient) or n (curvature)
  double f0 = 0.0;                                // curvature class: solved f(s0)

  std::size_t piece_index(double s) const {
    // right-continuous lookup; s in [knots[i], knots[i+1])
    auto it = std::upper_bound(knots.begin(), knots.end(), s);
    std::size_t i = static_cast<std::size_t>(it - knots.begin());
    if (i == 0) return 0;
    if (i >= knots.size()) return knots.size() - 2;
    return i - 1;
  }

  double g_at(double s) const {
    if (s <= knots.front()) return g_knot.front();
    if (s >= knots.back()) return g_knot.back();
    const std::size_t i = piece_index(s);
    const double u = s - knots[i];
    return g_knot[i] + f_knot[i] * u + 0.5 * h_piece[i] * u * u;
  }

  double f_at(double s) const {
    if (s <= knots.front()) return f_knot.front();
    if (s >= knots.back()) {
      const std::size_t i = knots.size() - 2;
      return f_knot[i] + h_piece[i] * (knots.back() - knots[i]);
    }
    const std::size_t i = piece_index(s);
    return f_knot[i] + h_piece[i] * (s - knots[i]);
  }

  /// Interior kink prices, used as mandatory quadrature breakpoints.
  std::vector<double> kink_prices() const {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < knots.size(); ++i)
      out.push_back(detail::b_inv(transform, knots[i]));
    return out;
  }

  double operator()(double p) const;
};

namespace detail {

inline void check_support(const ExtremalDemandCurve& c, double p) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::fabs(c.p0), std::fabs(c.p1)));
  if (p < c.p0 - tol || p > c.p1 + tol)
    raise(errc::out_of_support, "price outside the observed support");
}

/// Builds the cumulative G profile from a slope description.
inline ExtremalDemandCurve assemble_curve(const ShapeTransform& t, ShapeClass cls,
                                          const PolicyChange& pc, std::vector<double> knots,
                                          std::vector<double> f_start,
                                          std::vector<double> h_piece) {
  ExtremalDemandCurve c;
  c.transform = t;
  c.shape_class = cls;
  c.p0 = pc.pre.price;
  c.p1 = pc.post.price;
  c.q0 = pc.pre.quantity;
  c.q1 = pc.post.quantity;
  c.s0 = knots.front();
  c.s1 = knots.back();
  c.g0 = a_fwd(t, pc.pre.quantity);
  c.knots = std::move(knots);
  c.f_knot = std::move(f_start);
  c.h_piece = std::move(h_piece);
  c.g_knot.assign(c.knots.size(), 0.0);
  c.g_knot[0] = c.g0;
  for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
    const double len = c.knots[i + 1] - c.knots[i];
    c.g_knot[i + 1] = c.g_knot[i] + c.f_knot[i] * len + 0.5 * c.h_piece[i] * len * len;
  }
  return c;
}

}  // namespace detail

inline double ExtremalDemandCurve::operator()(double p) const {
  detail::check_support(*this, p);
  if (p <= p0) return q0;
  const double s = detail::b_fwd(transform, p);
  return detail::a_inv(transform, g_at(s));
}

/// Q(p); endpoint values reproduce the snapshots.
inline double eval_demand(const ExtremalDemandCurve& curve, double p) { return curve(p); }

/// Q'(p) composed through the transform pair; right-hand value at kinks.
inline double eval_demand_slope(const ExtremalDemandCurve& curve, double p) {
  detail::check_support(curve, p);
  const double pc = std::clamp(p, curve.p0, curve.p1);
  const double s = detail::b_fwd(curve.transform, pc);
  const double f = curve.f_at(s);
  const double bp = detail::b_prime(curve.transform, pc);
  if (curve.transform.a_kind == AxisScale::Level) return f * bp;
  return detail::a_inv(curve.transform, curve.g_at(s)) * f * bp;
}

/// Price elasticity of demand at p (negative for downward-sloping demand).
inline double elasticity_at(const ExtremalDemandCurve& curve, double p) {
  detail::check_support(curve, p);
  const double q = curve(p);
  if (!(q > 0.0)) raise(errc::zero_quantity, "elasticity undefined at zero quantity");
  return eval_demand_slope(curve, p) * p / q;
}

// ---------------------------------------------------------------------------
// Integrals of Q and Q/p over price subintervals. Each sub-piece between
// knots is integrated in closed form when the transform pair admits one,
// otherwise by adaptive quadrature on that (smooth) sub-piece.
// ---------------------------------------------------------------------------

namespace detail {

// int_0^L exp(c + lambda*u) du, stable for small |lambda*L|
inline double exp_segment(double c, double lambda, double L) {
  if (lambda == 0.0) return std::exp(c) * L;
  return std::exp(c) * std::expm1(lambda * L) / lambda;
}

// int_{x0}^{x1} (k0 + k1*s + k2*s^2) ds
inline double poly_segment(double k0, double k1, double k2, double x0, double x1) {
  auto F = [&](double s) { return k0 * s + 0.5 * k1 * s * s + k2 * s * s * s / 3.0; };
  return F(x1) - F(x0);
}

// int_{x0}^{x1} (k0 + k1*s + k2*s^2) e^s ds ; antiderivative e^s (P - P' + P'')
inline double poly_exp_segment(double k0, double k1, double k2, double x0, double x1) {
  auto F = [&](double s) {
    const double P = k0 + k1 * s + k2 * s * s;
    const double Pp = k1 + 2.0 * k2 * s;
    const double Ppp = 2.0 * k2;
    return std::exp(s) * (P - Pp + Ppp);
  };
  return F(x1) - F(x0);
}

// int_{x0}^{x1} (k0 + k1*s + k2*s^2)/s ds, x0 > 0
inline double poly_over_s_segment(double k0, double k1, double k2, double x0, double x1) {
  auto F = [&](double s) { return k0 * std::log(s) + k1 * s + 0.5 * k2 * s * s; };
  return F(x1) - F(x0);
}

enum class IntegrandKind { Q, QOverP };

// One smooth sub-piece [sa,sb] of piece i, integrated in price space.
inline double piece_integral(const ExtremalDemandCurve& c, std::size_t i, double sa, double sb,
                             IntegrandKind kind, const QuadratureSettings& q) {
  if (sb <= sa) return 0.0;
  const double k = c.knots[i];
  const double f = c.f_knot[i];
  const double h = c.h_piece[i];
  const double g = c.g_knot[i];
  // G(s) = g + f*(s-k) + h/2*(s-k)^2 expanded in s: k0 + k1*s + k2*s^2
  const double k2 = 0.5 * h;
  const double k1 = f - h * k;
  const double k0 = g - f * k + 0.5 * h * k * k;

  const bool a_level = c.transform.a_kind == AxisScale::Level;
  const bool b_level = c.transform.b_kind == AxisScale::Level;

  if (kind == IntegrandKind::Q) {
    if (b_level) {
      if (a_level) return poly_segment(k0, k1, k2, sa, sb);
      if (h == 0.0) return exp_segment(g + f * (sa - k), f, sb - sa);
    } else {
      if (a_level) return poly_exp_segment(k0, k1, k2, sa, sb);
      if (h == 0.0) return exp_segment(g + f * (sa - k) + sa, f + 1.0, sb - sa);
    }
  } else {
    if (b_level) {
      if (a_level) return poly_over_s_segment(k0, k1, k2, sa, sb);
      // exp(G)/s has no elementary antiderivative; fall through
    } else {
      // dp/p = ds
      if (a_level) return poly_segment(k0, k1, k2, sa, sb);
      if (h == 0.0) return exp_segment(g + f * (sa - k), f, sb - sa);
    }
  }

  // smooth fallback on the price subinterval
  const double pa = b_inv(c.transform, sa);
  const double pb = b_inv(c.transform, sb);
  QuadratureSettings local = q;
  local.mandatory_breakpoints.clear();
  if (kind == IntegrandKind::Q) return integrate([&c](double p) { return c(p); }, pa, pb, local);
  return integrate([&c](double p) { return c(p) / p; }, pa, pb, local);
}

inline double curve_integral(const ExtremalDemandCurve& c, double pa, double pb,
                             IntegrandKind kind, const QuadratureSettings& q) {
  if (pb < pa) raise(errc::domain_error, "integral bounds must be ordered");
  check_support(c, pa);
  check_support(c, pb);
  const double sa = std::clamp(b_fwd(c.transform, std::max(pa, c.p0)), c.s0, c.s1);
  const double sb = std::clamp(b_fwd(c.transform, std::min(pb, c.p1)), c.s0, c.s1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
    const double lo = std::max(sa, c.knots[i]);
    const double hi = std::min(sb, c.knots[i + 1]);
    if (hi > lo) total += piece_integral(c, i, lo, hi, kind, q);
  }
  return total;
}

}  // namespace detail

/// int_a^b Q(p) dp, split at curve kinks, closed form where available.
inline double integral_q(const ExtremalDemandCurve& curve, double a, double b,
                         const QuadratureSettings& q = {}) {
  return detail::curve_integral(curve, a, b, detail::IntegrandKind::Q, q);
}

/// int_a^b Q(p)/p dp.
inline double integral_q_over_p(const ExtremalDemandCurve& curve, double a, double b,
                                const QuadratureSettings& q = {}) {
  return detail::curve_integral(curve, a, b, detail::IntegrandKind::QOverP, q);
}

// ---------------------------------------------------------------------------
// Extremal-curve construction
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::pair<double, double>> clip_blocks(
    std::vector<std::pair<double, double>> blocks, double s0, double s1) {
  std::vector<std::pair<double, double>> out;
  for (auto& [lo, hi] : blocks) {
    const double a = std::max(lo, s0);
    const double b = std::min(hi, s1);
    if (b - a > 1e-15 * std::max(1.0, std::fabs(s1 - s0))) out.emplace_back(a, b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ExtremalDemandCurve build_gradient_from_blocks(
    const GradientBand& band, const ShapeTransform& t, const PolicyChange& pc,
    std::vector<std::pair<double, double>> blocks, double m) {
  const double s0 = b_fwd(t, pc.pre.price);
  const double s1 = b_fwd(t, pc.post.price);
  blocks = clip_blocks(std::move(blocks), s0, s1);
  std::vector<double> knots{s0};
  std::vector<double> fs;
  std::vector<double> hs;
  double cursor = s0;
  for (auto& [lo, hi] : blocks) {
    if (lo > cursor) {
      knots.push_back(lo);
      fs.push_back(band.f_lo);
      hs.push_back(0.0);
    }
    knots.push_back(hi);
    fs.push_back(band.f_hi);
    hs.push_back(0.0);
    cursor = hi;
  }
  if (cursor < s1 || fs.empty()) {
    knots.push_back(s1);
    fs.push_back(band.f_lo);
    hs.push_back(0.0);
  }
  if (knots.back() != s1) knots.back() = s1;
  auto curve = assemble_curve(t, ShapeClass::Gradient, pc, std::move(knots), std::move(fs),
                              std::move(hs));
  curve.blocks = std::move(blocks);
  curve.block_len = m;
  return curve;
}

/// Deterministic bracketed maximization: coarse scan, then golden-section
/// refinement in the best bracket.
template <typename F>
std::pair<double, double> scan_golden_max(F&& fn, double lo, double hi, int scan_pts = 33) {
  if (hi <= lo) return {lo, fn(lo)};
  double best_x = lo, best_v = fn(lo);
  const int n = std::max(scan_pts, 3);
  for (int i = 1; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double v = fn(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double step = (hi - lo) / (n - 1);
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double v1 = fn(x1), v2 = fn(x2);
  for (int it = 0; it < 90 && b - a > 1e-13 * std::max(1.0, std::fabs(hi - lo)); ++it) {
    if (v1 < v2) {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + gr * (b - a);
      v2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - gr * (b - a);
      v1 = fn(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  const double vm = fn(xm);
  if (vm > best_v) return {xm, vm};
  return {best_x, best_v};
}

/// Best single high-slope block and best end-anchored pair of blocks for a
/// sign-switching weight; exact placement when the quantity axis is Level
/// (the objective is then linear in the running integral of f), best in
/// family otherwise. Returns the winning curve for the requested direction.
template <typename Objective>
ExtremalDemandCurve optimize_gradient_placement(const GradientBand& band, const ShapeTransform& t,
                                                const PolicyChange& pc, double m, double s_star,
                                                bool maximize, Objective&& objective) {
  const double s0 = b_fwd(t, pc.pre.price);
  const double s1 = b_fwd(t, pc.post.price);
  const double span = s1 - s0;

  auto eval_single = [&](double start) {
    auto c = build_gradient_from_blocks(band, t, pc, {{start, start + m}}, m);
    return objective(c);
  };
  auto eval_two_end = [&](double a) {
    auto c = build_gradient_from_blocks(band, t, pc,
                                        {{s0, s0 + a}, {s1 - (m - a), s1}}, m);
    return objective(c);
  };
  const double sign = maximize ? 1.0 : -1.0;

  // smooth segments of the single-block family: kinks where an edge crosses s*
  std::vector<double> cuts{s0, s1 - m};
  for (double c : {s_star - m, s_star})
    if (c > s0 && c < s1 - m) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double best_v = -std::numeric_limits<double>::infinity();
  double best_t = s0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto [x, v] = scan_golden_max([&](double tt) { return sign * eval_single(tt); }, cuts[i],
                                  cuts[i + 1]);
    if (v > best_v) {
      best_v = v;
      best_t = x;
    }
  }
  std::vector<std::pair<double, double>> best_blocks{{best_t, best_t + m}};

  // two-end family, split where a block edge crosses s*
  std::vector<double> acuts{0.0, m};
  for (double c : {s_star - s0, m - (s1 - s_star)})
    if (c > 0.0 && c < m) acuts.push_back(c);
  std::sort(acuts.begin(), acuts.end());
  for (std::size_t i = 0; i + 1 < acuts.size(); ++i) {
    auto [x, v] = scan_golden_max([&](double a) { return sign * eval_two_end(a); }, acuts[i],
                                  acuts[i + 1]);
    if (v > best_v) {
      best_v = v;
      best_blocks = {{s0, s0 + x}, {s1 - (m - x), s1}};
    }
  }
  (void)span;
  return build_gradient_from_blocks(band, t, pc, best_blocks, m);
}

}  // namespace detail

/// Pointwise-extremal gradient curve: high-slope block first (pointwise
/// maximal G) or last (pointwise minimal G).
inline ExtremalDemandCurve build_gradient_pointwise(const GradientBand& band,
                                                    const ShapeTransform& t,
                                                    const PolicyChange& pc, bool pointwise_high) {
  validate_gradient_band(band);
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const double delta_a =
      detail::a_fwd(t, pc.post.quantity) - detail::a_fwd(t, pc.pre.quantity);
  const double m = gradient_block_length(band, s0, s1, delta_a);
  const auto block = pointwise_high ? std::pair<double, double>{s0, s0 + m}
                                    : std::pair<double, double>{s1 - m, s1};
  return detail::build_gradient_from_blocks(band, t, pc, {block}, m);
}

/// Extremal gradient-class curve for one welfare weight and bound
/// direction. One-signed weights use the pointwise-extremal placements;
/// sign-switching weights get the best placement over single-block and
/// end-anchored families under the exact objective.
inline ExtremalDemandCurve build_gradient_extremal(const PhiProfile& profile,
                                                   const GradientBand& band,
                                                   const ShapeTransform& t, Direction direction,
                                                   const PolicyChange& pc,
                                                   const QuadratureSettings& quad = {}) {
  validate_gradient_band(band);
  if (profile.sign_class != SignClass::SingleSwitch) {
    const bool weight_nonneg = profile.sign_class == SignClass::AllNonneg;
    const bool pointwise_high = (direction == Direction::Upper) == weight_nonneg;
    return build_gradient_pointwise(band, t, pc, pointwise_high);
  }
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const double delta_a =
      detail::a_fwd(t, pc.post.quantity) - detail::a_fwd(t, pc.pre.quantity);
  const double m = gradient_block_length(band, s0, s1, delta_a);
  if (m <= 0.0 || m >= s1 - s0)
    return build_gradient_pointwise(band, t, pc, true);  // unique profile
  const double ja = profile.region_is_left ? pc.pre.price : profile.p_star;
  const double jb = profile.region_is_left ? profile.p_star : pc.post.price;
  auto objective = [&](const ExtremalDemandCurve& c) {
    return profile.a0 * integral_q(c, pc.pre.price, pc.post.price, quad) +
           profile.a1 * integral_q(c, ja, jb, quad);
  };
  return detail::optimize_gradient_placement(band, t, pc, m, profile.s_star,
                                             direction == Direction::Upper, objective);
}

/// Curvature-class curve with the high-curvature block at a given
/// placement; f(s0) is solved so the curve hits both observed endpoints.
inline ExtremalDemandCurve build_curvature_with_block(const CurvatureBand& band,
                                                      const ShapeTransform& t,
                                                      const PolicyChange& pc, double block_lo,
                                                      double block_hi) {
  validate_curvature_band(band);
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const double span = s1 - s0;
  const double delta_a =
      detail::a_fwd(t, pc.post.quantity) - detail::a_fwd(t, pc.pre.quantity);
  const double n = block_hi - block_lo;

  // chord condition: int f = delta_a with f(s) = f0 + int h
  const double sL = std::clamp(block_lo, s0, s1);
  const double sR = std::clamp(block_hi, s0, s1);
  const double weighted_h = band.h_lo * 0.5 * span * span +
                            (band.h_hi - band.h_lo) * 0.5 *
                                ((s1 - sL) * (s1 - sL) - (s1 - sR) * (s1 - sR));
  const double f0 = (delta_a - weighted_h) / span;

  std::vector<double> knots{s0};
  std::vector<double> fs;
  std::vector<double> hs;
  double f_cursor = f0;
  double cursor = s0;
  auto push_piece = [&](double to, double h) {
    if (to - cursor <= 0.0) return;
    knots.push_back(to);
    fs.push_back(f_cursor);
    hs.push_back(h);
    f_cursor += h * (to - cursor);
    cursor = to;
  };
  push_piece(sL, band.h_lo);
  push_piece(sR, band.h_hi);
  push_piece(s1, band.h_lo);
  if (knots.size() < 2) {  // n == span == 0 cannot happen; guard degenerate band
    knots.push_back(s1);
    fs.push_back(f0);
    hs.push_back(0.0);
  }

  auto curve =
      detail::assemble_curve(t, ShapeClass::Curvature, pc, std::move(knots), std::move(fs),
                             std::move(hs));
  curve.blocks = {{sL, sR}};
  curve.block_len = n;
  curve.f0 = f0;

  // demand must stay weakly decreasing: f <= 0 everywhere (f is piecewise
  // linear, so knot values suffice)
  double fmax = curve.f_knot.front();
  for (std::size_t i = 0; i + 1 < curve.knots.size(); ++i) {
    const double len = curve.knots[i + 1] - curve.knots[i];
    fmax = std::max(fmax, curve.f_knot[i] + curve.h_piece[i] * len);
  }
  const double ftol = 1e-12 * std::max(1.0, std::fabs(f0));
  if (fmax > ftol)
    raise(errc::nonmonotone_demand, "implied demand slope turns positive");
  if (t.a_kind == AxisScale::Level) {
    double gmin = curve.g_knot.back();
    for (double g : curve.g_knot) gmin = std::min(gmin, g);
    if (gmin < -1e-12 * std::max(1.0, std::fabs(curve.g0)))
      raise(errc::negative_demand, "implied demand turns negative");
  }
  return curve;
}

/// Extremal curvature-class curve: block placements follow the one-switch
/// rule (about the path cutoff) or the one-signed rule, with f(s0) solved
/// from the chord condition.
inline ExtremalDemandCurve build_curvature_extremal(const PhiProfile& profile,
                                                    const CurvatureBand& band,
                                                    const ShapeTransform& t, Direction direction,
                                                    const PolicyChange& pc) {
  validate_curvature_band(band);
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const double n = curvature_block_length(band, s0, s1);
  const double s_star = profile.s_star;
  std::pair<double, double> block;
  if (profile.sign_class != SignClass::SingleSwitch) {
    const bool weight_nonneg = profile.sign_class == SignClass::AllNonneg;
    const bool high_first = (direction == Direction::Upper) == weight_nonneg;
    block = high_first ? std::pair<double, double>{s0, s0 + n}
                       : std::pair<double, double>{s1 - n, s1};
  } else if (profile.region_is_left) {
    const double l_plus = s_star - s0;
    const double l_minus = s1 - s_star;
    if (direction == Direction::Upper)
      block = (n <= l_minus) ? std::pair<double, double>{s_star, s_star + n}
                             : std::pair<double, double>{s1 - n, s1};
    else
      block = (n <= l_plus) ? std::pair<double, double>{s_star - n, s_star}
                            : std::pair<double, double>{s0, s0 + n};
  } else {
    // mirrored placements about s*
    const double l_plus = s1 - s_star;
    const double l_minus = s_star - s0;
    if (direction == Direction::Upper)
      block = (n <= l_minus) ? std::pair<double, double>{s_star - n, s_star}
                             : std::pair<double, double>{s0, s0 + n};
    else
      block = (n <= l_plus) ? std::pair<double, double>{s_star, s_star + n}
                            : std::pair<double, double>{s1 - n, s1};
  }
  return build_curvature_with_block(band, t, pc, block.first, block.second);
}

/// Gradient-class curve from per-cell slopes on a uniform grid in s.
/// Used by samplers and enumeration; the caller is responsible for the
/// chord budget (sum of cell slopes times cell width = delta A).
inline ExtremalDemandCurve make_step_gradient_curve(const ShapeTransform& t,
                                                    const PolicyChange& pc,
                                                    const std::vector<double>& cell_f) {
  if (cell_f.empty()) raise(errc::domain_error, "need at least one cell");
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const std::size_t n = cell_f.size();
  std::vector<double> knots(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    knots[i] = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n);
  knots.back() = s1;
  return detail::assemble_curve(t, ShapeClass::Gradient, pc, std::move(knots), cell_f,
                                std::vector<double>(n, 0.0));
}

/// Curvature-class curve from an initial slope and per-cell curvatures on
/// a uniform grid in s.
inline ExtremalDemandCurve make_step_curvature_curve(const ShapeTransform& t,
                                                     const PolicyChange& pc, double f0,
                                                     const std::vector<double>& cell_h) {
  if (cell_h.empty()) raise(errc::domain_error, "need at least one cell");
  const double s0 = detail::b_fwd(t, pc.pre.price);
  const double s1 = detail::b_fwd(t, pc.post.price);
  const std::size_t n = cell_h.size();
  std::vector<double> knots(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    knots[i] = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n);
  knots.back() = s1;
  std::vector<double> fs(n);
  double f = f0;
  for (std::size_t i = 0; i < n; ++i) {
    fs[i] = f;
    f += cell_h[i] * (knots[i + 1] - knots[i]);
  }
  auto curve =
      detail::assemble_curve(t, ShapeClass::Curvature, pc, std::move(knots), std::move(fs),
                             cell_h);
  curve.f0 = f0;
  return curve;
}

// ---------------------------------------------------------------------------
// Path terms against a demand curve with closed-form integrals
// ---------------------------------------------------------------------------

/// int Q u dp along a bang-bang path: split at the cutoff, weight each side.
inline double path_term(const ExtremalDemandCurve& curve, const ExtremalPath& path,
                        const QuadratureSettings& quad = {}) {
  const double i1 = integral_q(curve, path.p_lo, path.cutoff, quad);
  const double i2 = integral_q(curve, path.cutoff, path.p_hi, quad);
  if (path.degenerate) return path.alpha * (i1 + i2);
  if (path.branch == PathBranch::Max) return path.beta * i1 + path.alpha * i2;
  return path.alpha * i1 + path.beta * i2;
}

/// Generic-integrand variant; kinks must be passed via quad breakpoints.
template <typename DemandFn>
double path_term(DemandFn&& q_of_p, const ExtremalPath& path, const QuadratureSettings& quad)
  requires(!std::is_convertible_v<DemandFn, const ExtremalDemandCurve&>)
{
  const double i1 = integrate(q_of_p, path.p_lo, path.cutoff, quad);
  const double i2 = integrate(q_of_p, path.cutoff, path.p_hi, quad);
  if (path.degenerate) return path.alpha * (i1 + i2);
  if (path.branch == PathBranch::Max) return path.beta * i1 + path.alpha * i2;
  return path.alpha * i1 + path.beta * i2;
}

/// int Q(p(xi)) dxi along a bang-bang ad valorem path, via the
/// price-deflated building blocks J.
inline double ad_valorem_path_term(const ExtremalDemandCurve& curve, const AdValoremPath& path,
                                   const QuadratureSettings& quad = {}) {
  const double p_star = std::exp(path.cutoff_x);
  const double j1 = integral_q_over_p(curve, std::exp(path.x0), p_star, quad);
  const double j2 = integral_q_over_p(curve, p_star, std::exp(path.x1), quad);
  if (path.degenerate) return path.w_lo * (j1 + j2);
  if (path.branch == PathBranch::Max) return path.w_hi * j1 + path.w_lo * j2;
  return path.w_lo * j1 + path.w_hi * j2;
}

template <typename DemandFn>
double ad_valorem_path_term(DemandFn&& q_of_p, const AdValoremPath& path,
                            const QuadratureSettings& quad)
  requires(!std::is_convertible_v<DemandFn, const ExtremalDemandCurve&>)
{
  const double p_star = std::exp(path.cutoff_x);
  const double j1 = integrate_over_price(q_of_p, std::exp(path.x0), p_star, quad);
  const double j2 = integrate_over_price(q_of_p, p_star, std::exp(path.x1), quad);
  if (path.degenerate) return path.w_lo * (j1 + j2);
  if (path.branch == PathBranch::Max) return path.w_hi * j1 + path.w_lo * j2;
  return path.w_lo * j1 + path.w_hi * j2;
}

}  // namespace wbounds

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "wbounds/errors.hpp"

namespace wbounds {

/// Relative tolerance used for equality-style feasibility comparisons on
/// observed data. Inputs are finite doubles; exact-arithmetic statements
/// become comparisons at this scale.
inline constexpr double kModelRelTol = 1e-12;

inline bool nearly_equal(double a, double b, double rel = kModelRelTol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel * scale;
}

/// One observed market equilibrium around a per-unit tax.
struct Snapshot {
  double price = 0.0;     // consumer price, currency per unit
  double quantity = 0.0;  // traded quantity, units
  double tax = 0.0;       // specific tax, currency per unit
};

inline void validate_snapshot(const Snapshot& s, const std::string& which) {
  if (!std::isfinite(s.price) || s.price <= 0.0)
    raise(errc::schema_error, which + ": price must be finite and > 0");
  if (!std::isfinite(s.quantity) || s.quantity < 0.0)
    raise(errc::schema_error, which + ": quantity must be finite and >= 0");
  if (!std::isfinite(s.tax) || s.tax < 0.0)
    raise(errc::schema_error, which + ": tax must be finite and >= 0");
}

/// The two snapshots plus their deltas. Sign conventions: the tax rose,
/// price rose, quantity fell.
struct PolicyChange {
  Snapshot pre;
  Snapshot post;
  double delta_p = 0.0;
  double delta_q = 0.0;
  double delta_tau = 0.0;
};

inline PolicyChange build_policy_change(const Snapshot& pre, const Snapshot& post) {
  validate_snapshot(pre, "pre");
  validate_snapshot(post, "post");
  PolicyChange pc{pre, post, post.price - pre.price, post.quantity - pre.quantity,
                  post.tax - pre.tax};
  if (!(pc.delta_p > 0.0))
    raise(errc::sign_convention_violated, "price change must be strictly positive");
  if (!(pc.delta_q < 0.0))
    raise(errc::sign_convention_violated, "quantity change must be strictly negative");
  if (!(pc.delta_tau > 0.0))
    raise(errc::sign_convention_violated, "tax change must be strictly positive");
  return pc;
}

/// Interval of feasible pass-through rates dp/dtau.
struct PassThroughInterval {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
};

inline void validate_pass_through(const PassThroughInterval& pt) {
  if (!std::isfinite(pt.rho_lo) || !std::isfinite(pt.rho_hi) || pt.rho_lo <= 0.0)
    raise(errc::schema_error, "pass-through bounds must be finite and strictly positive");
  if (pt.rho_lo > pt.rho_hi) raise(errc::schema_error, "pass-through interval must be ordered");
}

/// Box for the inverse pass-through weight u = dtau/dp.
struct InversePassThroughBounds {
  double alpha = 0.0;  // 1 / rho_hi
  double beta = 0.0;   // 1 / rho_lo
};

inline InversePassThroughBounds inverse_passthrough_bounds(const PassThroughInterval& pt) {
  validate_pass_through(pt);
  return {1.0 / pt.rho_hi, 1.0 / pt.rho_lo};
}

/// True iff some admissible path connects the snapshots: the weight budget
/// delta_tau must fit in [alpha*delta_p, beta*delta_p]. Endpoint equality
/// is feasible (the path degenerates to a constant weight).
inline bool check_path_feasibility(const PolicyChange& pc, const InversePassThroughBounds& inv) {
  const double lo = inv.alpha * pc.delta_p;
  const double hi = inv.beta * pc.delta_p;
  const double slack = kModelRelTol * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  return pc.delta_tau >= lo - slack && pc.delta_tau <= hi + slack;
}

/// Interval of feasible conduct parameters; 0 is perfect competition,
/// 1 is monopoly, 1/n is symmetric n-firm Cournot.
struct ConductInterval {
  double kappa_lo = 0.0;
  double kappa_hi = 0.0;
};

inline void validate_conduct(const ConductInterval& ci) {
  if (!std::isfinite(ci.kappa_lo) || !std::isfinite(ci.kappa_hi))
    raise(errc::schema_error, "conduct bounds must be finite");
  if (ci.kappa_lo < 0.0 || ci.kappa_hi > 1.0 || ci.kappa_lo > ci.kappa_hi)
    raise(errc::schema_error, "conduct interval must satisfy 0 <= lo <= hi <= 1");
}

/// Exact revenue change; no path or shape input enters.
inline double delta_tr(const PolicyChange& pc) {
  return pc.post.tax * pc.post.quantity - pc.pre.tax * pc.pre.quantity;
}

/// An ad valorem policy change: two snapshots around a rate change, worked
/// in log price. w = dxi/dx is the inverse of the rate pass-through
/// elasticity, boxed in [w_lo, w_hi].
struct AdValoremChange {
  double xi_pre = 0.0;
  double xi_post = 0.0;
  Snapshot pre;
  Snapshot post;
  double w_lo = 0.0;
  double w_hi = 0.0;
  // derived
  double delta_xi = 0.0;
  double x0 = 0.0;
  double x1 = 0.0;
  double delta_x = 0.0;
};

inline AdValoremChange build_ad_valorem_change(double xi_pre, double xi_post, const Snapshot& pre,
                                               const Snapshot& post, double rho_a_lo,
                                               double rho_a_hi) {
  validate_snapshot(pre, "pre");
  validate_snapshot(post, "post");
  if (!std::isfinite(xi_pre) || !std::isfinite(xi_post) || xi_pre < 0.0 || xi_post < 0.0)
    raise(errc::schema_error, "ad valorem rates must be finite and >= 0");
  if (!std::isfinite(rho_a_lo) || !std::isfinite(rho_a_hi) || rho_a_lo <= 0.0 ||
      rho_a_lo > rho_a_hi)
    raise(errc::schema_error, "ad valorem pass-through bounds must be positive and ordered");
  AdValoremChange av;
  av.xi_pre = xi_pre;
  av.xi_post = xi_post;
  av.pre = pre;
  av.post = post;
  av.w_lo = 1.0 / rho_a_hi;
  av.w_hi = 1.0 / rho_a_lo;
  av.delta_xi = xi_post - xi_pre;
  av.x0 = std::log(pre.price);
  av.x1 = std::log(post.price);
  av.delta_x = av.x1 - av.x0;
  if (!(post.price - pre.price > 0.0))
    raise(errc::sign_convention_violated, "price change must be strictly positive");
  if (!(post.quantity - pre.quantity < 0.0))
    raise(errc::sign_convention_violated, "quantity change must be strictly negative");
  if (!(av.delta_xi > 0.0))
    raise(errc::sign_convention_violated, "rate change must be strictly positive");
  return av;
}

inline bool check_ad_valorem_feasibility(const AdValoremChange& av) {
  const double lo = av.w_lo * av.delta_x;
  const double hi = av.w_hi * av.delta_x;
  const double slack = kModelRelTol * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  return av.delta_xi >= lo - slack && av.delta_xi <= hi + slack;
}

/// The price-space policy change implied by an ad valorem change; used to
/// share demand-side machinery between the two modes.
inline PolicyChange policy_change_for_demand(const AdValoremChange& av) {
  PolicyChange pc;
  pc.pre = av.pre;
  pc.post = av.post;
  pc.delta_p = av.post.price - av.pre.price;
  pc.delta_q = av.post.quantity - av.pre.quantity;
  pc.delta_tau = std::numeric_limits<double>::quiet_NaN();  // no specific tax in this mode
  return pc;
}

}  // namespace wbounds

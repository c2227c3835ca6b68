#pragma once

#include <algorithm>
#include <cmath>

#include "wbounds/errors.hpp"
#include "wbounds/model.hpp"

namespace wbounds {

/// Which end of the path-term range the bang-bang weight targets.
enum class PathBranch { Max, Min };

inline const char* path_branch_name(PathBranch b) {
  return b == PathBranch::Max ? "max" : "min";
}

/// Bang-bang inverse pass-through: one cutoff price, endpoint weights on
/// either side. The Max branch front-loads the high weight beta; the Min
/// branch mirrors it. The cutoff itself belongs to the right-hand piece.
struct ExtremalPath {
  PathBranch branch = PathBranch::Max;
  double cutoff = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p_lo = 0.0;
  double p_hi = 0.0;
  bool degenerate = false;  // alpha == beta, weight constant
};

/// Cutoff pinned by the weight budget: the weight must integrate to the
/// tax change over the price support.
inline ExtremalPath extremal_cutoff(const PolicyChange& pc, const InversePassThroughBounds& inv,
                                    PathBranch branch) {
  ExtremalPath path;
  path.branch = branch;
  path.alpha = inv.alpha;
  path.beta = inv.beta;
  path.p_lo = pc.pre.price;
  path.p_hi = pc.post.price;
  if (!check_path_feasibility(pc, inv))
    raise(errc::infeasible_scenario, "tax change outside the pass-through budget box");
  const double width = inv.beta - inv.alpha;
  if (width <= kModelRelTol * inv.beta) {
    // point box: the only admissible weight is the constant alpha
    if (!nearly_equal(pc.delta_tau, inv.alpha * pc.delta_p))
      raise(errc::infeasible_scenario,
            "degenerate pass-through interval cannot absorb the tax change");
    path.cutoff = path.p_lo;
    path.degenerate = true;
    return path;
  }
  const double offset = (branch == PathBranch::Max)
                            ? (pc.delta_tau - inv.alpha * pc.delta_p) / width
                            : (inv.beta * pc.delta_p - pc.delta_tau) / width;
  path.cutoff = std::clamp(pc.pre.price + offset, path.p_lo, path.p_hi);
  return path;
}

/// Pointwise weight u(p); left piece is half-open, the cutoff takes the
/// right-hand value.
inline double path_weight_at(const ExtremalPath& path, double p) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::fabs(path.p_lo), std::fabs(path.p_hi)));
  if (p < path.p_lo - tol || p > path.p_hi + tol)
    raise(errc::out_of_support, "price outside the path support");
  if (path.degenerate) return path.alpha;
  const bool left = p < path.cutoff;
  if (path.branch == PathBranch::Max) return left ? path.beta : path.alpha;
  return left ? path.alpha : path.beta;
}

/// Accumulated tax along the path: tau(p) = tau0 + int_{p0}^{p} u.
inline double tau_at(const ExtremalPath& path, const PolicyChange& pc, double p) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::fabs(path.p_lo), std::fabs(path.p_hi)));
  if (p < path.p_lo - tol || p > path.p_hi + tol)
    raise(errc::out_of_support, "price outside the path support");
  const double pcl = std::clamp(p, path.p_lo, path.p_hi);
  if (path.degenerate) return pc.pre.tax + path.alpha * (pcl - path.p_lo);
  const double left_w = path.branch == PathBranch::Max ? path.beta : path.alpha;
  const double right_w = path.branch == PathBranch::Max ? path.alpha : path.beta;
  const double left_len = std::min(pcl, path.cutoff) - path.p_lo;
  const double right_len = std::max(0.0, pcl - path.cutoff);
  return pc.pre.tax + left_w * left_len + right_w * right_len;
}

/// Bang-bang ad valorem weight w(x) in log price, cutoff x*.
struct AdValoremPath {
  PathBranch branch = PathBranch::Max;
  double cutoff_x = 0.0;
  double w_lo = 0.0;
  double w_hi = 0.0;
  double x0 = 0.0;
  double x1 = 0.0;
  bool degenerate = false;
};

inline AdValoremPath ad_valorem_cutoff(const AdValoremChange& av, PathBranch branch) {
  AdValoremPath path;
  path.branch = branch;
  path.w_lo = av.w_lo;
  path.w_hi = av.w_hi;
  path.x0 = av.x0;
  path.x1 = av.x1;
  if (!check_ad_valorem_feasibility(av))
    raise(errc::infeasible_scenario, "rate change outside the ad valorem budget box");
  const double width = av.w_hi - av.w_lo;
  if (width <= kModelRelTol * av.w_hi) {
    if (!nearly_equal(av.delta_xi, av.w_lo * av.delta_x))
      raise(errc::infeasible_scenario,
            "degenerate ad valorem interval cannot absorb the rate change");
    path.cutoff_x = av.x0;
    path.degenerate = true;
    return path;
  }
  const double offset = (av.delta_xi - av.w_lo * av.delta_x) / width;
  path.cutoff_x = (branch == PathBranch::Max) ? av.x0 + offset : av.x1 - offset;
  path.cutoff_x = std::clamp(path.cutoff_x, av.x0, av.x1);
  return path;
}

inline double ad_valorem_weight_at(const AdValoremPath& path, double x) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::fabs(path.x0), std::fabs(path.x1)));
  if (x < path.x0 - tol || x > path.x1 + tol)
    raise(errc::out_of_support, "log price outside the path support");
  if (path.degenerate) return path.w_lo;
  const bool left = x < path.cutoff_x;
  if (path.branch == PathBranch::Max) return left ? path.w_hi : path.w_lo;
  return left ? path.w_lo : path.w_hi;
}

/// Accumulated rate along the path: xi(x) = xi0 + int_{x0}^{x} w.
inline double xi_at(const AdValoremPath& path, const AdValoremChange& av, double x) {
  const double xcl = std::clamp(x, path.x0, path.x1);
  if (path.degenerate) return av.xi_pre + path.w_lo * (xcl - path.x0);
  const double left_w = path.branch == PathBranch::Max ? path.w_hi : path.w_lo;
  const double right_w = path.branch == PathBranch::Max ? path.w_lo : path.w_hi;
  const double left_len = std::min(xcl, path.cutoff_x) - path.x0;
  const double right_len = std::max(0.0, xcl - path.cutoff_x);
  return av.xi_pre + left_w * left_len + right_w * right_len;
}

}  // namespace wbounds

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "wbounds/demand_shape.hpp"
#include "wbounds/errors.hpp"
#include "wbounds/model.hpp"
#include "wbounds/quadrature.hpp"
#include "wbounds/supply_path.hpp"

namespace wbounds {

/// Shape restriction chosen by the analyst.
struct ShapeSpec {
  ShapeTransform transform;
  ShapeClass shape_class = ShapeClass::Gradient;
  GradientBand gradient;
  CurvatureBand curvature;
};

/// Everything a bounds computation needs, for either tax mode.
struct ScenarioInputs {
  bool ad_valorem = false;
  PolicyChange pc;              // specific mode
  InversePassThroughBounds inv; // specific mode
  AdValoremChange av;           // ad valorem mode
  ConductInterval conduct;
  ShapeSpec shape;

  const PolicyChange& demand_pc() const { return ad_valorem ? av_pc_cache() : pc; }

 private:
  const PolicyChange& av_pc_cache() const {
    if (!av_pc_valid_) {
      av_pc_ = policy_change_for_demand(av);
      av_pc_valid_ = true;
    }
    return av_pc_;
  }
  mutable PolicyChange av_pc_;
  mutable bool av_pc_valid_ = false;
};

/// One candidate extremal combination: a path branch, a conduct endpoint,
/// and the demand curve built for one welfare weight and bound direction.
struct Corner {
  PathBranch path_branch = PathBranch::Max;
  Direction demand_direction = Direction::Upper;
  double kappa = 0.0;
  WelfareObject built_for = WelfareObject::CS;
  SignClass sign_class = SignClass::AllNonpos;
  ExtremalDemandCurve demand;
  ExtremalPath path;
  AdValoremPath av_path;
  bool is_ad_valorem = false;
  bool phi_one_signed = true;
};

/// All welfare objects evaluated at one corner, plus the building blocks.
/// delta_ps = cs_integral - path_term - conduct_term; the totals follow by
/// accounting. Fiscal objects are unavailable in ad valorem mode.
struct WelfareBreakdown {
  double cs_integral = 0.0;
  double path_term = 0.0;
  double conduct_term = 0.0;
  double i1 = 0.0;  // demand integral left of the cutoff (J1 in av mode)
  double i2 = 0.0;
  double delta_cs = 0.0;
  double delta_ps = 0.0;
  double delta_tr = 0.0;
  double delta_ts_priv = 0.0;
  double delta_ts = 0.0;
  double dwl = 0.0;
  bool fiscal_available = true;
};

/// Change in consumer surplus for a given curve.
inline double delta_cs(const ExtremalDemandCurve& curve, const QuadratureSettings& quad = {}) {
  return -integral_q(curve, curve.p0, curve.p1, quad);
}

/// Change in producer surplus via the path-term decomposition with a
/// constant conduct parameter.
inline double delta_ps(const ExtremalDemandCurve& curve, const ExtremalPath& path, double kappa,
                       const QuadratureSettings& quad = {}) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) raise(errc::domain_error, "kappa must lie in [0,1]");
  const double int_q = integral_q(curve, curve.p0, curve.p1, quad);
  return (1.0 - kappa) * int_q - path_term(curve, path, quad);
}

inline WelfareBreakdown welfare_at_corner(const Corner& corner, const PolicyChange& pc,
                                          const QuadratureSettings& quad = {}) {
  WelfareBreakdown w;
  const auto& curve = corner.demand;
  if (corner.is_ad_valorem) {
    const double p_star = std::exp(corner.av_path.cutoff_x);
    w.i1 = integral_q_over_p(curve, curve.p0, p_star, quad);
    w.i2 = integral_q_over_p(curve, p_star, curve.p1, quad);
    if (corner.av_path.degenerate) {
      w.path_term = corner.av_path.w_lo * (w.i1 + w.i2);
    } else if (corner.av_path.branch == PathBranch::Max) {
      w.path_term = corner.av_path.w_hi * w.i1 + corner.av_path.w_lo * w.i2;
    } else {
      w.path_term = corner.av_path.w_lo * w.i1 + corner.av_path.w_hi * w.i2;
    }
    w.cs_integral = integral_q(curve, curve.p0, curve.p1, quad);
    w.fiscal_available = false;
    w.delta_tr = std::numeric_limits<double>::quiet_NaN();
  } else {
    w.i1 = integral_q(curve, corner.path.p_lo, corner.path.cutoff, quad);
    w.i2 = integral_q(curve, corner.path.cutoff, corner.path.p_hi, quad);
    if (corner.path.degenerate) {
      w.path_term = corner.path.alpha * (w.i1 + w.i2);
    } else if (corner.path.branch == PathBranch::Max) {
      w.path_term = corner.path.beta * w.i1 + corner.path.alpha * w.i2;
    } else {
      w.path_term = corner.path.alpha * w.i1 + corner.path.beta * w.i2;
    }
    w.cs_integral = w.i1 + w.i2;
    w.fiscal_available = true;
    w.delta_tr = delta_tr(pc);
  }
  w.conduct_term = corner.kappa * w.cs_integral;
  w.delta_cs = -w.cs_integral;
  w.delta_ps = w.cs_integral - w.path_term - w.conduct_term;
  w.delta_ts_priv = w.delta_cs + w.delta_ps;
  if (w.fiscal_available) {
    w.delta_ts = w.delta_ts_priv + w.delta_tr;
    w.dwl = -w.delta_ts;
  } else {
    w.delta_ts = std::numeric_limits<double>::quiet_NaN();
    w.dwl = std::numeric_limits<double>::quiet_NaN();
  }
  return w;
}

namespace detail {

/// Sign pattern of the ad valorem demand weight for one object, branch and
/// conduct level. The weight's numerator is base - w_side(p)/p, increasing
/// in p within each region, so region endpoints decide the pattern.
inline SignClass av_sign_class(WelfareObject object, PathBranch branch, double kappa,
                               const AdValoremChange& av, double p_star) {
  double base = 0.0;
  switch (object) {
    case WelfareObject::CS:
      return SignClass::AllNonpos;
    case WelfareObject::PS:
      base = 1.0 - kappa;
      break;
    case WelfareObject::TS:  // private total surplus in this mode
      base = -kappa;
      break;
  }
  const double w_left = branch == PathBranch::Max ? av.w_hi : av.w_lo;
  const double w_right = branch == PathBranch::Max ? av.w_lo : av.w_hi;
  const std::array<double, 4> vals{base - w_left / av.pre.price, base - w_left / p_star,
                                   base - w_right / p_star, base - w_right / av.post.price};
  bool all_nonneg = true;
  bool all_nonpos = true;
  for (double v : vals) {
    all_nonneg = all_nonneg && v >= 0.0;
    all_nonpos = all_nonpos && v <= 0.0;
  }
  if (all_nonneg) return SignClass::AllNonneg;
  if (all_nonpos) return SignClass::AllNonpos;
  return SignClass::SingleSwitch;
}

inline ExtremalDemandCurve build_pointwise_curve(const ShapeSpec& shape, const PolicyChange& pc,
                                                 bool pointwise_high) {
  if (shape.shape_class == ShapeClass::Gradient)
    return build_gradient_pointwise(shape.gradient, shape.transform, pc, pointwise_high);
  const double s0 = b_fwd(shape.transform, pc.pre.price);
  const double s1 = b_fwd(shape.transform, pc.post.price);
  const double n = curvature_block_length(shape.curvature, s0, s1);
  const auto block = pointwise_high ? std::pair<double, double>{s0, s0 + n}
                                    : std::pair<double, double>{s1 - n, s1};
  return build_curvature_with_block(shape.curvature, shape.transform, pc, block.first,
                                    block.second);
}

}  // namespace detail

/// Builds one candidate corner through the generic pipeline. The same
/// routine serves the bounds computation and the attainability recheck.
inline Corner build_corner(const ScenarioInputs& in, WelfareObject object, PathBranch branch,
                           double kappa, Direction direction,
                           const QuadratureSettings& quad = {}) {
  Corner c;
  c.path_branch = branch;
  c.demand_direction = direction;
  c.kappa = kappa;
  c.built_for = object;
  c.is_ad_valorem = in.ad_valorem;
  if (!in.ad_valorem) {
    c.path = extremal_cutoff(in.pc, in.inv, branch);
    const PhiProfile profile =
        phi_coefficients(object, branch, kappa, in.inv, in.pc, in.shape.transform);
    c.sign_class = profile.sign_class;
    c.phi_one_signed = profile.sign_class != SignClass::SingleSwitch;
    if (in.shape.shape_class == ShapeClass::Gradient) {
      c.demand = build_gradient_extremal(profile, in.shape.gradient, in.shape.transform,
                                         direction, in.pc, quad);
    } else {
      c.demand =
          build_curvature_extremal(profile, in.shape.curvature, in.shape.transform, direction,
                                   in.pc);
    }
    return c;
  }

  const PolicyChange& pc = in.demand_pc();
  c.av_path = ad_valorem_cutoff(in.av, branch);
  const double p_star = std::exp(c.av_path.cutoff_x);
  const double s_star = detail::b_fwd(in.shape.transform, p_star);
  const SignClass sign = detail::av_sign_class(object, branch, kappa, in.av, p_star);
  c.sign_class = sign;
  c.phi_one_signed = sign != SignClass::SingleSwitch;
  if (sign != SignClass::SingleSwitch) {
    const bool weight_nonneg = sign == SignClass::AllNonneg;
    const bool pointwise_high = (direction == Direction::Upper) == weight_nonneg;
    c.demand = detail::build_pointwise_curve(in.shape, pc, pointwise_high);
    return c;
  }
  const double base = object == WelfareObject::PS ? 1.0 - kappa : -kappa;
  if (in.shape.shape_class == ShapeClass::Gradient) {
    const double s0 = detail::b_fwd(in.shape.transform, pc.pre.price);
    const double s1 = detail::b_fwd(in.shape.transform, pc.post.price);
    const double delta_a = detail::a_fwd(in.shape.transform, pc.post.quantity) -
                           detail::a_fwd(in.shape.transform, pc.pre.quantity);
    const double m = gradient_block_length(in.shape.gradient, s0, s1, delta_a);
    if (m <= 0.0 || m >= s1 - s0) {
      c.demand = build_gradient_pointwise(in.shape.gradient, in.shape.transform, pc, true);
    } else {
      auto objective = [&](const ExtremalDemandCurve& cur) {
        return base * integral_q(cur, pc.pre.price, pc.post.price, quad) -
               ad_valorem_path_term(cur, c.av_path, quad);
      };
      c.demand = detail::optimize_gradient_placement(in.shape.gradient, in.shape.transform, pc,
                                                     m, s_star,
                                                     direction == Direction::Upper, objective);
    }
  } else {
    // switching weights with curvature shape keep the one-switch placement
    // about the path cutoff; flagged via phi_one_signed
    PhiProfile pseudo;
    pseudo.object = object;
    pseudo.branch = branch;
    pseudo.kappa = kappa;
    pseudo.s0 = detail::b_fwd(in.shape.transform, pc.pre.price);
    pseudo.s1 = detail::b_fwd(in.shape.transform, pc.post.price);
    pseudo.s_star = s_star;
    pseudo.p_star = p_star;
    pseudo.region_is_left = branch == PathBranch::Max;
    pseudo.sign_class = SignClass::SingleSwitch;
    c.demand =
        build_curvature_extremal(pseudo, in.shape.curvature, in.shape.transform, direction, pc);
  }
  return c;
}

/// One evaluated candidate corner.
struct CornerEval {
  Corner corner;
  WelfareBreakdown breakdown;
};

/// Lower/upper bound for one welfare object, with the indices of the
/// attaining corners in WelfareBounds::corners.
struct BoundPair {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  int lower_corner = -1;
  int upper_corner = -1;
  bool available = false;
};

struct WelfareBounds {
  bool ad_valorem = false;
  double p_star_max = 0.0;
  double p_star_min = 0.0;
  double x_star_max = 0.0;
  double x_star_min = 0.0;
  bool near_degenerate_passthrough = false;
  bool phi_all_one_signed = true;
  std::vector<CornerEval> corners;
  BoundPair cs, ps, tr, ts_priv, ts, dwl;

  const BoundPair& object(std::string_view n) const {
    if (n == "cs") return cs;
    if (n == "ps") return ps;
    if (n == "tr") return tr;
    if (n == "ts_priv") return ts_priv;
    if (n == "ts") return ts;
    if (n == "dwl") return dwl;
    raise(errc::internal_error, "unknown welfare object");
  }
};

namespace detail {

template <typename Get>
void envelope(BoundPair& bp, const std::vector<CornerEval>& corners, Get&& get) {
  bp.available = false;
  for (int i = 0; i < static_cast<int>(corners.size()); ++i) {
    const double v = get(corners[static_cast<std::size_t>(i)]);
    if (std::isnan(v)) continue;
    if (!bp.available) {
      bp.lower = bp.upper = v;
      bp.lower_corner = bp.upper_corner = i;
      bp.available = true;
    } else {
      if (v < bp.lower) {
        bp.lower = v;
        bp.lower_corner = i;
      }
      if (v > bp.upper) {
        bp.upper = v;
        bp.upper_corner = i;
      }
    }
  }
}

}  // namespace detail

/// Enumerates the candidate corners (welfare weight x path branch x
/// conduct endpoint x direction), evaluates the full breakdown at each,
/// and takes per-object envelopes. Revenue is exact; DWL bounds are the
/// negation-swap of the TS bounds. In ad valorem mode the fiscal objects
/// are reported unavailable.
inline WelfareBounds compute_welfare_bounds(const ScenarioInputs& in,
                                            const QuadratureSettings& quad = {}) {
  validate_conduct(in.conduct);
  WelfareBounds out;
  out.ad_valorem = in.ad_valorem;
  if (!in.ad_valorem) {
    if (!check_path_feasibility(in.pc, in.inv))
      raise(errc::infeasible_scenario, "tax change outside the pass-through budget box");
    out.p_star_max = extremal_cutoff(in.pc, in.inv, PathBranch::Max).cutoff;
    out.p_star_min = extremal_cutoff(in.pc, in.inv, PathBranch::Min).cutoff;
    out.near_degenerate_passthrough = (in.inv.beta - in.inv.alpha) < 1e-10 * in.inv.beta;
  } else {
    if (!check_ad_valorem_feasibility(in.av))
      raise(errc::infeasible_scenario, "rate change outside the ad valorem budget box");
    out.x_star_max = ad_valorem_cutoff(in.av, PathBranch::Max).cutoff_x;
    out.x_star_min = ad_valorem_cutoff(in.av, PathBranch::Min).cutoff_x;
    out.p_star_max = std::exp(out.x_star_max);
    out.p_star_min = std::exp(out.x_star_min);
    out.near_degenerate_passthrough = (in.av.w_hi - in.av.w_lo) < 1e-10 * in.av.w_hi;
  }

  std::vector<double> kappas{in.conduct.kappa_lo};
  if (in.conduct.kappa_hi > in.conduct.kappa_lo) kappas.push_back(in.conduct.kappa_hi);

  const PolicyChange& eval_pc = in.ad_valorem ? in.demand_pc() : in.pc;
  for (WelfareObject object : {WelfareObject::CS, WelfareObject::PS, WelfareObject::TS}) {
    for (PathBranch branch : {PathBranch::Max, PathBranch::Min}) {
      for (double kappa : kappas) {
        for (Direction dir : {Direction::Upper, Direction::Lower}) {
          Corner c = build_corner(in, object, branch, kappa, dir, quad);
          out.phi_all_one_signed = out.phi_all_one_signed && c.phi_one_signed;
          out.corners.push_back({std::move(c), {}});
          out.corners.back().breakdown = welfare_at_corner(out.corners.back().corner, eval_pc,
                                                           quad);
        }
      }
    }
  }

  detail::envelope(out.cs, out.corners, [](const CornerEval& e) { return e.breakdown.delta_cs; });
  detail::envelope(out.ps, out.corners, [](const CornerEval& e) { return e.breakdown.delta_ps; });
  detail::envelope(out.ts_priv, out.corners,
                   [](const CornerEval& e) { return e.breakdown.delta_ts_priv; });
  if (!in.ad_valorem) {
    detail::envelope(out.ts, out.corners,
                     [](const CornerEval& e) { return e.breakdown.delta_ts; });
    const double tr = delta_tr(in.pc);
    out.tr.lower = out.tr.upper = tr;
    out.tr.lower_corner = out.tr.upper_corner = 0;
    out.tr.available = true;
    out.dwl.lower = -out.ts.upper;
    out.dwl.upper = -out.ts.lower;
    out.dwl.lower_corner = out.ts.upper_corner;
    out.dwl.upper_corner = out.ts.lower_corner;
    out.dwl.available = out.ts.available;
  }
  return out;
}

/// Specific-tax convenience wrapper.
inline WelfareBounds four_corner_bounds(const PolicyChange& pc,
                                        const InversePassThroughBounds& inv,
                                        const ConductInterval& ci, const ShapeSpec& shape,
                                        const QuadratureSettings& quad = {}) {
  ScenarioInputs in;
  in.ad_valorem = false;
  in.pc = pc;
  in.inv = inv;
  in.conduct = ci;
  in.shape = shape;
  return compute_welfare_bounds(in, quad);
}

/// Ad valorem convenience wrapper.
inline WelfareBounds ad_valorem_bounds(const AdValoremChange& av, const ConductInterval& ci,
                                       const ShapeSpec& shape,
                                       const QuadratureSettings& quad = {}) {
  ScenarioInputs in;
  in.ad_valorem = true;
  in.av = av;
  in.conduct = ci;
  in.shape = shape;
  return compute_welfare_bounds(in, quad);
}

/// Marginal cost implied by the conduct identity at one price, using the
/// corner's path for the accumulated tax.
inline double implied_marginal_cost(const ExtremalDemandCurve& curve, const ExtremalPath& path,
                                    double kappa, double p, const PolicyChange& pc) {
  const double q = curve(p);
  if (!(q > 0.0)) raise(errc::zero_quantity, "marginal cost undefined at zero quantity");
  const double qp = eval_demand_slope(curve, p);
  if (qp == 0.0) raise(errc::flat_demand, "marginal cost undefined where demand is flat");
  const double mr_correction = -q / qp;  // -P'(Q) Q with P' = 1/Q'
  return p - tau_at(path, pc, p) - kappa * mr_correction;
}

/// Lerner index kappa/|eta| at one price.
inline double lerner_index_at(const ExtremalDemandCurve& curve, double kappa, double p) {
  const double q = curve(p);
  if (!(q > 0.0)) raise(errc::zero_quantity, "Lerner index undefined at zero quantity");
  const double eta = elasticity_at(curve, p);
  if (eta == 0.0) raise(errc::zero_elasticity, "Lerner index undefined at zero elasticity");
  return kappa / std::fabs(eta);
}

}  // namespace wbounds

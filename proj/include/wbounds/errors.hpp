#pragma once

#include <stdexcept>
#include <string>

namespace wbounds {

/// Failure categories surfaced by the library. Scenario-level problems
/// (bad data, empty feasible set) are distinguished from evaluation-point
/// problems (out of support, division guards) so callers can map them to
/// exit codes.
enum class errc {
  schema_error,
  sign_convention_violated,
  infeasible_scenario,
  degenerate_interval,
  out_of_support,
  domain_error,
  infeasible_shape,
  degenerate_band,
  negative_demand,
  nonmonotone_demand,
  zero_quantity,
  flat_demand,
  zero_elasticity,
  tolerance_not_met,
  internal_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::schema_error: return "SchemaError";
    case errc::sign_convention_violated: return "SignConventionViolated";
    case errc::infeasible_scenario: return "InfeasibleScenario";
    case errc::degenerate_interval: return "DegenerateInterval";
    case errc::out_of_support: return "OutOfSupport";
    case errc::domain_error: return "DomainError";
    case errc::infeasible_shape: return "InfeasibleShape";
    case errc::degenerate_band: return "DegenerateBand";
    case errc::negative_demand: return "NegativeDemand";
    case errc::nonmonotone_demand: return "NonmonotoneDemand";
    case errc::zero_quantity: return "ZeroQuantity";
    case errc::flat_demand: return "FlatDemand";
    case errc::zero_elasticity: return "ZeroElasticity";
    case errc::tolerance_not_met: return "ToleranceNotMet";
    case errc::internal_error: return "InternalError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

/// True when a failure means "the scenario has no admissible primitives"
/// rather than "the library was misused".
inline bool is_feasibility_error(errc c) {
  switch (c) {
    case errc::schema_error:
    case errc::sign_convention_violated:
    case errc::infeasible_scenario:
    case errc::infeasible_shape:
    case errc::degenerate_band:
    case errc::negative_demand:
    case errc::nonmonotone_demand:
    case errc::domain_error:
      return true;
    default:
      return false;
  }
}

}  // namespace wbounds

#pragma once

// Parameter sensitivity and a derivative-free search for linkage parameters
// that open over a target direction range and switch within a force band.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkstat/modeswitch.hpp"

namespace linkstat {

/// A searchable parameter with box bounds in file units (degrees for angles,
/// millimeters for lengths, N/mm for k).
struct FreeParameter {
  std::string name;
  double lower = 0;
  double upper = 0;
};

struct DesignSpec {
  double interval_lo = 0;  // radians; must lie inside one opening interval
  double interval_hi = 0;
  double press_angle = kTablePressAngle;
  double force_lo = 0;  // N, band for the required force at press_angle
  double force_hi = 0;
  std::vector<FreeParameter> free;
  SweepSettings sweep;
  double interval_weight = 1.0;  // penalty per degree
  double band_weight = 10.0;     // penalty per newton
};

ValidationReport validate_spec(const DesignSpec& spec);

/// Penalty terms for one candidate; penalty is zero exactly when the
/// candidate meets the spec.
struct DesignEvaluation {
  double penalty = 0;
  double interval_shortfall_deg = 0;
  double press_distance_deg = 0;
  double band_violation_n = 0;
  OpeningIntervals opening;
  std::optional<double> threshold;
};

DesignEvaluation evaluate_design(const DesignSpec& spec, const Params& p);

struct Verification {
  bool satisfied = false;
  std::vector<std::string> violations;
  OpeningIntervals opening;
  std::optional<double> threshold;
};

/// Re-checks a parameter set from scratch: fresh sweep, interval containment,
/// and the threshold band.
Verification verify_design(const DesignSpec& spec, const Params& p);

enum class DesignStatus { Feasible, Infeasible };

struct DesignResult {
  DesignStatus status = DesignStatus::Infeasible;
  Params params;  // the feasible point, or the best iterate
  int evaluations = 0;
  double penalty = 0;
  Verification verification;
};

/// Coordinate pattern search over spec.free inside the box. Steps start at 1 deg
/// for angles, 0.5 mm for lengths, 0.05 N/mm for k and 0.05 for mu, halve after a
/// pass without improvement, and stop below 1/64 of the start or when `budget`
/// evaluations are spent. Throws ValidationError for an invalid spec or start.
DesignResult optimize_design(const DesignSpec& spec, const Params& start, int budget);

/// Central difference d(xi_b)/d(parameter) at zeta, in internal units
/// (per radian for angles). Throws NotOpeningError if the links do not open at
/// any of the three evaluation points.
double sensitivity(const Params& p, std::string_view parameter, double zeta,
                   double rel_step = 1e-6);

}  // namespace linkstat

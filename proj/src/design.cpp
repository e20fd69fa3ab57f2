#include "linkstat/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace linkstat {

namespace {

double external_value(const Params& p, std::string_view name) {
  const double v = parameter_value(p, name);
  return parameter_kind(name) == ParameterKind::Angle ? to_degrees(v) : v;
}

void set_external_value(Params& p, std::string_view name, double v) {
  parameter_ref(p, name) = parameter_kind(name) == ParameterKind::Angle ? to_radians(v) : v;
}

double initial_step(ParameterKind kind) {
  switch (kind) {
    case ParameterKind::Angle:
      return 1.0;
    case ParameterKind::Length:
      return 0.5;
    case ParameterKind::Stiffness:
      return 0.05;
    case ParameterKind::Friction:
      return 0.05;
    case ParameterKind::Force:
      break;
  }
  return 0.0;
}

std::string deg_text(double radians) {
  std::ostringstream os;
  os << to_degrees(radians);
  return os.str();
}

// Distance (degrees) from zeta to the nearest interval, 0 when inside one.
std::optional<double> distance_to_intervals(const OpeningIntervals& opening, double zeta) {
  std::optional<double> best;
  for (const auto& iv : opening.intervals) {
    const double d = std::max({0.0, iv.lo - zeta, zeta - iv.hi});
    if (!best || d < *best) best = d;
  }
  if (best) return to_degrees(*best);
  return std::nullopt;
}

double band_distance(double force, double lo, double hi) {
  return std::max(0.0, lo - force) + std::max(0.0, force - hi);
}

}  // namespace

ValidationReport validate_spec(const DesignSpec& spec) {
  ValidationReport report;
  auto add = [&](std::string field, std::string message) {
    report.violations.push_back({std::move(field), std::move(message)});
  };
  if (!std::isfinite(spec.interval_lo) || !std::isfinite(spec.interval_hi) ||
      !(spec.interval_lo < spec.interval_hi))
    add("interval", "target interval needs finite lo < hi");
  if (!std::isfinite(spec.press_angle)) add("press_angle", "must be finite");
  if (!std::isfinite(spec.force_lo) || !std::isfinite(spec.force_hi) || spec.force_lo < 0 ||
      !(spec.force_lo <= spec.force_hi))
    add("force_band", "threshold band needs 0 <= lo <= hi");
  if (!(spec.interval_weight > 0) || !(spec.band_weight > 0))
    add("weights", "penalty weights must be > 0");

  std::set<std::string> seen;
  for (const auto& fp : spec.free) {
    const auto kind = parameter_kind(fp.name);
    if (!kind) {
      add(fp.name, "unknown parameter");
      continue;
    }
    if (*kind == ParameterKind::Force) add(fp.name, "not a design parameter");
    if (!seen.insert(fp.name).second) add(fp.name, "listed twice");
    if (!std::isfinite(fp.lower) || !std::isfinite(fp.upper) || !(fp.lower <= fp.upper))
      add(fp.name, "bounds need finite lower <= upper");
  }

  try {
    sweep_grid(spec.sweep);
    const double need_lo = std::min(spec.interval_lo, spec.press_angle);
    const double need_hi = std::max(spec.interval_hi, spec.press_angle);
    if (spec.sweep.zeta_lo > need_lo || spec.sweep.zeta_hi < need_hi)
      add("sweep", "sweep range must cover the target interval and the press direction");
  } catch (const std::invalid_argument& e) {
    add("sweep", e.what());
  }
  return report;
}

DesignEvaluation evaluate_design(const DesignSpec& spec, const Params& p) {
  DesignEvaluation ev;
  const SweepCurve curve = sweep(p, spec.sweep, SweepOptions{1, {}});
  ev.opening = curve.opening;
  const double none_penalty = 2.0 * to_degrees(spec.sweep.zeta_hi - spec.sweep.zeta_lo);

  if (ev.opening.empty()) {
    ev.interval_shortfall_deg = none_penalty;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : ev.opening.intervals) {
      const double shortfall = std::max(0.0, iv.lo - spec.interval_lo) +
                               std::max(0.0, spec.interval_hi - iv.hi);
      best = std::min(best, shortfall);
    }
    ev.interval_shortfall_deg = to_degrees(best);
  }

  const auto press = predict_opening(p, spec.press_angle);
  if (press.opens()) {
    ev.threshold = press.required_force;
    ev.band_violation_n = band_distance(press.required_force, spec.force_lo, spec.force_hi);
  } else {
    // Floor keeps the penalty positive when the press direction sits on a
    // refined endpoint but is itself closed.
    ev.press_distance_deg =
        std::max(distance_to_intervals(ev.opening, spec.press_angle).value_or(none_penalty),
                 to_degrees(kBisectionWidth));
    ev.band_violation_n = press.solution
                              ? band_distance(press.solution->xi_b, spec.force_lo, spec.force_hi)
                              : spec.force_hi - spec.force_lo + 1.0;
  }
  ev.penalty = spec.interval_weight * (ev.interval_shortfall_deg + ev.press_distance_deg) +
               spec.band_weight * ev.band_violation_n;
  return ev;
}

Verification verify_design(const DesignSpec& spec, const Params& p) {
  Verification v;
  const auto report = validate_parameters(p);
  if (!report.ok()) {
    v.violations.push_back("invalid parameters: " + report.to_string());
    return v;
  }
  const SweepCurve curve = sweep(p, spec.sweep, SweepOptions{1, {}});
  v.opening = opening_interval(curve, p);

  const bool covered =
      std::any_of(v.opening.intervals.begin(), v.opening.intervals.end(),
                  [&](const Interval& iv) { return iv.contains(spec.interval_lo, spec.interval_hi); });
  if (!covered)
    v.violations.push_back("interval: no opening interval contains [" + deg_text(spec.interval_lo) +
                           ", " + deg_text(spec.interval_hi) + "] deg");

  try {
    const double f = switching_threshold(p, spec.press_angle);
    v.threshold = f;
    if (f < spec.force_lo || f > spec.force_hi) {
      std::ostringstream os;
      os << "threshold: " << f << " N outside [" << spec.force_lo << ", " << spec.force_hi << "] N";
      v.violations.push_back(os.str());
    }
  } catch (const NotOpeningError& e) {
    v.violations.push_back(std::string("threshold: ") + e.what());
  }
  v.satisfied = v.violations.empty();
  return v;
}

DesignResult optimize_design(const DesignSpec& spec, const Params& start, int budget) {
  if (auto report = validate_spec(spec); !report.ok())
    throw ValidationError("invalid design spec\n" + report.to_string());
  if (auto report = validate_parameters(start); !report.ok())
    throw ValidationError("invalid start parameters\n" + report.to_string());
  if (budget < 1) throw ValidationError("budget must be >= 1");

  struct Axis {
    std::string name;
    double step;
    double initial;
    double lower;
    double upper;
  };
  std::vector<Axis> axes;
  Params x = start;
  for (const auto& fp : spec.free) {
    const double s = initial_step(*parameter_kind(fp.name));
    axes.push_back({fp.name, s, s, fp.lower, fp.upper});
    const double v = external_value(x, fp.name);
    const double clamped = std::clamp(v, fp.lower, fp.upper);
    if (clamped != v) set_external_value(x, fp.name, clamped);
  }
  if (auto report = validate_parameters(x); !report.ok())
    throw ValidationError("start clamped into the box is invalid\n" + report.to_string());

  DesignResult result;
  double best = evaluate_design(spec, x).penalty;
  result.evaluations = 1;

  auto finish = [&](bool try_feasible) {
    result.params = x;
    result.penalty = best;
    result.verification = verify_design(spec, x);
    result.status = try_feasible && result.verification.satisfied ? DesignStatus::Feasible
                                                                  : DesignStatus::Infeasible;
    return result;
  };

  while (best > 0 && result.evaluations < budget) {
    bool improved = false;
    for (auto& axis : axes) {
      for (int dir : {+1, -1}) {
        if (result.evaluations >= budget) break;
        const double current = external_value(x, axis.name);
        const double target = std::clamp(current + dir * axis.step, axis.lower, axis.upper);
        if (target == current) continue;
        Params candidate = x;
        set_external_value(candidate, axis.name, target);
        if (!validate_parameters(candidate).ok()) continue;
        const double penalty = evaluate_design(spec, candidate).penalty;
        ++result.evaluations;
        if (penalty < best) {
          best = penalty;
          x = candidate;
          improved = true;
          break;
        }
      }
      if (best == 0 || result.evaluations >= budget) break;
    }
    if (best == 0) break;
    if (!improved) {
      bool all_small = true;
      for (auto& axis : axes) {
        axis.step *= 0.5;
        if (axis.step >= axis.initial / 64.0) all_small = false;
      }
      if (all_small || axes.empty()) break;
    }
  }
  return finish(best == 0);
}

double sensitivity(const Params& p, std::string_view parameter, double zeta, double rel_step) {
  if (!parameter_kind(parameter)) throw std::invalid_argument("unknown parameter '" + std::string(parameter) + "'");
  if (!(rel_step > 0)) throw std::invalid_argument("sensitivity: rel_step must be > 0");
  const double value = parameter_value(p, parameter);
  const double h = rel_step * std::max(std::abs(value), 1.0);

  auto xi_at = [&](double v) {
    Params q = p;
    parameter_ref(q, parameter) = v;
    if (auto report = validate_parameters(q); !report.ok())
      throw ValidationError("sensitivity: perturbed parameters invalid\n" + report.to_string());
    const auto d = predict_opening(q, zeta);
    if (!d.opens()) throw NotOpeningError("sensitivity: links do not open at an evaluation point");
    return d.required_force;
  };
  xi_at(value);
  return (xi_at(value + h) - xi_at(value - h)) / (2.0 * h);
}

}  // namespace linkstat

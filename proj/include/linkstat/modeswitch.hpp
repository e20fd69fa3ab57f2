#pragma once

// Direction sweeps of the opening prediction, opening-interval extraction, and
// the parallel-grip / turn-over mode rule.

#include <map>
#include <optional>
#include <vector>

#include "linkstat/model.hpp"
#include "linkstat/statics.hpp"

namespace linkstat {

using Params = LinkageParametersd;
using Decision = OpeningDecision<double>;

/// Direction of the force a flat table applies to the fingertip.
inline const double kTablePressAngle = to_radians(-15.0);
/// Width to which opening-interval endpoints are bisected.
inline const double kBisectionWidth = to_radians(0.01);

/// Closed sweep grid, radians.
struct SweepSettings {
  double zeta_lo = to_radians(-30.0);
  double zeta_hi = to_radians(90.0);
  double step = to_radians(0.5);
};

struct SweepOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
  /// Directions at which the curve records the required opening force.
  std::vector<double> threshold_queries{kTablePressAngle};
};

enum class SampleStatus { Opens, Blocked, Singular, Indeterminate };
std::string_view to_string(SampleStatus status);
SampleStatus classify(const Decision& decision);

struct SweepSample {
  double zeta = 0;
  Decision decision;
  SampleStatus status = SampleStatus::Singular;

  /// Force drawn on the direction/magnitude plot: xi_b where the links open,
  /// 0 everywhere else.
  double plotted_force() const { return status == SampleStatus::Opens ? decision.required_force : 0.0; }
};

struct Interval {
  double lo = 0;
  double hi = 0;
  double width() const { return hi - lo; }
  bool contains(double a, double b) const { return lo <= a && b <= hi; }
  bool operator==(const Interval&) const = default;
};

struct OpeningIntervals {
  /// Disjoint opening intervals, widest first.
  std::vector<Interval> intervals;
  /// Runs of grid samples at which the balance system is singular.
  std::vector<Interval> singular_bands;

  bool empty() const { return intervals.empty(); }
};

struct SweepCurve {
  SweepSettings settings;
  std::vector<SweepSample> samples;  // strictly increasing zeta
  OpeningIntervals opening;
  std::map<double, double> threshold_at;  // query direction -> required force
};

/// Grid lo, lo + step, ..., always ending exactly at hi.
std::vector<double> sweep_grid(const SweepSettings& settings);

/// Evaluates predict_opening on every grid direction and extracts the opening
/// intervals. Throws std::invalid_argument on an empty or malformed range.
SweepCurve sweep(const Params& p, const SweepSettings& settings, const SweepOptions& options = {});

/// Contiguous opening runs of the curve, with each open/closed transition
/// refined by bisection to kBisectionWidth.
OpeningIntervals opening_interval(const SweepCurve& curve, const Params& p);

/// Required opening force xi_b at the press direction. Throws NotOpeningError
/// when the links do not open there.
double switching_threshold(const Params& p, double press_angle = kTablePressAngle);

enum class GraspMode { ParallelGrip, TurnOver };
std::string_view to_string(GraspMode mode);

struct ModeVerdict {
  GraspMode mode = GraspMode::ParallelGrip;
  double applied_force = 0;
  double threshold = 0;
};

/// Turn-over once the applied force reaches the threshold (inclusive).
ModeVerdict select_mode(double applied_force, double threshold);

/// Force an operator may apply in parallel-grip mode without switching.
double parallel_grip_budget(double threshold, double margin = 0.8);

/// LINKSTAT_THREADS if set to a positive integer, otherwise `fallback`.
unsigned threads_from_environment(unsigned fallback = 0);

}  // namespace linkstat

#include "linkstat/modeswitch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace linkstat {

std::string_view to_string(SampleStatus status) {
  switch (status) {
    case SampleStatus::Opens:
      return "opens";
    case SampleStatus::Blocked:
      return "blocked";
    case SampleStatus::Singular:
      return "singular";
    case SampleStatus::Indeterminate:
      return "indeterminate";
  }
  return "singular";
}

std::string_view to_string(GraspMode mode) {
  return mode == GraspMode::TurnOver ? "turn_over" : "parallel_grip";
}

SampleStatus classify(const Decision& decision) {
  if (decision.verdict == Verdict::Singular) return SampleStatus::Singular;
  if (!decision.sign_consistent) return SampleStatus::Indeterminate;
  return decision.verdict == Verdict::Opens ? SampleStatus::Opens : SampleStatus::Blocked;
}

std::vector<double> sweep_grid(const SweepSettings& s) {
  if (!std::isfinite(s.zeta_lo) || !std::isfinite(s.zeta_hi) || !std::isfinite(s.step))
    throw std::invalid_argument("sweep range must be finite");
  if (!(s.zeta_lo < s.zeta_hi)) throw std::invalid_argument("sweep range needs lo < hi");
  if (!(s.step > 0)) throw std::invalid_argument("sweep step must be > 0");

  const double span = s.zeta_hi - s.zeta_lo;
  const auto steps = static_cast<long>(std::floor(span / s.step + 1e-9));
  if (steps > 10'000'000) throw std::invalid_argument("sweep grid too fine");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 2);
  for (long i = 0; i <= steps; ++i) grid.push_back(s.zeta_lo + static_cast<double>(i) * s.step);
  // Snap a last point that only misses hi by rounding; otherwise append hi.
  if (std::abs(grid.back() - s.zeta_hi) <= 1e-6 * s.step) {
    if (grid.size() > 1)
      grid.back() = s.zeta_hi;
    else
      grid.push_back(s.zeta_hi);
  } else {
    grid.push_back(s.zeta_hi);
  }
  return grid;
}

unsigned threads_from_environment(unsigned fallback) {
  const char* env = std::getenv("LINKSTAT_THREADS");
  if (env == nullptr) return fallback;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0) return fallback;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

SweepCurve sweep(const Params& p, const SweepSettings& settings, const SweepOptions& options) {
  SweepCurve curve;
  curve.settings = settings;
  const auto grid = sweep_grid(settings);
  curve.samples.resize(grid.size());

  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& s = curve.samples[i];
      s.zeta = grid[i];
      s.decision = predict_opening(p, grid[i]);
      s.status = classify(s.decision);
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(grid.size()));
  if (threads == 1) {
    evaluate(0, grid.size());
  } else {
    // Each worker owns a contiguous slice; samples stay in grid order.
    std::vector<std::jthread> workers;
    const std::size_t chunk = (grid.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < grid.size(); begin += chunk)
      workers.emplace_back(evaluate, begin, std::min(grid.size(), begin + chunk));
  }

  curve.opening = opening_interval(curve, p);
  for (double query : options.threshold_queries) {
    const auto d = predict_opening(p, query);
    if (d.opens()) curve.threshold_at[query] = d.required_force;
  }
  return curve;
}

namespace {

bool is_open(const Params& p, double zeta) { return predict_opening(p, zeta).opens(); }

// Bisects between an open and a closed direction; returns the open-side end.
double refine_boundary(const Params& p, double open_zeta, double closed_zeta) {
  while (std::abs(open_zeta - closed_zeta) > kBisectionWidth) {
    const double mid = 0.5 * (open_zeta + closed_zeta);
    if (is_open(p, mid))
      open_zeta = mid;
    else
      closed_zeta = mid;
  }
  return open_zeta;
}

}  // namespace

OpeningIntervals opening_interval(const SweepCurve& curve, const Params& p) {
  OpeningIntervals out;
  const auto& samples = curve.samples;
  const std::size_t n = samples.size();

  for (std::size_t i = 0; i < n;) {
    const auto status = samples[i].status;
    std::size_t j = i;
    while (j + 1 < n && samples[j + 1].status == status) ++j;
    if (status == SampleStatus::Opens) {
      Interval run{samples[i].zeta, samples[j].zeta};
      if (i > 0) run.lo = refine_boundary(p, samples[i].zeta, samples[i - 1].zeta);
      if (j + 1 < n) run.hi = refine_boundary(p, samples[j].zeta, samples[j + 1].zeta);
      out.intervals.push_back(run);
    } else if (status == SampleStatus::Singular) {
      out.singular_bands.push_back({samples[i].zeta, samples[j].zeta});
    }
    i = j + 1;
  }
  std::stable_sort(out.intervals.begin(), out.intervals.end(),
                   [](const Interval& a, const Interval& b) { return a.width() > b.width(); });
  return out;
}

double switching_threshold(const Params& p, double press_angle) {
  const auto d = predict_opening(p, press_angle);
  if (!d.opens()) {
    std::string why = d.verdict == Verdict::Singular ? "singular balance system"
                      : d.indeterminate()            ? "friction sign indeterminate"
                                                     : std::string(to_string(d.reason));
    throw NotOpeningError("links do not open at the press direction (" + why + ")");
  }
  return d.required_force;
}

ModeVerdict select_mode(double applied_force, double threshold) {
  if (!(applied_force >= 0) || !(threshold >= 0))
    throw std::invalid_argument("select_mode: forces must be >= 0");
  return {applied_force >= threshold ? GraspMode::TurnOver : GraspMode::ParallelGrip, applied_force,
          threshold};
}

double parallel_grip_budget(double threshold, double margin) {
  if (!(threshold >= 0) || !(margin > 0 && margin <= 1))
    throw std::invalid_argument("parallel_grip_budget: threshold >= 0 and margin in (0, 1]");
  return margin * threshold;
}

}  // namespace linkstat

#pragma once

// Text formats: sectioned parameter files, measurement CSV, sweep CSV with its
// key=value summary, comparison tables and an SVG of the sweep curve.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkstat/design.hpp"
#include "linkstat/modeswitch.hpp"

namespace linkstat {

/// Evaluates an arithmetic expression: numbers, + - * /, parentheses, and
/// sin/cos/tan of degree arguments plus sqrt. Throws ParseError.
double evaluate_expression(std::string_view text);

/// Everything a parameter file can carry besides the linkage itself.
struct ParameterDocument {
  Params params;
  SweepSettings sweep;
  double press_angle = kTablePressAngle;
  std::optional<DesignSpec> design;
  int design_budget = 500;
};

/// Parses a full document. Sections [lengths_mm], [angles_deg], [spring],
/// [contact] and [solver] are required; [posture], [sweep] and [design] are
/// optional. Unknown sections or keys, duplicates and syntax errors throw
/// ParseError; invariant violations throw ValidationError naming the fields.
ParameterDocument parse_parameter_document(std::string_view text);

Params parse_parameter_file(std::string_view text);

/// Writes the linkage sections. Non-angle values use the shortest text that
/// reads back to the same double; angles are degrees with 15 significant digits.
std::string serialize_parameters(const Params& p);

/// The shipped analysis parameter file, with the derived lengths kept as
/// expressions.
std::string default_parameter_file_text();

struct Measurement {
  double zeta = 0;  // radians
  double force = 0;
};

/// CSV with header `zeta_deg,measured_force_n`.
std::vector<Measurement> parse_measurements(std::string_view text);

struct ComparisonRow {
  double zeta = 0;
  double measured = 0;
  std::optional<double> predicted;  // empty when the links do not open there
  double abs_deviation = 0;
  double rel_deviation = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  double mean_abs_deviation = 0;  // over rows with a prediction
  int compared = 0;
};

ComparisonTable compare_measurements(const Params& p, const std::vector<Measurement>& measurements);

/// 9 significant digits, '.' decimal separator regardless of locale.
std::string format_number(double value);

inline constexpr std::string_view kSweepCsvHeader =
    "zeta_deg,xi_b_n,opens,blocked_reason,f_rx_n,f_sx_n,sign_beta3,sign_consistent";

std::string sweep_csv(const SweepCurve& curve);
std::string sweep_summary(const SweepCurve& curve, double press_angle);
std::string sweep_svg(const SweepCurve& curve);
std::string comparison_csv(const ComparisonTable& table);

void write_text_file(const std::string& path, std::string_view contents);
std::string read_text_file(const std::string& path);

}  // namespace linkstat

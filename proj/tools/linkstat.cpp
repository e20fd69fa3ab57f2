// linkstat: command-line front end for the finger linkage statics toolkit.
//
// Exit codes: 0 success, 2 parse/validation failure, 3 singular or
// indeterminate analysis at the requested point, 4 infeasible optimization,
// 5 I/O failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "linkstat/design.hpp"
#include "linkstat/io.hpp"
#include "linkstat/modeswitch.hpp"

namespace {

using namespace linkstat;

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kSingular = 3,
  kInfeasible = 4,
  kIoFailure = 5,
};

ParameterDocument load(const std::string& path) {
  return parse_parameter_document(read_text_file(path));
}

void print_decision(std::ostream& os, const Params& p, double zeta, const Decision& d) {
  os << "zeta_deg=" << format_number(to_degrees(zeta)) << '\n';
  os << "verdict=" << to_string(classify(d)) << '\n';
  if (d.verdict == Verdict::Singular) {
    os << "detail=" << d.detail << '\n';
    return;
  }
  const auto& sol = *d.solution;
  os << "opening_rule=" << to_string(p.opening_rule) << '\n';
  os << "blocked_reason=" << to_string(d.reason) << '\n';
  os << "xi_b_n=" << format_number(sol.xi_b) << '\n';
  os << "beta_3b_n=" << format_number(sol.beta_3b) << '\n';
  os << "required_force_n=" << format_number(d.required_force) << '\n';
  os << "f_rx_n=" << format_number(d.forces.f_Rx) << '\n';
  os << "f_sx_n=" << format_number(d.forces.f_Sx) << '\n';
  os << "sign_beta3=" << sol.system.sign_beta3 << '\n';
  os << "sign_consistent=" << (sol.sign_consistent ? 1 : 0) << '\n';
  os << "gamma=" << format_number(sol.system.gamma) << '\n';
  os << "lambda=" << format_number(sol.system.lambda) << '\n';
  os << "spring_force_n=" << format_number(sol.system.f_k) << '\n';
}

int run_validate(const std::string& path) {
  const auto doc = load(path);
  std::cout << "ok\n";
  if (doc.design) std::cout << "design_free_parameters=" << doc.design->free.size() << '\n';
  return kOk;
}

int run_analyze(const std::string& path, double zeta_deg, std::optional<double> applied) {
  const auto doc = load(path);
  const double zeta = to_radians(zeta_deg);
  const auto d = predict_opening(doc.params, zeta);
  print_decision(std::cout, doc.params, zeta, d);
  if (d.verdict == Verdict::Singular || d.indeterminate()) return kSingular;
  if (applied) {
    try {
      const double threshold = switching_threshold(doc.params, zeta);
      const auto verdict = select_mode(*applied, threshold);
      std::cout << "applied_force_n=" << format_number(*applied) << '\n';
      std::cout << "mode=" << to_string(verdict.mode) << '\n';
    } catch (const NotOpeningError&) {
      std::cout << "mode=" << to_string(GraspMode::ParallelGrip) << '\n';
    }
  }
  return kOk;
}

struct SweepArgs {
  std::string out;
  std::string svg;
  std::optional<double> lo, hi, step, press;
};

int run_sweep(const std::string& path, const SweepArgs& args) {
  const auto doc = load(path);
  SweepSettings settings = doc.sweep;
  if (args.lo) settings.zeta_lo = to_radians(*args.lo);
  if (args.hi) settings.zeta_hi = to_radians(*args.hi);
  if (args.step) settings.step = to_radians(*args.step);
  const double press = args.press ? to_radians(*args.press) : doc.press_angle;
  try {
    sweep_grid(settings);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid sweep range: " << e.what() << '\n';
    return kInvalidInput;
  }
  SweepOptions options;
  options.threads = threads_from_environment(0);
  options.threshold_queries = {press};
  const auto curve = sweep(doc.params, settings, options);

  write_text_file(args.out, sweep_csv(curve));
  const std::string summary = sweep_summary(curve, press);
  write_text_file(args.out + ".summary", summary);
  if (!args.svg.empty()) write_text_file(args.svg, sweep_svg(curve));
  std::cout << summary;
  return kOk;
}

int run_optimize(const std::string& path, std::optional<int> budget, const std::string& out) {
  const auto doc = load(path);
  if (!doc.design) throw ParseError("optimize needs a [design] section");
  const auto result = optimize_design(*doc.design, doc.params, budget.value_or(doc.design_budget));
  std::cout << "status=" << (result.status == DesignStatus::Feasible ? "feasible" : "infeasible")
            << '\n';
  std::cout << "evaluations=" << result.evaluations << '\n';
  std::cout << "penalty=" << format_number(result.penalty) << '\n';
  const auto& ivs = result.verification.opening.intervals;
  if (!ivs.empty()) {
    std::cout << "interval_lo_deg=" << format_number(to_degrees(ivs.front().lo)) << '\n';
    std::cout << "interval_hi_deg=" << format_number(to_degrees(ivs.front().hi)) << '\n';
  }
  if (result.verification.threshold)
    std::cout << "threshold_n=" << format_number(*result.verification.threshold) << '\n';
  for (const auto& v : result.verification.violations) std::cout << "violation=" << v << '\n';
  std::cout << "\n" << serialize_parameters(result.params);
  if (!out.empty()) write_text_file(out, serialize_parameters(result.params));
  return result.status == DesignStatus::Feasible ? kOk : kInfeasible;
}

int run_compare(const std::string& path, const std::string& measurements, const std::string& out) {
  const auto doc = load(path);
  const auto rows = parse_measurements(read_text_file(measurements));
  const auto table = compare_measurements(doc.params, rows);
  const std::string csv = comparison_csv(table);
  if (!out.empty()) write_text_file(out, csv);
  std::cout << csv;
  std::cout << "compared=" << table.compared << '\n';
  std::cout << "mean_abs_deviation_n=" << format_number(table.mean_abs_deviation) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statics of the variable grasping-surface finger linkage"};
  app.require_subcommand(1);

  std::string params_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a parameter file");
  validate->add_option("params", params_path, "Parameter file")->required();

  double zeta_deg = 0;
  std::optional<double> applied;
  auto* analyze = app.add_subcommand("analyze", "Opening decision at one force direction");
  analyze->add_option("params", params_path, "Parameter file")->required();
  analyze->add_option("--zeta", zeta_deg, "Force direction in degrees")->required();
  analyze->add_option("--applied", applied, "Applied force (N) for the grasp mode rule");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Direction sweep written as CSV");
  sweep_cmd->add_option("params", params_path, "Parameter file")->required();
  sweep_cmd->add_option("--out", sweep_args.out, "CSV output path")->required();
  sweep_cmd->add_option("--lo", sweep_args.lo, "Lower direction (deg)");
  sweep_cmd->add_option("--hi", sweep_args.hi, "Upper direction (deg)");
  sweep_cmd->add_option("--step", sweep_args.step, "Step (deg)");
  sweep_cmd->add_option("--press", sweep_args.press, "Press direction for the threshold (deg)");
  sweep_cmd->add_option("--svg", sweep_args.svg, "Also write an SVG plot of the curve");

  std::optional<int> budget;
  std::string out_path;
  auto* optimize = app.add_subcommand("optimize", "Search parameters meeting the [design] section");
  optimize->add_option("params", params_path, "Parameter file with a [design] section")->required();
  optimize->add_option("--budget", budget, "Evaluation budget");
  optimize->add_option("--out", out_path, "Write the resulting parameters here");

  std::string measurements_path;
  auto* compare = app.add_subcommand("compare", "Compare predicted opening forces with measurements");
  compare->add_option("params", params_path, "Parameter file")->required();
  compare->add_option("measurements", measurements_path, "CSV zeta_deg,measured_force_n")->required();
  compare->add_option("--out", out_path, "Write the comparison CSV here");

  auto* defaults = app.add_subcommand("defaults", "Print the default parameter file");
  defaults->add_option("--out", out_path, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*validate) return run_validate(params_path);
    if (*analyze) return run_analyze(params_path, zeta_deg, applied);
    if (*sweep_cmd) return run_sweep(params_path, sweep_args);
    if (*optimize) return run_optimize(params_path, budget, out_path);
    if (*compare) return run_compare(params_path, measurements_path, out_path);
    if (*defaults) {
      if (out_path.empty())
        std::cout << default_parameter_file_text();
      else
        write_text_file(out_path, default_parameter_file_text());
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SingularError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSingular;
  } catch (const NotOpeningError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSingular;
  }
  return kOk;
}

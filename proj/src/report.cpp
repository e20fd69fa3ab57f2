#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "linkstat/io.hpp"

namespace linkstat {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0) value = 0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 9);
  return std::string(buf.data(), ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, int line, const char* what) {
  field = trim(field);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  return v;
}

std::string reason_text(const SweepSample& s) {
  switch (s.status) {
    case SampleStatus::Opens:
      return "none";
    case SampleStatus::Blocked:
      return std::string(to_string(s.decision.reason));
    case SampleStatus::Singular:
      return "singular";
    case SampleStatus::Indeterminate:
      return "indeterminate";
  }
  return "none";
}

std::string interval_list(const std::vector<Interval>& intervals) {
  std::string out;
  for (const auto& iv : intervals) {
    if (!out.empty()) out += ';';
    out += format_number(to_degrees(iv.lo)) + ':' + format_number(to_degrees(iv.hi));
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::vector<Measurement> parse_measurements(std::string_view text) {
  std::vector<Measurement> rows;
  bool header_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "zeta_deg,measured_force_n")
        throw ParseError("expected header 'zeta_deg,measured_force_n'", line_no);
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two comma-separated fields", line_no);
    const double zeta_deg = parse_field(line.substr(0, comma), line_no, "angle");
    const double force = parse_field(line.substr(comma + 1), line_no, "force");
    if (!std::isfinite(zeta_deg)) throw ParseError("angle must be finite", line_no);
    if (!std::isfinite(force) || force < 0) throw ParseError("force must be finite and >= 0", line_no);
    rows.push_back({to_radians(zeta_deg), force});
  }
  if (!header_seen) throw ParseError("measurement file is empty");
  return rows;
}

ComparisonTable compare_measurements(const Params& p, const std::vector<Measurement>& measurements) {
  ComparisonTable table;
  double total = 0;
  for (const auto& m : measurements) {
    ComparisonRow row;
    row.zeta = m.zeta;
    row.measured = m.force;
    const auto d = predict_opening(p, m.zeta);
    if (d.opens()) {
      row.predicted = d.required_force;
      row.abs_deviation = std::abs(m.force - d.required_force);
      row.rel_deviation = d.required_force != 0 ? row.abs_deviation / std::abs(d.required_force)
                          : row.abs_deviation == 0 ? 0.0
                                                   : std::numeric_limits<double>::infinity();
      total += row.abs_deviation;
      ++table.compared;
    } else {
      row.abs_deviation = std::numeric_limits<double>::quiet_NaN();
      row.rel_deviation = std::numeric_limits<double>::quiet_NaN();
    }
    table.rows.push_back(row);
  }
  table.mean_abs_deviation = table.compared > 0 ? total / table.compared : 0.0;
  return table;
}

std::string sweep_csv(const SweepCurve& curve) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& s : curve.samples) {
    const bool solved = s.decision.solution.has_value();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out += format_number(to_degrees(s.zeta));
    out += ',' + format_number(s.plotted_force());
    out += s.status == SampleStatus::Opens ? ",1," : ",0,";
    out += reason_text(s);
    out += ',' + format_number(solved ? s.decision.forces.f_Rx : nan);
    out += ',' + format_number(solved ? s.decision.forces.f_Sx : nan);
    out += ',' + std::to_string(solved ? s.decision.solution->system.sign_beta3 : 0);
    out += s.decision.sign_consistent ? ",1\n" : ",0\n";
  }
  return out;
}

std::string sweep_summary(const SweepCurve& curve, double press_angle) {
  std::array<int, 4> counts{};
  for (const auto& s : curve.samples) ++counts[static_cast<std::size_t>(s.status)];
  const auto& ivs = curve.opening.intervals;

  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  kv("zeta_lo_deg", format_number(to_degrees(curve.settings.zeta_lo)));
  kv("zeta_hi_deg", format_number(to_degrees(curve.settings.zeta_hi)));
  kv("step_deg", format_number(to_degrees(curve.settings.step)));
  kv("samples", std::to_string(curve.samples.size()));
  kv("opens_samples", std::to_string(counts[0]));
  kv("blocked_samples", std::to_string(counts[1]));
  kv("singular_samples", std::to_string(counts[2]));
  kv("indeterminate_samples", std::to_string(counts[3]));
  kv("interval_count", std::to_string(ivs.size()));
  kv("interval_lo_deg", ivs.empty() ? "none" : format_number(to_degrees(ivs.front().lo)));
  kv("interval_hi_deg", ivs.empty() ? "none" : format_number(to_degrees(ivs.front().hi)));
  kv("intervals_deg", interval_list(ivs));
  kv("singular_bands_deg", interval_list(curve.opening.singular_bands));
  kv("press_deg", format_number(to_degrees(press_angle)));
  const auto it = curve.threshold_at.find(press_angle);
  kv("threshold_n", it == curve.threshold_at.end() ? "not_opening" : format_number(it->second));
  if (it != curve.threshold_at.end())
    kv("parallel_grip_budget_n", format_number(parallel_grip_budget(it->second)));
  return out;
}

std::string sweep_svg(const SweepCurve& curve) {
  constexpr double width = 640, height = 400, margin = 50;
  double fmax = 0;
  for (const auto& s : curve.samples) fmax = std::max(fmax, s.plotted_force());
  if (fmax <= 0) fmax = 1;
  const double z0 = to_degrees(curve.settings.zeta_lo);
  const double z1 = to_degrees(curve.settings.zeta_hi);
  auto px = [&](double zeta) { return margin + (to_degrees(zeta) - z0) / (z1 - z0) * (width - 2 * margin); };
  auto py = [&](double f) { return height - margin - f / fmax * (height - 2 * margin); };

  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
     << height - margin << "\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const auto& s : curve.samples)
    os << format_number(px(s.zeta)) << ',' << format_number(py(s.plotted_force())) << ' ';
  os << "\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">zeta [deg] " << format_number(z0) << " .. "
     << format_number(z1) << "</text>\n";
  os << "<text x=\"10\" y=\"" << margin - 10 << "\" font-size=\"12\">xi_b [N] max "
     << format_number(fmax) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "zeta_deg,predicted_n,measured_n,abs_dev_n,rel_dev,status\n";
  for (const auto& r : table.rows) {
    out += format_number(to_degrees(r.zeta)) + ',';
    out += (r.predicted ? format_number(*r.predicted) : std::string()) + ',';
    out += format_number(r.measured) + ',';
    out += (r.predicted ? format_number(r.abs_deviation) : std::string()) + ',';
    out += (r.predicted ? format_number(r.rel_deviation) : std::string()) + ',';
    out += r.predicted ? "ok\n" : "not_opening\n";
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

}  // namespace linkstat

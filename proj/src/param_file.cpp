#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>

#include "linkstat/io.hpp"

namespace linkstat {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct SectionSchema {
  std::string_view name;
  bool required;
  std::vector<std::string_view> required_keys;
  std::vector<std::string_view> optional_keys;
};

const std::vector<SectionSchema>& schema() {
  static const std::vector<SectionSchema> s{
      {"lengths_mm", true, {"l0", "l1", "l2", "l3", "l4"}, {}},
      {"angles_deg", true, {"theta0", "theta1", "theta2", "theta3", "theta4", "theta5"}, {}},
      {"spring", true, {"k_n_per_mm", "natural_length_mm"}, {}},
      {"contact", true, {"mu"}, {}},
      {"solver", true, {"epsilon_n"}, {"opening_rule"}},
      {"posture", false, {}, {"surface_closed_deg", "surface_open_deg"}},
      {"sweep", false, {}, {"zeta_lo_deg", "zeta_hi_deg", "step_deg", "press_deg"}},
      {"design", false, {"interval_lo_deg", "interval_hi_deg", "force_lo_n", "force_hi_n"},
       {"press_deg", "budget"}},
  };
  return s;
}

const SectionSchema* find_section(std::string_view name) {
  for (const auto& s : schema())
    if (s.name == name) return &s;
  return nullptr;
}

bool key_allowed(const SectionSchema& s, std::string_view key) {
  for (auto k : s.required_keys)
    if (k == key) return true;
  for (auto k : s.optional_keys)
    if (k == key) return true;
  // [design] free_<parameter> = lower, upper
  return s.name == "design" && key.starts_with("free_");
}

using Sections = std::map<std::string, std::vector<Entry>, std::less<>>;

Sections tokenize(std::string_view text) {
  Sections sections;
  std::string current;
  std::set<std::pair<std::string, std::string>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!find_section(name)) throw ParseError("unknown section [" + std::string(name) + "]", line_no);
      if (sections.count(name)) throw ParseError("duplicate section [" + std::string(name) + "]", line_no);
      current = std::string(name);
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    if (current.empty()) throw ParseError("key outside of any section", line_no);
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    if (!key_allowed(*find_section(current), key))
      throw ParseError("unknown key '" + key + "' in [" + current + "]", line_no);
    if (!seen.insert({current, key}).second)
      throw ParseError("duplicate key '" + key + "' in [" + current + "]", line_no);
    sections[current].push_back({key, value, line_no});
  }

  for (const auto& s : schema()) {
    auto it = sections.find(s.name);
    if (it == sections.end()) {
      if (s.required) throw ParseError("missing required section [" + std::string(s.name) + "]");
      continue;
    }
    for (auto key : s.required_keys) {
      bool found = false;
      for (const auto& e : it->second) found = found || e.key == key;
      if (!found)
        throw ParseError("missing key '" + std::string(key) + "' in [" + std::string(s.name) + "]");
    }
  }
  return sections;
}

const Entry* lookup(const Sections& sections, std::string_view section, std::string_view key) {
  auto it = sections.find(section);
  if (it == sections.end()) return nullptr;
  for (const auto& e : it->second)
    if (e.key == key) return &e;
  return nullptr;
}

double number(const Entry& e) {
  try {
    return evaluate_expression(e.value);
  } catch (const ParseError& err) {
    throw ParseError(std::string(err.what()), e.line);
  }
}

double required_number(const Sections& s, std::string_view section, std::string_view key) {
  return number(*lookup(s, section, key));
}

std::optional<double> optional_number(const Sections& s, std::string_view section,
                                      std::string_view key) {
  if (const Entry* e = lookup(s, section, key)) return number(*e);
  return std::nullopt;
}

// "lower, upper"
FreeParameter parse_free(const Entry& e) {
  FreeParameter fp;
  fp.name = e.key.substr(5);
  if (!parameter_kind(fp.name)) throw ParseError("unknown design parameter '" + fp.name + "'", e.line);
  const auto comma = e.value.find(',');
  if (comma == std::string::npos) throw ParseError("expected 'lower, upper' for " + e.key, e.line);
  try {
    fp.lower = evaluate_expression(trim(std::string_view(e.value).substr(0, comma)));
    fp.upper = evaluate_expression(trim(std::string_view(e.value).substr(comma + 1)));
  } catch (const ParseError& err) {
    throw ParseError(err.what(), e.line);
  }
  return fp;
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string angle_text(double radians) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), to_degrees(radians),
                                       std::chars_format::general, 15);
  return std::string(buf.data(), ptr);
}

}  // namespace

ParameterDocument parse_parameter_document(std::string_view text) {
  const Sections s = tokenize(text);
  ParameterDocument doc;
  Params& p = doc.params;
  p.l0 = required_number(s, "lengths_mm", "l0");
  p.l1 = required_number(s, "lengths_mm", "l1");
  p.l2 = required_number(s, "lengths_mm", "l2");
  p.l3 = required_number(s, "lengths_mm", "l3");
  p.l4 = required_number(s, "lengths_mm", "l4");
  for (std::size_t i = 0; i < p.theta.size(); ++i)
    p.theta[i] = to_radians(required_number(s, "angles_deg", "theta" + std::to_string(i)));
  p.spring_k = required_number(s, "spring", "k_n_per_mm");
  p.natural_length = required_number(s, "spring", "natural_length_mm");
  p.mu = required_number(s, "contact", "mu");
  p.epsilon = required_number(s, "solver", "epsilon_n");
  if (const Entry* e = lookup(s, "solver", "opening_rule")) {
    const auto rule = opening_rule_from_string(e->value);
    if (!rule) throw ParseError("opening_rule must be 'reaction' or 'literal'", e->line);
    p.opening_rule = *rule;
  }
  if (auto v = optional_number(s, "posture", "surface_closed_deg")) p.surface_angle_closed = to_radians(*v);
  if (auto v = optional_number(s, "posture", "surface_open_deg")) p.surface_angle_open = to_radians(*v);

  if (auto v = optional_number(s, "sweep", "zeta_lo_deg")) doc.sweep.zeta_lo = to_radians(*v);
  if (auto v = optional_number(s, "sweep", "zeta_hi_deg")) doc.sweep.zeta_hi = to_radians(*v);
  if (auto v = optional_number(s, "sweep", "step_deg")) doc.sweep.step = to_radians(*v);
  if (auto v = optional_number(s, "sweep", "press_deg")) doc.press_angle = to_radians(*v);

  if (s.count("design")) {
    DesignSpec spec;
    spec.interval_lo = to_radians(required_number(s, "design", "interval_lo_deg"));
    spec.interval_hi = to_radians(required_number(s, "design", "interval_hi_deg"));
    spec.force_lo = required_number(s, "design", "force_lo_n");
    spec.force_hi = required_number(s, "design", "force_hi_n");
    spec.press_angle = doc.press_angle;
    if (auto v = optional_number(s, "design", "press_deg")) spec.press_angle = to_radians(*v);
    spec.sweep = doc.sweep;
    if (const Entry* e = lookup(s, "design", "budget")) {
      const double b = number(*e);
      if (!(b >= 1) || b != std::floor(b) || b > 1e9)
        throw ParseError("budget must be a positive integer", e->line);
      doc.design_budget = static_cast<int>(b);
    }
    for (const auto& e : s.at("design"))
      if (e.key.starts_with("free_")) spec.free.push_back(parse_free(e));
    if (auto report = validate_spec(spec); !report.ok())
      throw ValidationError("invalid [design] section\n" + report.to_string());
    doc.design = std::move(spec);
  }

  if (auto report = validate_parameters(p); !report.ok())
    throw ValidationError("invalid parameters\n" + report.to_string());
  return doc;
}

Params parse_parameter_file(std::string_view text) { return parse_parameter_document(text).params; }

std::string serialize_parameters(const Params& p) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  out += "[lengths_mm]\n";
  line("l0", shortest(p.l0));
  line("l1", shortest(p.l1));
  line("l2", shortest(p.l2));
  line("l3", shortest(p.l3));
  line("l4", shortest(p.l4));
  out += "\n[angles_deg]\n";
  for (std::size_t i = 0; i < p.theta.size(); ++i) line("theta" + std::to_string(i), angle_text(p.theta[i]));
  out += "\n[spring]\n";
  line("k_n_per_mm", shortest(p.spring_k));
  line("natural_length_mm", shortest(p.natural_length));
  out += "\n[contact]\n";
  line("mu", shortest(p.mu));
  out += "\n[solver]\n";
  line("epsilon_n", shortest(p.epsilon));
  line("opening_rule", std::string(to_string(p.opening_rule)));
  out += "\n[posture]\n";
  line("surface_closed_deg", angle_text(p.surface_angle_closed));
  line("surface_open_deg", angle_text(p.surface_angle_open));
  return out;
}

std::string default_parameter_file_text() {
  return R"(# Finger linkage analysis parameters.
# Lengths may be expressions; sin/cos/tan take degrees.

[lengths_mm]
l0 = 10.93
l1 = 2*12
l2 = 12
l3 = 22 + 2.5*cos(15)*sin(15)
l4 = 2.5*cos(15)

[angles_deg]
theta0 = 30
theta1 = 9
theta2 = 18.5
theta3 = 15
theta4 = 7.44
theta5 = 33.1

[spring]
k_n_per_mm = 0.862
natural_length_mm = 9.7

[contact]
mu = 0.6

[solver]
epsilon_n = 0.1
# reaction: links open when the perturbed f_Rx <= 0 and f_Sx >= 0
# literal:  links open when the perturbed f_Rx >= 0 and f_Sx <= 0
opening_rule = reaction

[posture]
surface_closed_deg = 90
surface_open_deg = 30

[sweep]
zeta_lo_deg = -30
zeta_hi_deg = 90
step_deg = 0.5
press_deg = -15
)";
}

}  // namespace linkstat

#pragma once

// Linkage parameters of the passive grasping-surface finger, their validation,
// and a planar joint layout used for geometric consistency checks.
//
// All angles are radians inside the library; degrees appear only at the file
// and CLI boundary (see to_radians / to_degrees).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkstat/errors.hpp"

namespace linkstat {

template <typename Scalar>
constexpr Scalar to_radians(Scalar degrees) {
  return degrees * (std::numbers::pi_v<Scalar> / Scalar(180));
}

template <typename Scalar>
constexpr Scalar to_degrees(Scalar radians) {
  return radians * (Scalar(180) / std::numbers::pi_v<Scalar>);
}

/// How the sign of the ε-perturbed joint forces is read as an opening verdict.
///
/// ReactionSign treats the perturbed f_Rx, f_Sx as the forces the joints need to
/// stay in balance; the joints move against them, so R moving to +x and S to -x
/// (the links separating) shows up as f_Rx <= 0 and f_Sx >= 0.
/// LiteralSign applies f_Rx >= 0 and f_Sx <= 0 directly to those values.
enum class OpeningRule { ReactionSign, LiteralSign };

std::string_view to_string(OpeningRule rule);
std::optional<OpeningRule> opening_rule_from_string(std::string_view text);

/// Geometry, spring, friction and perturbation settings of the finger linkage.
///
/// theta[i] is the closed-configuration angle theta_i (i = 0..5). Links 1 and 4
/// share length l1; l0 is the lever arm of the spring anchors.
template <typename Scalar>
struct LinkageParameters {
  Scalar l0{};
  Scalar l1{};
  Scalar l2{};
  Scalar l3{};
  Scalar l4{};
  std::array<Scalar, 6> theta{};
  Scalar spring_k{};        // N/mm
  Scalar natural_length{};  // mm
  Scalar mu{};
  Scalar epsilon{};  // N
  Scalar surface_angle_closed = to_radians(Scalar(90));
  Scalar surface_angle_open = to_radians(Scalar(30));
  OpeningRule opening_rule = OpeningRule::ReactionSign;

  template <typename Other>
  LinkageParameters<Other> cast() const {
    LinkageParameters<Other> out;
    out.l0 = Other(l0);
    out.l1 = Other(l1);
    out.l2 = Other(l2);
    out.l3 = Other(l3);
    out.l4 = Other(l4);
    for (std::size_t i = 0; i < theta.size(); ++i) out.theta[i] = Other(theta[i]);
    out.spring_k = Other(spring_k);
    out.natural_length = Other(natural_length);
    out.mu = Other(mu);
    out.epsilon = Other(epsilon);
    out.surface_angle_closed = Other(surface_angle_closed);
    out.surface_angle_open = Other(surface_angle_open);
    out.opening_rule = opening_rule;
    return out;
  }

  bool operator==(const LinkageParameters&) const = default;
};

using LinkageParametersd = LinkageParameters<double>;

/// Analysis values of the prototype finger. Derived lengths are evaluated here:
/// l1 = 2 l2, l4 = 2.5 cos 15deg, l3 = 22 + l4 sin 15deg.
template <typename Scalar = double>
LinkageParameters<Scalar> default_parameters() {
  using std::cos;
  using std::sin;
  LinkageParameters<Scalar> p;
  p.l0 = Scalar(10.93);
  p.l2 = Scalar(12);
  p.l1 = Scalar(2) * p.l2;
  p.l4 = Scalar(2.5) * cos(to_radians(Scalar(15)));
  p.l3 = Scalar(22) + p.l4 * sin(to_radians(Scalar(15)));
  const std::array<Scalar, 6> degrees{Scalar(30),   Scalar(9),    Scalar(18.5),
                                      Scalar(15),   Scalar(7.44), Scalar(33.1)};
  for (std::size_t i = 0; i < degrees.size(); ++i) p.theta[i] = to_radians(degrees[i]);
  p.natural_length = Scalar(9.7);
  p.spring_k = Scalar(0.862);
  p.mu = Scalar(0.6);
  p.epsilon = Scalar(0.1);
  return p;
}

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(std::string_view field) const {
    for (const auto& v : violations)
      if (v.field == field) return true;
    return false;
  }
  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) out += v.field + ": " + v.message + "\n";
    return out;
  }
};

namespace detail {
// |x| below this counts as zero for the denominators the statics divide by.
template <typename Scalar>
constexpr Scalar degenerate_tolerance() {
  return Scalar(1e-12);
}
}  // namespace detail

/// Checks every parameter invariant and reports all violations.
template <typename Scalar>
ValidationReport validate_parameters(const LinkageParameters<Scalar>& p) {
  using std::abs;
  using std::cos;
  using std::isfinite;
  using std::sin;
  ValidationReport report;
  auto add = [&](std::string field, std::string message) {
    report.violations.push_back({std::move(field), std::move(message)});
  };

  const std::array<std::pair<const char*, Scalar>, 5> lengths{
      {{"l0", p.l0}, {"l1", p.l1}, {"l2", p.l2}, {"l3", p.l3}, {"l4", p.l4}}};
  for (const auto& [name, value] : lengths) {
    if (!isfinite(value) || !(value > Scalar(0))) add(name, "length must be finite and > 0");
  }
  if (!isfinite(p.natural_length) || p.natural_length < Scalar(0))
    add("l_n", "spring natural length must be finite and >= 0");
  if (!isfinite(p.spring_k) || p.spring_k < Scalar(0))
    add("k", "spring constant must be finite and >= 0");
  if (!isfinite(p.mu) || p.mu < Scalar(0)) add("mu", "friction coefficient must be finite and >= 0");
  if (!isfinite(p.epsilon) || !(p.epsilon > Scalar(0)))
    add("epsilon", "perturbation force must be finite and > 0");

  const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
  bool angles_finite = true;
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    const Scalar t = p.theta[i];
    if (!isfinite(t)) angles_finite = false;
    if (!isfinite(t) || !(t > -half_pi && t < half_pi))
      add("theta" + std::to_string(i), "angle must lie strictly inside (-90, 90) degrees");
  }
  if (angles_finite) {
    const Scalar tol = detail::degenerate_tolerance<Scalar>();
    if (abs(cos(p.theta[1])) <= tol) add("cos(theta1)", "must be nonzero");
    if (abs(cos(p.theta[4])) <= tol) add("cos(theta4)", "must be nonzero");
    if (abs(sin(p.theta[2] + p.theta[3])) <= tol)
      add("sin(theta2+theta3)", "must be nonzero (gamma denominator)");
  }

  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (!isfinite(p.surface_angle_closed) || !(p.surface_angle_closed > Scalar(0)) ||
      p.surface_angle_closed > pi)
    add("surface_angle_closed", "must lie in (0, 180] degrees");
  if (!isfinite(p.surface_angle_open) || !(p.surface_angle_open > Scalar(0)) ||
      !(p.surface_angle_open < p.surface_angle_closed))
    add("surface_angle_open", "must lie in (0, surface_angle_closed)");
  return report;
}

/// Planar joint coordinates (mm). O is the origin and the y-axis runs along
/// the O-T-Q line.
template <typename Scalar>
struct JointLayout {
  using Point = Eigen::Matrix<Scalar, 2, 1>;
  Point O;
  Point R;
  Point S;
  Point T;
  Point Q;
  Point U;  // spring anchor on link 4
  Point V;  // spring anchor on link 1
};

/// Builds the joint layout and checks it closes to 1e-6 mm.
///
/// R and S sit at l1 from O at angles theta1 and -theta4 from the y-axis; the
/// spring anchors V and U sit at l0 at angles theta0+theta1 and -(theta4+theta5),
/// which are the lever arms used by the moment balance of links 1 and 4.
/// T is where the link-3 line through R meets the axis, Q where the link-6 line
/// through S does.
template <typename Scalar>
JointLayout<Scalar> joint_layout(const LinkageParameters<Scalar>& p) {
  using std::abs;
  using std::cos;
  using std::sin;
  using Point = typename JointLayout<Scalar>::Point;
  if (auto report = validate_parameters(p); !report.ok())
    throw ValidationError("joint_layout: invalid parameters\n" + report.to_string());

  const auto& th = p.theta;
  JointLayout<Scalar> j;
  j.O = Point::Zero();
  j.R = p.l1 * Point(sin(th[1]), cos(th[1]));
  j.S = p.l1 * Point(-sin(th[4]), cos(th[4]));
  j.V = p.l0 * Point(sin(th[0] + th[1]), cos(th[0] + th[1]));
  j.U = p.l0 * Point(-sin(th[4] + th[5]), cos(th[4] + th[5]));

  const Scalar tol = detail::degenerate_tolerance<Scalar>();
  auto meet_axis = [&](const Point& from, const Point& dir, const char* what) -> Point {
    if (abs(dir.x()) <= tol) {
      if (abs(from.x()) > tol)
        throw LayoutError(std::string("joint_layout: ") + what + " line never meets the y-axis");
      return Point(Scalar(0), from.y());
    }
    const Scalar t = -from.x() / dir.x();
    return Point(Scalar(0), from.y() + t * dir.y());
  };
  j.T = meet_axis(j.R, Point(sin(th[3]), cos(th[3])), "link 3");
  j.Q = meet_axis(j.S, Point(sin(th[2]), -cos(th[2])), "link 6");

  const Scalar closure_tol = Scalar(1e-6);
  const Scalar separation = p.l0 * (sin(th[0] + th[1]) + sin(th[4] + th[5]));
  const bool closes = abs((j.R - j.O).norm() - p.l1) <= closure_tol &&
                      abs((j.S - j.O).norm() - p.l1) <= closure_tol &&
                      abs(j.T.x() - j.O.x()) <= closure_tol &&
                      abs((j.V.x() - j.U.x()) - separation) <= closure_tol;
  if (!closes) throw LayoutError("joint_layout: closure residual exceeds 1e-6 mm");
  return j;
}

/// Angle between the grasping surface and the table for an opening fraction in
/// [0, 1]: closed posture at 0, fully open posture at 1, linear in between.
template <typename Scalar>
Scalar surface_angle(const LinkageParameters<Scalar>& p, Scalar opening_fraction) {
  if (!(opening_fraction >= Scalar(0) && opening_fraction <= Scalar(1)))
    throw std::out_of_range("surface_angle: opening fraction must lie in [0, 1]");
  return p.surface_angle_closed +
         opening_fraction * (p.surface_angle_open - p.surface_angle_closed);
}

template <typename Scalar = double>
Scalar surface_angle(Scalar opening_fraction) {
  return surface_angle(LinkageParameters<Scalar>{}, opening_fraction);
}

// Named access to scalar parameters, used by the design search, sensitivity
// analysis and the parameter file.

enum class ParameterKind { Length, Angle, Stiffness, Friction, Force };

struct ParameterInfo {
  std::string_view name;
  ParameterKind kind;
};

inline constexpr std::array<ParameterInfo, 15> kParameters{{
    {"l0", ParameterKind::Length},     {"l1", ParameterKind::Length},
    {"l2", ParameterKind::Length},     {"l3", ParameterKind::Length},
    {"l4", ParameterKind::Length},     {"theta0", ParameterKind::Angle},
    {"theta1", ParameterKind::Angle},  {"theta2", ParameterKind::Angle},
    {"theta3", ParameterKind::Angle},  {"theta4", ParameterKind::Angle},
    {"theta5", ParameterKind::Angle},  {"k", ParameterKind::Stiffness},
    {"l_n", ParameterKind::Length},    {"mu", ParameterKind::Friction},
    {"epsilon", ParameterKind::Force},
}};

std::optional<ParameterKind> parameter_kind(std::string_view name);

template <typename Scalar>
Scalar& parameter_ref(LinkageParameters<Scalar>& p, std::string_view name) {
  if (name == "l0") return p.l0;
  if (name == "l1") return p.l1;
  if (name == "l2") return p.l2;
  if (name == "l3") return p.l3;
  if (name == "l4") return p.l4;
  if (name.size() == 6 && name.starts_with("theta") && name[5] >= '0' && name[5] <= '5')
    return p.theta[static_cast<std::size_t>(name[5] - '0')];
  if (name == "k") return p.spring_k;
  if (name == "l_n") return p.natural_length;
  if (name == "mu") return p.mu;
  if (name == "epsilon") return p.epsilon;
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

template <typename Scalar>
Scalar parameter_value(const LinkageParameters<Scalar>& p, std::string_view name) {
  auto copy = p;
  return parameter_ref(copy, name);
}

}  // namespace linkstat

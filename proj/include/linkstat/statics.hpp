#pragma once

// Quasi-static balance of the finger linkage under an external fingertip force
// f_e = xi * (-sin zeta, -cos zeta).
//
// The reduced 2x2 system A (xi, beta3)^T = b comes from aggregating the
// force/moment balances with the slot friction coupling beta6 = lambda beta3.
// full_equilibrium() solves the unreduced balance set independently and is used
// to check the reduced route.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "linkstat/errors.hpp"
#include "linkstat/model.hpp"

namespace linkstat {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// f_k = k (l0 (sin(theta0+theta1) + sin(theta4+theta5)) - l_n). Negative when
/// the spring is compressed.
template <typename Scalar>
Scalar spring_force(const LinkageParameters<Scalar>& p) {
  using std::sin;
  const auto& th = p.theta;
  return p.spring_k * (p.l0 * (sin(th[0] + th[1]) + sin(th[4] + th[5])) - p.natural_length);
}

/// gamma = (l4 cos zeta - l3 sin(theta2 + zeta)) / (l2 sin(theta2 + theta3)).
template <typename Scalar>
Scalar gamma_coefficient(const LinkageParameters<Scalar>& p, Scalar zeta) {
  using std::abs;
  using std::cos;
  using std::sin;
  const Scalar denom = p.l2 * sin(p.theta[2] + p.theta[3]);
  if (abs(denom) <= detail::degenerate_tolerance<Scalar>() * std::max(Scalar(1), abs(p.l2)))
    throw SingularError("gamma: l2 sin(theta2 + theta3) vanishes");
  return (p.l4 * cos(zeta) - p.l3 * sin(p.theta[2] + zeta)) / denom;
}

/// lambda = beta6 / beta3 for the assumed sign of beta3 (+1 or -1).
template <typename Scalar>
Scalar lambda_coefficient(const LinkageParameters<Scalar>& p, int sign_beta3) {
  using std::abs;
  using std::cos;
  using std::sin;
  const Scalar s = sign_beta3 >= 0 ? Scalar(1) : Scalar(-1);
  const Scalar denom = -s * p.mu * sin(p.theta[2]) + cos(p.theta[2]);
  if (abs(denom) <= detail::degenerate_tolerance<Scalar>())
    throw SingularError("lambda: cos(theta2) - sign(beta3) mu sin(theta2) vanishes");
  return (s * p.mu * sin(p.theta[3]) + cos(p.theta[3])) / denom;
}

template <typename Scalar>
struct BalanceSystem {
  Matrix2<Scalar> A = Matrix2<Scalar>::Zero();
  Vector2<Scalar> b = Vector2<Scalar>::Zero();
  Scalar gamma{};
  Scalar lambda{};
  int sign_beta3 = 1;
  Scalar f_k{};
};

template <typename Scalar>
BalanceSystem<Scalar> assemble_system(const LinkageParameters<Scalar>& p, Scalar zeta,
                                      int sign_beta3) {
  using std::cos;
  using std::sin;
  const auto& th = p.theta;
  BalanceSystem<Scalar> sys;
  sys.sign_beta3 = sign_beta3 >= 0 ? 1 : -1;
  sys.gamma = gamma_coefficient(p, zeta);
  sys.lambda = lambda_coefficient(p, sys.sign_beta3);
  sys.f_k = spring_force(p);

  const Scalar g = sys.gamma;
  sys.A(0, 0) = g * sin(th[1] - th[3]) + sin(th[1] - zeta);
  sys.A(0, 1) = sin(th[1] - th[3]);
  sys.A(1, 0) = g * sin(th[3] + th[4]);
  sys.A(1, 1) = sys.lambda * sin(th[4] - th[2]);

  const Scalar arm = p.l0 / p.l1 * sys.f_k;
  sys.b(0) = arm * cos(th[0] + th[1]);
  sys.b(1) = -arm * cos(th[4] + th[5]);
  return sys;
}

/// True when |det A| < 1e-12 (largest row norm)^2.
template <typename Scalar>
bool is_singular(const Matrix2<Scalar>& A) {
  using std::abs;
  const Scalar row = A.rowwise().norm().maxCoeff();
  return !(abs(A.determinant()) >= Scalar(1e-12) * row * row) || row == Scalar(0);
}

template <typename Scalar>
struct BalanceSolution {
  Scalar xi_b{};
  Scalar beta_3b{};
  BalanceSystem<Scalar> system;
  bool sign_consistent = true;
  bool recomputed = false;  // second pass with sign(beta3) = -1 was needed

  Vector2<Scalar> unknowns() const { return Vector2<Scalar>(xi_b, beta_3b); }
};

namespace detail {
template <typename Scalar>
BalanceSolution<Scalar> solve_with_sign(const LinkageParameters<Scalar>& p, Scalar zeta,
                                        int sign_beta3) {
  BalanceSolution<Scalar> sol;
  sol.system = assemble_system(p, zeta, sign_beta3);
  if (is_singular(sol.system.A))
    throw SingularError("balance matrix A is singular at this direction");
  // Closed-form 2x2 inverse; A is well conditioned relative to the threshold above.
  const Vector2<Scalar> x = sol.system.A.inverse() * sol.system.b;
  sol.xi_b = x(0);
  sol.beta_3b = x(1);
  return sol;
}
}  // namespace detail

/// Solves the reduced balance for (xi_b, beta_3b), first with sign(beta3) = +1
/// and, if that gives beta_3b < 0, once more with sign(beta3) = -1. A solution
/// whose beta_3b still contradicts the sign used is returned with
/// sign_consistent = false. beta_3b = 0 is consistent with either sign.
template <typename Scalar>
BalanceSolution<Scalar> solve_balance(const LinkageParameters<Scalar>& p, Scalar zeta) {
  auto sol = detail::solve_with_sign(p, zeta, 1);
  if (sol.beta_3b >= Scalar(0)) return sol;
  sol = detail::solve_with_sign(p, zeta, -1);
  sol.recomputed = true;
  sol.sign_consistent = sol.beta_3b <= Scalar(0);
  return sol;
}

template <typename Scalar>
struct JointDrivingForces {
  Scalar f_Rx{};
  Scalar f_Sx{};
};

/// x components of the joint forces at R and S after raising xi_b by epsilon:
/// -diag(1/cos theta1, 1/cos theta4) (A (xi_b + eps, beta_3b) - b).
///
/// Evaluated as -eps A(:,0) ./ (cos theta1, cos theta4), which is the same
/// quantity once A (xi_b, beta_3b) = b and does not carry the solve residual.
template <typename Scalar>
JointDrivingForces<Scalar> perturbed_joint_forces(const LinkageParameters<Scalar>& p,
                                                  const BalanceSolution<Scalar>& sol) {
  using std::cos;
  const auto& A = sol.system.A;
  JointDrivingForces<Scalar> f;
  // + 0 turns a -0.0 from eps = 0 into +0.0.
  f.f_Rx = -p.epsilon * A(0, 0) / cos(p.theta[1]) + Scalar(0);
  f.f_Sx = -p.epsilon * A(1, 0) / cos(p.theta[4]) + Scalar(0);
  return f;
}

enum class Verdict { Opens, Blocked, Singular };
enum class BlockReason { None, NegativeXi, ContactMaintained };

std::string_view to_string(Verdict verdict);
std::string_view to_string(BlockReason reason);

template <typename Scalar>
struct OpeningDecision {
  Verdict verdict = Verdict::Singular;
  BlockReason reason = BlockReason::None;
  Scalar required_force{};  // xi_b when the links open, 0 otherwise
  std::optional<BalanceSolution<Scalar>> solution;
  JointDrivingForces<Scalar> forces;
  bool sign_consistent = false;
  std::string detail;

  /// Opens with a sign-consistent friction assumption.
  bool opens() const { return verdict == Verdict::Opens && sign_consistent; }
  /// Solvable, but the sign iteration could not settle sign(beta3).
  bool indeterminate() const { return verdict != Verdict::Singular && !sign_consistent; }
};

/// The links open when xi_b >= 0 and the perturbed joint forces point apart
/// according to p.opening_rule. Singular systems are reported, not thrown.
template <typename Scalar>
OpeningDecision<Scalar> predict_opening(const LinkageParameters<Scalar>& p, Scalar zeta) {
  OpeningDecision<Scalar> d;
  try {
    d.solution = solve_balance(p, zeta);
  } catch (const SingularError& e) {
    d.verdict = Verdict::Singular;
    d.detail = e.what();
    return d;
  }
  const auto& sol = *d.solution;
  d.sign_consistent = sol.sign_consistent;
  d.forces = perturbed_joint_forces(p, sol);

  bool apart = false;
  switch (p.opening_rule) {
    case OpeningRule::ReactionSign:
      apart = d.forces.f_Rx <= Scalar(0) && d.forces.f_Sx >= Scalar(0);
      break;
    case OpeningRule::LiteralSign:
      apart = d.forces.f_Rx >= Scalar(0) && d.forces.f_Sx <= Scalar(0);
      break;
  }
  if (!(sol.xi_b >= Scalar(0))) {
    d.verdict = Verdict::Blocked;
    d.reason = BlockReason::NegativeXi;
  } else if (!apart) {
    d.verdict = Verdict::Blocked;
    d.reason = BlockReason::ContactMaintained;
  } else {
    d.verdict = Verdict::Opens;
    d.required_force = sol.xi_b;
  }
  return d;
}

/// Every internal force of the unreduced balance set, in newtons.
/// f_ij is the force applied on j by i; f_iT etc. use joint labels.
template <typename Scalar>
struct FullEquilibrium {
  Scalar xi{};
  Scalar beta3{};
  Scalar beta6{};
  Vector2<Scalar> f_S5, f_25, f_52, f_R2, f_R3, f_T3, f_S6, f_T6;
  Vector2<Scalar> f_1R, f_4S;  // link 1 on joint R, link 4 on joint S
  Vector2<Scalar> f_GT;        // slot reaction on joint T
  int friction_branch = 1;     // assumed sign of f_GTx
  bool branch_consistent = true;
  bool ambiguous = false;  // both friction branches self-consistent and different
  Scalar max_residual{};
};

namespace detail {

constexpr int kFullUnknowns = 25;

// Unknown layout: xi, beta3, beta6, then the 2-vectors in the order below.
enum FullIndex : int {
  kXi = 0, kBeta3 = 1, kBeta6 = 2,
  kS5 = 3, k25 = 5, k52 = 7, kR2 = 9, kR3 = 11, kT3 = 13, kS6 = 15, kT6 = 17,
  k1R = 19, k4S = 21, kGT = 23,
};

template <typename Scalar>
FullEquilibrium<Scalar> unpack_full(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  FullEquilibrium<Scalar> e;
  e.xi = x(kXi);
  e.beta3 = x(kBeta3);
  e.beta6 = x(kBeta6);
  auto v = [&](int i) { return Vector2<Scalar>(x(i), x(i + 1)); };
  e.f_S5 = v(kS5);
  e.f_25 = v(k25);
  e.f_52 = v(k52);
  e.f_R2 = v(kR2);
  e.f_R3 = v(kR3);
  e.f_T3 = v(kT3);
  e.f_S6 = v(kS6);
  e.f_T6 = v(kT6);
  e.f_1R = v(k1R);
  e.f_4S = v(k4S);
  e.f_GT = v(kGT);
  return e;
}

// Evaluates every balance line on named forces (not through the matrix) and
// returns the largest absolute residual.
template <typename Scalar>
Scalar full_residual(const LinkageParameters<Scalar>& p, Scalar zeta, Scalar g, Scalar f_k,
                     const FullEquilibrium<Scalar>& e) {
  using std::abs;
  using std::cos;
  using std::sin;
  const auto& th = p.theta;
  const Vector2<Scalar> u3(sin(th[3]), cos(th[3]));
  const Vector2<Scalar> u2(sin(th[2]), -cos(th[2]));
  const Vector2<Scalar> fe_dir(sin(zeta), cos(zeta));
  Scalar r = 0;
  auto take = [&](Scalar v) { r = std::max(r, abs(v)); };
  auto take2 = [&](const Vector2<Scalar>& v) { take(v(0)); take(v(1)); };
  take2(-e.f_S5 - e.xi * g * u3);
  take2(e.f_25 - e.xi * g * u3);
  take2(-e.f_52 - e.xi * g * u3);
  take2(e.f_R2 - e.xi * (g * u3 + fe_dir));
  take2(e.f_R3 - e.beta3 * u3);
  take2(-e.f_T3 - e.beta3 * u3);
  take2(e.f_S6 - e.beta6 * u2);
  take2(-e.f_T6 - e.beta6 * u2);
  const Vector2<Scalar> f_R1 = -e.f_1R;
  const Vector2<Scalar> f_S4 = -e.f_4S;
  take(p.l1 * sin(th[1]) * f_R1.y() - p.l1 * cos(th[1]) * f_R1.x() +
       p.l0 * cos(th[0] + th[1]) * f_k);
  take(-p.l1 * sin(th[4]) * f_S4.y() - p.l1 * cos(th[4]) * f_S4.x() -
       p.l0 * cos(th[4] + th[5]) * f_k);
  // Joint balances with zero driving force: f_1R + f_2R + f_3R = 0, etc.
  take2(e.f_1R - e.f_R2 - e.f_R3);
  take2(e.f_4S - e.f_S5 - e.f_S6);
  take2(-e.f_T3 - e.f_T6 + e.f_GT);
  take(e.f_GT.y() - p.mu * abs(e.f_GT.x()));
  return r;
}

template <typename Scalar>
FullEquilibrium<Scalar> solve_full_branch(const LinkageParameters<Scalar>& p, Scalar zeta,
                                          int friction_branch) {
  using std::cos;
  using std::sin;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr int n = kFullUnknowns;
  const auto& th = p.theta;
  const Scalar g = gamma_coefficient(p, zeta);
  const Scalar f_k = spring_force(p);
  const Scalar s3 = sin(th[3]), c3 = cos(th[3]);
  const Scalar s2 = sin(th[2]), c2 = cos(th[2]);

  Mat M = Mat::Zero(n, n);
  Vec rhs = Vec::Zero(n);
  int row = 0;
  // Link 5/2 internal forces, each proportional to xi gamma along (sin th3, cos th3).
  auto link_force = [&](int idx, Scalar sign_on_vector, int scalar_idx, Scalar cx, Scalar cy) {
    M(row, idx) = sign_on_vector;
    M(row, scalar_idx) = -cx;
    ++row;
    M(row, idx + 1) = sign_on_vector;
    M(row, scalar_idx) = -cy;
    ++row;
  };
  link_force(kS5, -1, kXi, g * s3, g * c3);
  link_force(k25, 1, kXi, g * s3, g * c3);
  link_force(k52, -1, kXi, g * s3, g * c3);
  link_force(kR2, 1, kXi, g * s3 + sin(zeta), g * c3 + cos(zeta));
  link_force(kR3, 1, kBeta3, s3, c3);
  link_force(kT3, -1, kBeta3, s3, c3);
  link_force(kS6, 1, kBeta6, s2, -c2);
  link_force(kT6, -1, kBeta6, s2, -c2);

  // Link 1 moment about O with f_R1 = -f_1R.
  M(row, k1R) = p.l1 * cos(th[1]);
  M(row, k1R + 1) = -p.l1 * sin(th[1]);
  rhs(row) = -p.l0 * cos(th[0] + th[1]) * f_k;
  ++row;
  // Link 4 moment about O with f_S4 = -f_4S.
  M(row, k4S) = p.l1 * cos(th[4]);
  M(row, k4S + 1) = p.l1 * sin(th[4]);
  rhs(row) = p.l0 * cos(th[4] + th[5]) * f_k;
  ++row;
  // Joint R: f_1R - f_R2 - f_R3 = 0.
  for (int c = 0; c < 2; ++c, ++row) {
    M(row, k1R + c) = 1;
    M(row, kR2 + c) = -1;
    M(row, kR3 + c) = -1;
  }
  // Joint S: f_4S - f_S5 - f_S6 = 0.
  for (int c = 0; c < 2; ++c, ++row) {
    M(row, k4S + c) = 1;
    M(row, kS5 + c) = -1;
    M(row, kS6 + c) = -1;
  }
  // Joint T: -f_T3 - f_T6 + f_GT = 0.
  for (int c = 0; c < 2; ++c, ++row) {
    M(row, kT3 + c) = -1;
    M(row, kT6 + c) = -1;
    M(row, kGT + c) = 1;
  }
  // Slot friction on the assumed branch: f_GTy = mu |f_GTx| = mu sigma f_GTx.
  const Scalar sigma = friction_branch >= 0 ? Scalar(1) : Scalar(-1);
  M(row, kGT + 1) = 1;
  M(row, kGT) = -p.mu * sigma;
  ++row;

  Eigen::FullPivLU<Mat> lu(M);
  if (lu.rank() < n) throw SingularError("full equilibrium system is rank deficient");
  const Vec x = lu.solve(rhs);

  auto e = unpack_full<Scalar>(x);
  e.friction_branch = friction_branch >= 0 ? 1 : -1;
  e.branch_consistent = sigma * e.f_GT.x() >= Scalar(0);
  e.max_residual = full_residual(p, zeta, g, f_k, e);
  return e;
}

}  // namespace detail

/// Solves the complete balance set as one dense linear system.
///
/// |f_GTx| makes the set piecewise linear, so both branches of sign(f_GTx) are
/// solved and the self-consistent one kept. sign(f_GTx) = -sign_beta3 is the
/// branch that matches lambda(sign_beta3) and is preferred when both qualify.
template <typename Scalar>
FullEquilibrium<Scalar> full_equilibrium(const LinkageParameters<Scalar>& p, Scalar zeta,
                                         int sign_beta3) {
  using std::abs;
  const int preferred = sign_beta3 >= 0 ? -1 : 1;
  std::optional<FullEquilibrium<Scalar>> first, second;
  try {
    first = detail::solve_full_branch(p, zeta, preferred);
  } catch (const SingularError&) {
  }
  try {
    second = detail::solve_full_branch(p, zeta, -preferred);
  } catch (const SingularError&) {
  }
  if (!first && !second) throw SingularError("full equilibrium singular on both friction branches");

  const Scalar tol = std::max(Scalar(1e-9), Scalar(1000) * std::numeric_limits<Scalar>::epsilon());
  if (first && second && first->branch_consistent && second->branch_consistent) {
    const Scalar scale = std::max({Scalar(1), abs(first->xi), abs(first->beta3)});
    first->ambiguous = abs(first->xi - second->xi) > tol * scale ||
                       abs(first->beta3 - second->beta3) > tol * scale;
    return *first;
  }
  if (first && first->branch_consistent) return *first;
  if (second && second->branch_consistent) return *second;
  return first ? *first : *second;
}

}  // namespace linkstat

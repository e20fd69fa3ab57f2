#include <doctest.h>

#include <random>

#include "linkstat/statics.hpp"
#include "oracles.hpp"

using namespace linkstat;
namespace frozen = oracle::frozen;

namespace {
const double kMinus15 = to_radians(-15.0);
const double kMinus10 = to_radians(-10.0);

LinkageParametersd at_natural_length() {
  auto p = default_parameters();
  p.natural_length = p.l0 * (std::sin(p.theta[0] + p.theta[1]) + std::sin(p.theta[4] + p.theta[5]));
  return p;
}
}  // namespace

TEST_CASE("spring force") {
  CHECK(spring_force(default_parameters()) == doctest::Approx(frozen::spring_force).epsilon(1e-12));
  CHECK(spring_force(at_natural_length()) == 0.0);
  auto p = default_parameters();
  p.spring_k = 0;
  CHECK(spring_force(p) == 0.0);
  p = default_parameters();
  p.natural_length = 20;  // longer than the anchor separation
  CHECK(spring_force(p) < 0);
}

TEST_CASE("gamma coefficient") {
  auto p = default_parameters();
  CHECK(gamma_coefficient(p, 0.0) == doctest::Approx(frozen::gamma_at_0).epsilon(1e-12));

  auto q = p;
  q.l3 = 0;  // validation is not a precondition of the formula itself
  CHECK(std::abs(gamma_coefficient(q, std::numbers::pi / 2)) < 1e-15);
  q = p;
  q.l4 = 0;
  CHECK(std::abs(gamma_coefficient(q, -p.theta[2])) < 1e-15);

  q = p;
  q.theta[2] = -q.theta[3];
  CHECK_THROWS_AS(gamma_coefficient(q, 0.0), SingularError);
}

TEST_CASE("lambda coefficient") {
  auto p = default_parameters();
  CHECK(lambda_coefficient(p, 1) == doctest::Approx(frozen::lambda_plus).epsilon(1e-12));
  CHECK(lambda_coefficient(p, -1) == doctest::Approx(frozen::lambda_minus).epsilon(1e-12));

  p.mu = 0;
  CHECK(lambda_coefficient(p, 1) == lambda_coefficient(p, -1));
  p.theta[3] = p.theta[2];
  CHECK(lambda_coefficient(p, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_coefficient(p, -1) == doctest::Approx(1.0).epsilon(1e-15));

  auto q = default_parameters();
  q.mu = 1.0 / std::tan(q.theta[2]);  // cos th2 - mu sin th2 = 0
  CHECK_THROWS_AS(lambda_coefficient(q, 1), SingularError);
  CHECK_NOTHROW(lambda_coefficient(q, -1));
}

TEST_CASE("assembled system matches the hand-written formulas") {
  const auto p = default_parameters();
  for (double deg = -30; deg <= 90; deg += 7.5) {
    for (int sign : {1, -1}) {
      const double z = to_radians(deg);
      const auto sys = assemble_system(p, z, sign);
      const auto r = oracle::reduced(p, z, sign);
      CHECK(sys.A(0, 0) == doctest::Approx(r.a11).epsilon(1e-14));
      CHECK(sys.A(0, 1) == doctest::Approx(r.a12).epsilon(1e-14));
      CHECK(sys.A(1, 0) == doctest::Approx(r.a21).epsilon(1e-14));
      CHECK(sys.A(1, 1) == doctest::Approx(r.a22).epsilon(1e-14));
      CHECK(sys.b(0) == doctest::Approx(r.b1).epsilon(1e-14));
      CHECK(sys.b(1) == doctest::Approx(r.b2).epsilon(1e-14));
      CHECK(sys.sign_beta3 == sign);
    }
  }

  SUBCASE("zero preload gives b = 0") {
    const auto sys = assemble_system(at_natural_length(), kMinus15, 1);
    CHECK(sys.b.isZero(0.0));
  }
}

TEST_CASE("vanishing first row is singular") {
  auto p = default_parameters();
  p.theta[3] = p.theta[1];
  const double zeta = p.theta[1];
  const auto sys = assemble_system(p, zeta, 1);
  CHECK(sys.A(0, 0) == 0.0);
  CHECK(sys.A(0, 1) == 0.0);
  CHECK(is_singular(sys.A));
  CHECK_THROWS_AS(solve_balance(p, zeta), SingularError);
  const auto d = predict_opening(p, zeta);
  CHECK(d.verdict == Verdict::Singular);
  CHECK_FALSE(d.opens());
  CHECK_FALSE(d.indeterminate());
}

TEST_CASE("balance solution") {
  const auto p = default_parameters();

  SUBCASE("table press direction") {
    const auto s = solve_balance(p, kMinus15);
    CHECK(s.system.sign_beta3 == 1);
    CHECK_FALSE(s.recomputed);
    CHECK(s.sign_consistent);
    CHECK(s.xi_b == doctest::Approx(frozen::xi_m15).epsilon(1e-12));
    CHECK(s.beta_3b == doctest::Approx(frozen::beta_m15).epsilon(1e-12));
  }
  SUBCASE("second pass when beta3 comes out negative") {
    const auto s = solve_balance(p, 0.0);
    CHECK(s.recomputed);
    CHECK(s.system.sign_beta3 == -1);
    CHECK(s.sign_consistent);
    CHECK(s.xi_b == doctest::Approx(frozen::xi_0).epsilon(1e-12));
    CHECK(s.beta_3b == doctest::Approx(frozen::beta_0).epsilon(1e-12));
  }
  SUBCASE("homogeneous system") {
    const auto s = solve_balance(at_natural_length(), kMinus15);
    CHECK(s.xi_b == 0.0);
    CHECK(s.beta_3b == 0.0);
    CHECK(s.sign_consistent);
  }
  SUBCASE("residual and sign agree with the oracle over the grid") {
    for (double deg = -30; deg <= 90; deg += 0.5) {
      const double z = to_radians(deg);
      const auto s = solve_balance(p, z);
      int sign = 0;
      const auto o = oracle::balance(p, z, &sign);
      CHECK(s.system.sign_beta3 == sign);
      CHECK(oracle::rel_diff(s.xi_b, o.xi) < 1e-10);
      CHECK(oracle::rel_diff(s.beta_3b, o.beta3) < 1e-10);
      if (s.sign_consistent) {
        const double res = (s.system.A * s.unknowns() - s.system.b).norm();
        CHECK(res <= 1e-9 * s.system.b.norm());
      }
    }
  }
}

TEST_CASE("perturbed joint forces") {
  const auto p = default_parameters();
  const auto s = solve_balance(p, kMinus15);
  const auto f = perturbed_joint_forces(p, s);
  CHECK(f.f_Rx == doctest::Approx(frozen::f_rx_m15).epsilon(1e-12));
  CHECK(f.f_Sx == doctest::Approx(frozen::f_sx_m15).epsilon(1e-12));

  SUBCASE("agrees with the literal perturbed residual form") {
    const Vector2<double> shifted(s.xi_b + p.epsilon, s.beta_3b);
    const Vector2<double> r = s.system.A * shifted - s.system.b;
    CHECK(f.f_Rx == doctest::Approx(-r(0) / std::cos(p.theta[1])).epsilon(1e-12));
    CHECK(f.f_Sx == doctest::Approx(-r(1) / std::cos(p.theta[4])).epsilon(1e-12));
  }
  SUBCASE("zero perturbation gives exact zeros") {
    auto q = p;
    q.epsilon = 0;
    const auto z = perturbed_joint_forces(q, s);
    CHECK(z.f_Rx == 0.0);
    CHECK(z.f_Sx == 0.0);
    CHECK_FALSE(std::signbit(z.f_Rx));
  }
  SUBCASE("linear in epsilon, independent of the spring") {
    auto q = p;
    q.epsilon = 0.3;
    q.spring_k = 5;
    const auto g = perturbed_joint_forces(q, solve_balance(q, kMinus15));
    CHECK(g.f_Rx == doctest::Approx(3 * f.f_Rx).epsilon(1e-13));
    CHECK(g.f_Sx == doctest::Approx(3 * f.f_Sx).epsilon(1e-13));
  }
}

TEST_CASE("opening decisions") {
  auto p = default_parameters();

  SUBCASE("reaction-sign rule opens inside the band") {
    const auto d = predict_opening(p, kMinus10);
    CHECK(d.verdict == Verdict::Opens);
    CHECK(d.opens());
    CHECK(d.required_force == doctest::Approx(frozen::xi_m10).epsilon(1e-12));
    CHECK(d.forces.f_Rx <= 0);
    CHECK(d.forces.f_Sx >= 0);
  }
  SUBCASE("table press direction keeps contact under the default rule") {
    const auto d = predict_opening(p, kMinus15);
    CHECK(d.verdict == Verdict::Blocked);
    CHECK(d.reason == BlockReason::ContactMaintained);
    CHECK(d.required_force == 0.0);
    CHECK(d.solution->xi_b == doctest::Approx(frozen::xi_m15).epsilon(1e-12));
  }
  SUBCASE("steep directions cannot open") {
    const auto d = predict_opening(p, to_radians(60.0));
    CHECK(d.verdict == Verdict::Blocked);
    CHECK(d.reason == BlockReason::NegativeXi);
  }
  SUBCASE("literal rule never opens for the default geometry") {
    p.opening_rule = OpeningRule::LiteralSign;
    for (double deg = -30; deg <= 90; deg += 0.5) CHECK_FALSE(predict_opening(p, to_radians(deg)).opens());
  }
  SUBCASE("boundaries are inclusive") {
    // With zero preload xi_b = 0, which still opens when the joint forces allow.
    const auto d = predict_opening(at_natural_length(), kMinus10);
    CHECK(d.verdict == Verdict::Opens);
    CHECK(d.required_force == 0.0);
  }
}

TEST_CASE("full equilibrium oracle") {
  const auto p = default_parameters();

  SUBCASE("agrees with the reduced solution over the default grid") {
    for (double deg = -30; deg <= 90; deg += 2.5) {
      const double z = to_radians(deg);
      const auto s = solve_balance(p, z);
      if (!s.sign_consistent) continue;
      const auto e = full_equilibrium(p, z, s.system.sign_beta3);
      CHECK(e.branch_consistent);
      CHECK(oracle::rel_diff(e.xi, s.xi_b) < 1e-9);
      CHECK(oracle::rel_diff(e.beta3, s.beta_3b) < 1e-9);
      CHECK(e.beta6 == doctest::Approx(s.system.lambda * s.beta_3b).epsilon(1e-9));
      CHECK(e.max_residual <= 1e-9 * std::max(1.0, std::abs(e.xi) + std::abs(e.beta3)));
      CHECK(e.f_GT.y() == doctest::Approx(p.mu * std::abs(e.f_GT.x())).epsilon(1e-9));
    }
  }
  SUBCASE("zero preload gives zero forces") {
    const auto e = full_equilibrium(at_natural_length(), kMinus15, 1);
    CHECK(std::abs(e.xi) < 1e-14);
    CHECK(std::abs(e.beta3) < 1e-14);
    CHECK(e.f_R2.norm() < 1e-14);
    CHECK(e.f_GT.norm() < 1e-14);
  }
  SUBCASE("random perturbations") {
    std::mt19937_64 rng(11);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto q = oracle::perturbed(p, rng);
      for (double deg = -30; deg <= 90; deg += 10) {
        const double z = to_radians(deg);
        BalanceSolution<double> s;
        try {
          s = solve_balance(q, z);
        } catch (const SingularError&) {
          continue;
        }
        if (!s.sign_consistent) continue;
        const auto e = full_equilibrium(q, z, s.system.sign_beta3);
        CHECK(oracle::rel_diff(e.xi, s.xi_b) < 1e-9);
        CHECK(oracle::rel_diff(e.beta3, s.beta_3b) < 1e-9);
        ++compared;
      }
    }
    CHECK(compared > 2000);
  }
  SUBCASE("works in long double") {
    const auto pl = p.cast<long double>();
    const long double z = to_radians(-10.0L);
    const auto s = solve_balance(pl, z);
    const auto e = full_equilibrium(pl, z, s.system.sign_beta3);
    CHECK(static_cast<double>(std::abs(e.xi - s.xi_b)) < 1e-12);
    CHECK(static_cast<double>(s.xi_b) == doctest::Approx(frozen::xi_m10).epsilon(1e-12));
  }
}

TEST_CASE("frictionless slot collapses the sign iteration") {
  auto p = default_parameters();
  p.mu = 0;
  for (double deg = -30; deg <= 90; deg += 0.5) {
    const double z = to_radians(deg);
    const auto plus = detail::solve_with_sign(p, z, 1);
    const auto minus = detail::solve_with_sign(p, z, -1);
    CHECK(plus.xi_b == minus.xi_b);
    CHECK(plus.beta_3b == minus.beta_3b);
    CHECK(solve_balance(p, z).sign_consistent);
  }
}

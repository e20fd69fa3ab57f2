#include <doctest.h>

#include <cstdlib>

#include "linkstat/modeswitch.hpp"
#include "oracles.hpp"

using namespace linkstat;
namespace frozen = oracle::frozen;

namespace {
SweepSettings degrees(double lo, double hi, double step) {
  return {to_radians(lo), to_radians(hi), to_radians(step)};
}
}  // namespace

TEST_CASE("sweep grid") {
  SUBCASE("default grid has 241 points, both ends exact") {
    const auto g = sweep_grid(SweepSettings{});
    REQUIRE(g.size() == 241);
    CHECK(g.front() == to_radians(-30.0));
    CHECK(g.back() == to_radians(90.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  }
  SUBCASE("step that does not divide the range appends hi") {
    const auto g = sweep_grid(degrees(0, 1, 0.3));
    REQUIRE(g.size() == 5);
    CHECK(g.back() == to_radians(1.0));
  }
  SUBCASE("step wider than the range") {
    const auto g = sweep_grid(degrees(0, 1, 5));
    REQUIRE(g.size() == 2);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == to_radians(1.0));
  }
  SUBCASE("bad ranges") {
    CHECK_THROWS_AS(sweep_grid(degrees(5, 5, 1)), std::invalid_argument);
    CHECK_THROWS_AS(sweep_grid(degrees(5, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(sweep_grid(degrees(0, 5, 0)), std::invalid_argument);
    CHECK_THROWS_AS(sweep_grid(degrees(0, 5, -1)), std::invalid_argument);
    CHECK_THROWS_AS(sweep_grid({0.0, std::nan(""), 0.1}), std::invalid_argument);
  }
}

TEST_CASE("default sweep") {
  const auto p = default_parameters();
  const auto curve = sweep(p, SweepSettings{});

  SUBCASE("one opening interval bounded by the joint-force sign changes") {
    REQUIRE(curve.opening.intervals.size() == 1);
    const auto iv = curve.opening.intervals.front();
    CHECK(std::abs(to_degrees(iv.lo) - frozen::gamma_root_deg) <= 0.01);
    CHECK(std::abs(to_degrees(iv.hi) - frozen::a11_root_deg) <= 0.01);
    // the endpoint returned is on the open side
    CHECK(predict_opening(p, iv.lo).opens());
    CHECK(predict_opening(p, iv.hi).opens());
  }
  SUBCASE("plotted force is xi_b inside and zero outside") {
    for (const auto& s : curve.samples) {
      if (s.status == SampleStatus::Opens) {
        CHECK(s.plotted_force() == s.decision.required_force);
        CHECK(s.plotted_force() >= 0);
      } else {
        CHECK(s.plotted_force() == 0.0);
      }
    }
  }
  SUBCASE("no threshold recorded at the table press direction") {
    CHECK(curve.threshold_at.empty());
  }
}

TEST_CASE("literal sign rule yields no interval") {
  auto p = default_parameters();
  p.opening_rule = OpeningRule::LiteralSign;
  const auto curve = sweep(p, SweepSettings{});
  CHECK(curve.opening.empty());
}

TEST_CASE("sweeps are deterministic and independent of thread count") {
  const auto p = default_parameters();
  SweepOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = sweep(p, SweepSettings{}, one);
  const auto b = sweep(p, SweepSettings{}, four);
  const auto c = sweep(p, SweepSettings{}, one);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].zeta == b.samples[i].zeta);
    CHECK(a.samples[i].status == b.samples[i].status);
    CHECK(a.samples[i].plotted_force() == b.samples[i].plotted_force());
    CHECK(a.samples[i].plotted_force() == c.samples[i].plotted_force());
  }
  CHECK(a.opening.intervals == b.opening.intervals);
  CHECK(a.opening.intervals == c.opening.intervals);
}

TEST_CASE("slot friction at the lambda pole makes every sample singular") {
  auto p = default_parameters();
  p.mu = 1.0 / std::tan(p.theta[2]);
  const auto curve = sweep(p, SweepSettings{});
  CHECK(curve.opening.empty());
  REQUIRE(curve.opening.singular_bands.size() == 1);
  CHECK(curve.opening.singular_bands[0].lo == curve.settings.zeta_lo);
  CHECK(curve.opening.singular_bands[0].hi == curve.settings.zeta_hi);
}

TEST_CASE("switching threshold") {
  auto p = default_parameters();
  CHECK(switching_threshold(p, to_radians(-10.0)) == doctest::Approx(frozen::xi_m10).epsilon(1e-12));
  CHECK_THROWS_AS(switching_threshold(p), NotOpeningError);
  CHECK_THROWS_AS(switching_threshold(p, to_radians(60.0)), NotOpeningError);

  SUBCASE("threshold is linear in the spring rate") {
    auto q = p;
    q.spring_k *= 2;
    CHECK(switching_threshold(q, to_radians(-10.0)) ==
          doctest::Approx(2 * frozen::xi_m10).epsilon(1e-12));
    q.spring_k = 0;
    CHECK(switching_threshold(q, to_radians(-10.0)) == 0.0);
  }
  SUBCASE("recorded by the sweep when asked") {
    SweepOptions opt;
    opt.threshold_queries = {to_radians(-10.0), kTablePressAngle};
    const auto curve = sweep(p, SweepSettings{}, opt);
    REQUIRE(curve.threshold_at.size() == 1);
    CHECK(curve.threshold_at.at(to_radians(-10.0)) == doctest::Approx(frozen::xi_m10).epsilon(1e-12));
  }
}

TEST_CASE("grasp mode selection") {
  CHECK(select_mode(0, 4.9).mode == GraspMode::ParallelGrip);
  CHECK(select_mode(4.8, 4.9).mode == GraspMode::ParallelGrip);
  CHECK(select_mode(4.9, 4.9).mode == GraspMode::TurnOver);
  CHECK(select_mode(7, 4.9).mode == GraspMode::TurnOver);
  CHECK(select_mode(0, 0).mode == GraspMode::TurnOver);
  CHECK_THROWS_AS(select_mode(-1, 4.9), std::invalid_argument);
  CHECK_THROWS_AS(select_mode(1, -4.9), std::invalid_argument);
  CHECK(to_string(GraspMode::TurnOver) == "turn_over");

  SUBCASE("monotone in applied force") {
    bool turned = false;
    for (int i = 0; i <= 200; ++i) {
      const bool now = select_mode(i * 0.05, 4.9).mode == GraspMode::TurnOver;
      CHECK((!turned || now));
      turned = now;
    }
    CHECK(turned);
  }
  SUBCASE("parallel-grip budget") {
    CHECK(parallel_grip_budget(5.0) == doctest::Approx(4.0));
    CHECK(parallel_grip_budget(5.0, 1.0) == 5.0);
    CHECK(select_mode(parallel_grip_budget(4.9), 4.9).mode == GraspMode::ParallelGrip);
    CHECK_THROWS_AS(parallel_grip_budget(5.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(parallel_grip_budget(-1.0), std::invalid_argument);
  }
}

TEST_CASE("thread count from the environment") {
  ::setenv("LINKSTAT_THREADS", "3", 1);
  CHECK(threads_from_environment(1) == 3);
  ::setenv("LINKSTAT_THREADS", "zero", 1);
  CHECK(threads_from_environment(1) == 1);
  ::setenv("LINKSTAT_THREADS", "-2", 1);
  CHECK(threads_from_environment(7) == 7);
  ::unsetenv("LINKSTAT_THREADS");
  CHECK(threads_from_environment(5) == 5);
}

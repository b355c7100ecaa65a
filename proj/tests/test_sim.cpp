#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "beetle/config.hpp"
#include "beetle/harness.hpp"
#include "beetle/sim.hpp"
#include "beetle/terrain.hpp"

using namespace beetle;
using namespace beetle::sim;

namespace {

config::ScenarioConfig scenario(const std::string& yaml) { return config::parse_scenario(yaml); }

SimSetup setup_for(const config::ScenarioConfig& c) {
  SimSetup s;
  s.geometry = c.geometry;
  s.ball = c.ball;
  s.legs = c.leg_setup;
  s.params = c.sim;
  s.bias_posture = harness::bias_posture(c);
  s.seed = c.seed;
  return s;
}

}  // namespace

TEST_CASE("slip check") {
  CHECK(slip_check(5, 10, 0.6) == ContactState::Stick);
  CHECK(slip_check(7, 10, 0.6) == ContactState::Slip);
  CHECK(slip_check(6, 10, 0.6) == ContactState::Stick);
  CHECK(slip_check(-7, 10, 0.6) == ContactState::Slip);
  CHECK(slip_check(0, 0, 0.6) == ContactState::Stick);
  CHECK_THROWS_AS(slip_check(1, -1, 0.6), ContactError);
}

TEST_CASE("Coulomb cap on a drive force") {
  const auto r = resolve_contact(7, 10, 0.6);
  CHECK(r.tangential == doctest::Approx(6.0));
  CHECK(r.state == ContactState::Slip);
  const auto s = resolve_contact(-4, 10, 0.6);
  CHECK(s.tangential == -4);
  CHECK(s.state == ContactState::Stick);
}

TEST_CASE("load distribution") {
  SimParams p;
  const std::array<double, kLegCount> ext{};
  SUBCASE("static equilibrium") {
    for (const std::array<bool, kLegCount> contact :
         {std::array<bool, kLegCount>{true, true, true, true, true, true},
          std::array<bool, kLegCount>{false, true, false, true, false, true},
          std::array<bool, kLegCount>{true, false, true, false, true, false},
          std::array<bool, kLegCount>{false, false, true, false, false, false}}) {
      for (double roll : {0.0, 7.0, -20.0}) {
        const auto n = distribute_load(p, 4.7, contact, ext, roll);
        double sum = 0;
        for (std::size_t i = 0; i < kLegCount; ++i) {
          sum += n[i];
          if (!contact[i]) CHECK(n[i] == 0.0);
        }
        CHECK(std::abs(sum - 4.7 * kGravity) < 1e-6);
      }
    }
  }
  SUBCASE("hind foot carries more than middle foot") {
    const auto n = distribute_load(p, 4.7, {true, true, true, true, true, true}, ext, 0.0);
    CHECK(n[index(LegId::L3)] > n[index(LegId::L2)]);
    CHECK(n[index(LegId::R3)] > n[index(LegId::R2)]);
  }
  SUBCASE("no contact is free fall") {
    CHECK_THROWS_AS(distribute_load(p, 4.7, {}, ext, 0.0), SimulationFault);
  }
}

TEST_CASE("moment imbalance tilts towards the hind leg") {
  SimParams p;
  body::RobotGeometry g;
  const auto posture = harness::bias_posture(config::ScenarioConfig{});
  std::array<body::Vec3, kLegCount> feet{};
  for (auto leg : kAllLegs) feet[index(leg)] = body::foot_in_body(g, leg, posture[index(leg)]).position;
  std::array<bool, kLegCount> contact{};
  contact[index(LegId::R3)] = true;
  contact[index(LegId::L2)] = true;
  const auto n = distribute_load(p, g.mass, contact, {}, 0.0);
  const double m = ball_leg_moment(n, feet, contact);
  CHECK(m < 0.0);
  CHECK(unsupported_moment(m, 0.0, 0.0) < 0.0);
  CHECK(unsupported_moment(m, 0.0, std::abs(m)) == 0.0);

  std::array<bool, kLegCount> mirrored{};
  mirrored[index(LegId::L3)] = true;
  mirrored[index(LegId::R2)] = true;
  const auto nm = distribute_load(p, g.mass, mirrored, {}, 0.0);
  CHECK(ball_leg_moment(nm, feet, mirrored) == doctest::Approx(-m));
}

TEST_CASE("flat terrain is zero") {
  const auto t = Terrain::flat();
  CHECK(t.height(0, 0) == 0.0);
  CHECK(t.height(-3.2, 7.9) == 0.0);
  CHECK(terrain_height(t, 1.0, 1.0) == 0.0);
}

TEST_CASE("uneven terrain height range") {
  const auto t = make_uneven_terrain(42, 0.2, 0.35);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const double step = t.resolution() / 2.0;
  for (double x = -t.half_extent(); x <= t.half_extent(); x += step) {
    for (double y = -t.half_extent(); y <= t.half_extent(); y += step) {
      const double h = t.height(x, y);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
  }
  CHECK(std::abs((hi - lo) - 0.07) <= 1e-3);

  const auto again = make_uneven_terrain(42, 0.2, 0.35);
  const auto other = make_uneven_terrain(43, 0.2, 0.35);
  bool differs = false;
  for (double x = -5; x < 5; x += 0.37) {
    for (double y = -5; y < 5; y += 0.41) {
      REQUIRE(again.height(x, y) == t.height(x, y));
      differs = differs || other.height(x, y) != t.height(x, y);
    }
  }
  CHECK(differs);
}

TEST_CASE("wall contact") {
  WallSpec w{0.0, -1.0, 180.0};
  const auto soft = make_ball(BallType::Soft);
  const auto rigid = make_ball(BallType::Rigid);
  const auto far = wall_contact(0.0, 0.3, 0.1, 0.0, soft, w, 0.3);
  CHECK(far.normal_force == 0.0);
  CHECK(far.penetration == 0.0);
  const auto near_soft = wall_contact(0.0, -0.71, 0.1, -0.05, soft, w, 0.3);
  const auto near_rigid = wall_contact(0.0, -0.71, 0.1, -0.05, rigid, w, 0.3);
  CHECK(near_soft.penetration == doctest::Approx(0.01));
  CHECK(near_soft.normal_force > 0.0);
  CHECK(near_rigid.normal_force > near_soft.normal_force);
  CHECK(near_soft.ny == doctest::Approx(1.0));
  CHECK(near_soft.friction_limit == doctest::Approx(0.3 * near_soft.normal_force));
}

TEST_CASE("ball presets") {
  const auto soft = make_ball(BallType::Soft);
  const auto rigid = make_ball(BallType::Rigid);
  CHECK(soft.mass == 2.0);
  CHECK(rigid.mass == 4.6);
  CHECK(soft.diameter == 0.60);
  CHECK(soft.wall_stiffness < rigid.wall_stiffness);
  CHECK(soft.mu_leg == 0.7);
  CHECK(rigid.mu_leg == 0.4);
  BallSpec bad = soft;
  bad.mass = 0;
  CHECK_THROWS(bad.validate());

  const auto nl = make_leg_setup(LegSetupPreset::NL);
  const auto fl = make_leg_setup(LegSetupPreset::FL);
  const auto sm = make_leg_setup(LegSetupPreset::FL_SM);
  CHECK(nl.front_ground_multiplier == 1.0);
  CHECK(nl.hind_ball_multiplier == 1.0);
  CHECK(fl.front_ground_multiplier > 1.0);
  CHECK(fl.hind_ball_multiplier == 1.0);
  CHECK(sm.front_ground_multiplier > 1.0);
  CHECK(sm.hind_ball_multiplier > 1.0);
}

TEST_CASE("bias posture does not move the ball") {
  const auto c = scenario("name: still\nsim:\n  floor_noise: 0\n  initial_gap_jitter: 0\n");
  BallSim sim(setup_for(c), Terrain::flat());
  JointCommandFrame frame;
  frame.legs = harness::bias_posture(c);
  const double x0 = sim.world().ball.x, y0 = sim.world().ball.y;
  for (int t = 0; t < 300; ++t) sim.step(frame);
  const double x1 = sim.world().ball.x, y1 = sim.world().ball.y;
  for (int t = 0; t < 300; ++t) sim.step(frame);
  CHECK(std::hypot(x1 - x0, y1 - y0) < 2e-3);
  CHECK(std::hypot(sim.world().ball.x - x1, sim.world().ball.y - y1) < 1e-4);
}

TEST_CASE("simulator determinism") {
  const auto c = scenario("name: det\nduration_s: 8\n");
  const auto a = harness::simulate_trial(c);
  const auto b = harness::simulate_trial(c);
  CHECK(trace::to_csv(a.trace) == trace::to_csv(b.trace));
}

TEST_CASE("per-tick physical invariants") {
  for (const char* yaml : {"name: a\nduration_s: 20\n", "name: b\nterrain: wall\nduration_s: 20\n",
                           "name: c\nball: rigid\nterrain: uneven\nduration_s: 20\n"}) {
    const auto run = harness::simulate_trial(scenario(yaml));
    REQUIRE_FALSE(run.result.faulted);
    for (const auto& row : run.trace.rows) {
      REQUIRE(row.ke_delta <= row.work_in + 1e-9);
      for (std::size_t i = 0; i < kLegCount; ++i) {
        REQUIRE(std::abs(row.tangential[i]) <= row.mu[i] * row.normal[i] + 1e-9);
      }
      REQUIRE(row.penetration < 0.05);
    }
  }
}

TEST_CASE("soft ball is disturbed less by the wall than the rigid ball") {
  double soft_roll = 0, soft_pitch = 0, rigid_roll = 0, rigid_pitch = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    auto peak = [&](const char* ball) {
      auto c = scenario(std::string("name: w\nterrain: wall\nduration_s: 30\nball: ") + ball + "\n");
      c.seed = static_cast<std::uint64_t>(seed);
      const auto run = harness::simulate_trial(c);
      double roll = 0, pitch = 0;
      for (const auto& r : run.trace.rows) {
        roll = std::max(roll, std::abs(r.roll_deg));
        pitch = std::max(pitch, std::abs(r.e_pitch));
      }
      return std::pair{roll, pitch};
    };
    const auto s = peak("soft");
    const auto r = peak("rigid");
    soft_roll += s.first;
    soft_pitch += s.second;
    rigid_roll += r.first;
    rigid_pitch += r.second;
  }
  CHECK(soft_roll < rigid_roll);
  CHECK(soft_pitch < rigid_pitch);
}

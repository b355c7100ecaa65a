#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "beetle/body.hpp"

using namespace beetle;
using namespace beetle::body;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Homogeneous-transform chain: world <- body <- mount <- BC yaw <- coxa <- CF <- femur <- FT <- tibia.
Eigen::Vector3d oracle_foot(const RobotGeometry& g, const BodyPose& pose, LegId leg, Joint3 q) {
  using Eigen::AngleAxisd;
  using Eigen::Translation3d;
  using Eigen::Vector3d;
  const double s = is_left(leg) ? 1.0 : -1.0;
  double mx = 0.0;
  if (is_front(leg)) mx = g.mount_x_front;
  if (is_hind(leg)) mx = g.mount_x_hind;
  const Eigen::Affine3d world =
      Translation3d(pose.position.x, pose.position.y, pose.position.z) *
      AngleAxisd(pose.yaw_deg * kDeg, Vector3d::UnitZ()) *
      AngleAxisd(-pose.pitch_deg * kDeg, Vector3d::UnitY()) *
      AngleAxisd(-pose.roll_deg * kDeg, Vector3d::UnitX());
  const Eigen::Affine3d chain =
      Translation3d(mx, s * 0.5 * g.body_width, 0.0) *
      AngleAxisd(s * std::numbers::pi / 2.0 - s * q.bc, Vector3d::UnitZ()) * Translation3d(g.coxa, 0, 0) *
      AngleAxisd(q.cf, Vector3d::UnitY()) * Translation3d(g.femur, 0, 0) *
      AngleAxisd(q.ft, Vector3d::UnitY()) * Translation3d(g.tibia, 0, 0);
  return world * chain * Vector3d::Zero();
}

}  // namespace

TEST_CASE("zero-angle chain is a straight lateral leg") {
  RobotGeometry g;
  CHECK(g.leg_length() == doctest::Approx(0.35));
  for (auto leg : kAllLegs) {
    const auto f = forward_kinematics(g, BodyPose{}, leg, {}).position;
    const auto m = g.mount(leg);
    CHECK(f.x == doctest::Approx(m.x));
    CHECK(f.y == doctest::Approx(m.y + side_sign(leg) * g.leg_length()));
    CHECK(f.z == doctest::Approx(0.0));
  }
}

TEST_CASE("yaw 180 mirrors through the body centre") {
  RobotGeometry g;
  BodyPose turned;
  turned.yaw_deg = 180;
  const Joint3 q{0.2, 0.4, 0.6};
  for (auto leg : kAllLegs) {
    const auto a = forward_kinematics(g, BodyPose{}, leg, q).position;
    const auto b = forward_kinematics(g, turned, leg, q).position;
    CHECK(b.x == doctest::Approx(-a.x));
    CHECK(b.y == doctest::Approx(-a.y));
    CHECK(b.z == doctest::Approx(a.z));
  }
}

TEST_CASE("forward kinematics matches the homogeneous-transform oracle") {
  RobotGeometry g;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> joint(-1.4, 1.4);
  std::uniform_real_distribution<double> angle(-40.0, 40.0);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    BodyPose pose;
    pose.position = {pos(rng), pos(rng), 0.5 * pos(rng)};
    pose.roll_deg = angle(rng);
    pose.pitch_deg = angle(rng);
    pose.yaw_deg = 4.0 * angle(rng);
    const Joint3 q{joint(rng), joint(rng), joint(rng)};
    const auto leg = leg_at(static_cast<std::size_t>(i % 6));
    const auto f = forward_kinematics(g, pose, leg, q);
    const auto o = oracle_foot(g, pose, leg, q);
    REQUIRE_FALSE(f.clamped);
    REQUIRE(std::abs(f.position.x - o.x()) < 1e-9);
    REQUIRE(std::abs(f.position.y - o.y()) < 1e-9);
    REQUIRE(std::abs(f.position.z - o.z()) < 1e-9);
  }
}

TEST_CASE("out-of-limit joints are clamped and flagged") {
  RobotGeometry g;
  const auto over = forward_kinematics(g, BodyPose{}, LegId::L2, {2.0, 0.0, 0.0});
  const auto at = forward_kinematics(g, BodyPose{}, LegId::L2, {1.4, 0.0, 0.0});
  CHECK(over.clamped);
  CHECK_FALSE(at.clamped);
  CHECK(over.position == at.position);
}

TEST_CASE("FK is Lipschitz in the joint angles") {
  RobotGeometry g;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> joint(-1.3, 1.3);
  const double h = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const Joint3 q{joint(rng), joint(rng), joint(rng)};
    for (std::size_t k = 0; k < 3; ++k) {
      Joint3 p = q;
      p[k] += h;
      const auto a = foot_in_body(g, LegId::R3, q).position;
      const auto b = foot_in_body(g, LegId::R3, p).position;
      REQUIRE(norm(b - a) / h <= g.leg_length() + 1e-6);
    }
  }
}

TEST_CASE("IMU emulation") {
  BodyPose level;
  Imu clean(1, 0.0);
  const auto r0 = clean.read(level);
  CHECK(r0.roll_deg == 0.0);
  CHECK(r0.pitch_deg == 0.0);
  BodyPose rolled;
  rolled.roll_deg = 12.0;
  CHECK(clean.read(rolled).roll_deg == 12.0);

  Imu a(42, 0.2), b(42, 0.2), c(43, 0.2);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto ra = a.read(level);
    const auto rb = b.read(level);
    const auto rc = c.read(level);
    REQUIRE(ra.roll_deg == rb.roll_deg);
    REQUIRE(ra.pitch_deg == rb.pitch_deg);
    differs = differs || rc.roll_deg != ra.roll_deg;
  }
  CHECK(differs);
}

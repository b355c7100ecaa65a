#include "beetle/body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beetle::body {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

Vec3 RobotGeometry::mount(LegId leg) const {
  double x = 0.0;
  if (is_front(leg)) x = mount_x_front;
  if (is_hind(leg)) x = mount_x_hind;
  return {x, side_sign(leg) * 0.5 * body_width, 0.0};
}

double RobotGeometry::neutral_yaw(LegId leg) const {
  return side_sign(leg) * std::numbers::pi / 2.0;
}

FootResult foot_in_body(const RobotGeometry& geometry, LegId leg, Joint3 joints) {
  FootResult out;
  for (std::size_t k = 0; k < 3; ++k) {
    const double clamped = std::clamp(joints[k], geometry.limits.lo[k], geometry.limits.hi[k]);
    out.clamped = out.clamped || clamped != joints[k];
    joints[k] = clamped;
  }
  const double yaw = geometry.neutral_yaw(leg) - side_sign(leg) * joints.bc;
  const double femur_elev = -joints.cf;
  const double tibia_elev = -(joints.cf + joints.ft);
  const double reach = geometry.coxa + geometry.femur * std::cos(femur_elev) +
                       geometry.tibia * std::cos(tibia_elev);
  const double z = geometry.femur * std::sin(femur_elev) + geometry.tibia * std::sin(tibia_elev);
  const Vec3 m = geometry.mount(leg);
  out.position = {m.x + reach * std::cos(yaw), m.y + reach * std::sin(yaw), m.z + z};
  return out;
}

Vec3 body_to_world(const BodyPose& pose, const Vec3& p) {
  // R = Rz(yaw) * Ry(-pitch) * Rx(-roll)
  const double r = -pose.roll_deg * kDeg;
  const double q = -pose.pitch_deg * kDeg;
  const double y = pose.yaw_deg * kDeg;
  const Vec3 a{p.x, std::cos(r) * p.y - std::sin(r) * p.z, std::sin(r) * p.y + std::cos(r) * p.z};
  const Vec3 b{std::cos(q) * a.x + std::sin(q) * a.z, a.y, -std::sin(q) * a.x + std::cos(q) * a.z};
  const Vec3 c{std::cos(y) * b.x - std::sin(y) * b.y, std::sin(y) * b.x + std::cos(y) * b.y, b.z};
  return c + pose.position;
}

FootResult forward_kinematics(const RobotGeometry& geometry, const BodyPose& pose, LegId leg,
                              Joint3 joints) {
  auto local = foot_in_body(geometry, leg, joints);
  local.position = body_to_world(pose, local.position);
  return local;
}

std::array<Vec3, kLegCount> RobotState::feet(const RobotGeometry& geometry) const {
  std::array<Vec3, kLegCount> out{};
  for (auto leg : kAllLegs) {
    out[index(leg)] = forward_kinematics(geometry, pose, leg, joints[index(leg)]).position;
  }
  return out;
}

ImuReading Imu::read(const BodyPose& pose) {
  ImuReading r{pose.roll_deg, pose.pitch_deg};
  if (sigma_ > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_);
    r.roll_deg += noise(rng_);
    r.pitch_deg += noise(rng_);
  }
  return r;
}

}  // namespace beetle::body

#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "beetle/legs.hpp"

namespace beetle::body {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

double norm(const Vec3& v);

// Hexapod geometry in the body frame: +x towards the head, +y to the left,
// +z up. Ball rolling moves the robot along -x.
struct RobotGeometry {
  double body_length = 0.30;
  double body_width = 0.20;
  double coxa = 0.05;
  double femur = 0.15;
  double tibia = 0.15;
  double mass = 4.7;  // kg
  double mount_x_front = 0.12;
  double mount_x_hind = -0.12;
  JointLimits limits;

  double leg_length() const { return coxa + femur + tibia; }
  Vec3 mount(LegId leg) const;
  /// Heading of the straight leg in the body xy-plane at BC = 0.
  double neutral_yaw(LegId leg) const;
};

/// Body pose in the world. Angles in degrees: roll is positive when the left
/// side is lower, pitch is positive nose-up, yaw counter-clockwise about +z.
struct BodyPose {
  Vec3 position;
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
};

struct RobotState {
  BodyPose pose;
  std::array<Joint3, kLegCount> joints{};
  std::array<bool, kLegCount> contact{};

  /// Foot positions recomputed from pose and joints.
  std::array<Vec3, kLegCount> feet(const RobotGeometry& geometry) const;
};

struct FootResult {
  Vec3 position;
  bool clamped = false;
};

/// Foot position in the body frame. Joint convention: BC positive swings the
/// foot towards +x on both sides; CF positive depresses the femur; FT positive
/// flexes the tibia downwards. All zeros is a straight horizontal leg.
FootResult foot_in_body(const RobotGeometry& geometry, LegId leg, Joint3 joints);

/// World-frame foot position. Out-of-limit joints are clamped and flagged.
FootResult forward_kinematics(const RobotGeometry& geometry, const BodyPose& pose, LegId leg,
                              Joint3 joints);

Vec3 body_to_world(const BodyPose& pose, const Vec3& p);

struct ImuReading {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
};

/// Roll/pitch with optional zero-mean Gaussian noise from a seeded generator.
class Imu {
 public:
  Imu(std::uint64_t seed, double sigma_deg) : rng_(seed), sigma_(sigma_deg) {}
  ImuReading read(const BodyPose& pose);

 private:
  std::mt19937_64 rng_;
  double sigma_;
};

}  // namespace beetle::body

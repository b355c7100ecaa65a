#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "beetle/body.hpp"
#include "beetle/legs.hpp"
#include "beetle/terrain.hpp"

namespace beetle::sim {

inline constexpr double kGravity = 9.81;

class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(long tick, const std::string& what)
      : std::runtime_error(what + " at tick " + std::to_string(tick)), tick_(tick) {}
  long tick() const { return tick_; }

 private:
  long tick_;
};

class ContactError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BallType { Soft, Rigid };

struct BallSpec {
  BallType type = BallType::Soft;
  double diameter = 0.60;          // m
  double mass = 2.0;               // kg
  double mu_leg = 0.7;             // leg-ball friction
  double rolling_resistance = 0.06;  // f_og = c * m * g
  double deformation_damping = 8.0;  // N/(m/s)
  double wall_stiffness = 1500.0;    // N/m, soft balls are more compliant
  double inertia_factor = 2.0 / 3.0;  // hollow shell, I = k m r^2
  double disturbance_transfer = 0.6;  // share of ground and wall tilt passed on to the robot

  double radius() const { return 0.5 * diameter; }
  /// Translational mass plus rotational inertia about the ground contact.
  double effective_mass() const { return mass * (1.0 + inertia_factor); }
  void validate() const;
};

BallSpec make_ball(BallType type);

enum class LegSetupPreset { NL, FL, FL_SM };

struct LegSetup {
  LegSetupPreset preset = LegSetupPreset::NL;
  double front_ground_multiplier = 1.0;
  double front_lateral_support = 0.0;  // N*m of extra roll support from the tarsi
  double hind_ball_multiplier = 1.0;
};

LegSetup make_leg_setup(LegSetupPreset preset);

// Model constants of the quasi-static robot and dynamic ball. These are fits
// chosen for qualitative behaviour, not measured values.
struct SimParams {
  double dt = 1.0 / 60.0;
  double servo_rate = 8.0;           // rad/s
  double contact_tolerance = 2e-3;   // m
  std::array<double, 3> load_weight{0.5, 0.5, 2.0};  // front, middle, hind
  double extension_load_gain = 1.0;  // load share increase per cm of front extension
  double roll_load_shift = 0.8;
  double coupling = 120.0;           // N/(m/s) leg-ball velocity coupling
  double lean_push = 0.12;           // forward push per newton of ball-leg load
  double gap_restore = 1.0;          // 1/s, ball legs re-centre the ball in their workspace
  double middle_contact_height = 0.6;  // fraction of diameter
  double lateral_damping = 60.0;     // N/(m/s)
  double heading_follow = 0.3;       // 1/s
  double gap_limit = 0.12;           // m; beyond this the ball legs lose the ball
  double pitch_rest_deg = 20.0;
  double pitch_per_gap = 50.0;       // deg/m, robot pitches down as the ball pulls away
  double pitch_lag = 0.15;           // s
  double roll_lag = 0.3;            // s
  double roll_com_height = 0.25;     // m, robot centre of mass above the roll pivot
  double roll_tip_gain = 25.0;       // deg/s per unit normalised unsupported moment
  double roll_relax = 0.6;           // s
  double front_support_efficiency = 4.0;
  double terrain_roll_gain = 1.0;
  double ball_slope_roll_gain = 60.0;  // deg per unit lateral slope
  double wall_roll_gain = 2.0;       // deg per newton of lateral wall force
  double wall_pitch_gain = 0.5;      // deg per N of wall normal force
  double wall_moment_arm = 1.5;      // m, height of the wall load path above the roll pivot
  double wall_friction = 0.3;
  double wall_damping = 40.0;        // N/(m/s)
  double floor_noise = 0.01;         // std of floor micro-slope (rad)
  double floor_noise_time = 1.0;     // s
  double tip_over_deg = 35.0;
  double imu_noise_deg = 0.1;
  double initial_gap_jitter = 0.002;  // m
};

enum class ContactState { Stick, Slip };

/// Stick iff |tangential| <= mu * normal (boundary counts as stick).
ContactState slip_check(double tangential, double normal, double mu);

struct ResolvedForce {
  double tangential = 0.0;
  ContactState state = ContactState::Stick;
};

/// Coulomb cap of a drive force: |t| <= mu * normal.
ResolvedForce resolve_contact(double drive, double normal, double mu);

struct LegForce {
  bool contact = false;
  double normal = 0.0;       // N, vertical load through the leg
  double tangential = 0.0;   // N along travel; on the ball for ball legs, from the ground for front legs
  double mu = 0.0;
  bool slip = false;
  double lateral = 0.0;      // m, lever arm about the body/ball centre line (left positive)
};

/// Vertical load split over contacting legs; sums to mass * g exactly.
/// Throws SimulationFault when nothing is in contact.
std::array<double, kLegCount> distribute_load(const SimParams& params, double robot_mass,
                                              const std::array<bool, kLegCount>& contact,
                                              const std::array<double, kLegCount>& extension,
                                              double roll_deg, long tick = 0);

/// Roll moment of the middle and hind leg loads about the body centre line
/// (N*m). Positive tips the left side down.
double ball_leg_moment(const std::array<double, kLegCount>& normal,
                       const std::array<body::Vec3, kLegCount>& feet,
                       const std::array<bool, kLegCount>& contact);

/// Part of a roll moment that the front legs cannot hold (zero when supported).
double unsupported_moment(double moment, double support_left, double support_right);

struct WallContact {
  double normal_force = 0.0;   // N, along the wall normal into free space
  double penetration = 0.0;    // m
  double nx = 0.0, ny = 0.0;   // unit normal
  double tx = 0.0, ty = 0.0;   // unit tangent
  double friction_limit = 0.0; // N, mu_w * normal
  double yaw_moment = 0.0;     // N*m about the ball's vertical axis
};

WallContact wall_contact(double ball_x, double ball_y, double vel_x, double vel_y,
                         const BallSpec& ball, const WallSpec& wall, double wall_friction);

struct BallState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double heading_deg = 0.0;  // travel direction of the ball/robot pair
  double path_length = 0.0;
  double angular_speed() const;
};

struct WorldState {
  body::RobotState robot;
  BallState ball;
  long tick = 0;
  double gap = 0.0;       // m, ball lead over the robot relative to the nominal posture
  double roll_tip = 0.0;  // deg, accumulated tipping part of roll
  double floor_slope = 0.0;
  double floor_slope_lateral = 0.0;
  double roll_offset = 0.0;
};

struct StepReport {
  std::array<LegForce, kLegCount> legs{};
  double body_speed = 0.0;
  double ball_speed = 0.0;
  double joint_power = 0.0;  // W, sum |tau * omega|
  double ke_delta = 0.0;
  double work_in = 0.0;      // J from legs, gravity, floor slope and wall spring
  double penetration = 0.0;  // m, ball-wall overlap
  bool front_slip = false;
  bool hind_slip = false;
  bool ball_contact_lost = false;
  bool tipped = false;
  int clamp_events = 0;
  WallContact wall;
};

struct SimSetup {
  body::RobotGeometry geometry;
  BallSpec ball;
  LegSetup legs;
  SimParams params;
  std::array<Joint3, kLegCount> bias_posture{};
  double start_heading_deg = 0.0;
  double start_x = 0.0, start_y = 0.0;
  std::uint64_t seed = 1;
};

// Steps one trial of the robot-ball-terrain system. Single writer; all
// randomness comes from the trial's own generator.
class BallSim {
 public:
  BallSim(SimSetup setup, Terrain terrain);

  StepReport step(const JointCommandFrame& command);
  const WorldState& world() const { return world_; }
  const SimSetup& setup() const { return setup_; }
  const Terrain& terrain() const { return terrain_; }
  /// Current IMU-visible pose (no noise).
  const body::BodyPose& pose() const { return world_.robot.pose; }

 private:
  void update_pose(double pitch_target, double roll_offset);

  SimSetup setup_;
  Terrain terrain_;
  WorldState world_;
  std::array<body::Vec3, kLegCount> feet_prev_{};
  std::array<double, kLegCount> nominal_z_{};
  std::mt19937_64 rng_;
  double pitch_ = 0.0;
};

}  // namespace beetle::sim

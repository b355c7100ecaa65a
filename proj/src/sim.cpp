#include "beetle/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beetle::sim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0) a += 360.0;
  return a - 180.0;
}

double leg_weight(const SimParams& p, LegId leg) {
  if (is_front(leg)) return p.load_weight[0];
  if (is_middle(leg)) return p.load_weight[1];
  return p.load_weight[2];
}

bool finite(double v) { return std::isfinite(v); }

// Numerical 3x3 Jacobian of the body-frame foot position.
std::array<body::Vec3, 3> foot_jacobian(const body::RobotGeometry& g, LegId leg, Joint3 q) {
  std::array<body::Vec3, 3> cols{};
  constexpr double h = 1e-6;
  for (std::size_t k = 0; k < 3; ++k) {
    Joint3 a = q, b = q;
    a[k] += h;
    b[k] -= h;
    cols[k] = (body::foot_in_body(g, leg, a).position - body::foot_in_body(g, leg, b).position) *
              (0.5 / h);
  }
  return cols;
}

}  // namespace

void BallSpec::validate() const {
  if (!(diameter > 0)) throw std::invalid_argument("ball diameter must be positive");
  if (!(mass > 0)) throw std::invalid_argument("ball mass must be positive");
  if (!(mu_leg > 0)) throw std::invalid_argument("ball friction must be positive");
}

BallSpec make_ball(BallType type) {
  BallSpec b;
  b.type = type;
  if (type == BallType::Rigid) {
    b.mass = 4.6;
    b.mu_leg = 0.4;
    b.rolling_resistance = 0.015;
    b.deformation_damping = 1.0;
    b.wall_stiffness = 15000.0;
    b.disturbance_transfer = 1.0;
  }
  return b;
}

LegSetup make_leg_setup(LegSetupPreset preset) {
  LegSetup s;
  s.preset = preset;
  if (preset != LegSetupPreset::NL) {
    s.front_ground_multiplier = 1.4;
    s.front_lateral_support = 1.5;
  }
  if (preset == LegSetupPreset::FL_SM) s.hind_ball_multiplier = 1.5;
  return s;
}

ContactState slip_check(double tangential, double normal, double mu) {
  if (normal < 0) throw ContactError("negative normal force");
  return std::abs(tangential) <= mu * normal ? ContactState::Stick : ContactState::Slip;
}

ResolvedForce resolve_contact(double drive, double normal, double mu) {
  ResolvedForce r;
  r.state = slip_check(drive, normal, mu);
  const double cap = mu * normal;
  r.tangential = std::clamp(drive, -cap, cap);
  return r;
}

std::array<double, kLegCount> distribute_load(const SimParams& params, double robot_mass,
                                              const std::array<bool, kLegCount>& contact,
                                              const std::array<double, kLegCount>& extension,
                                              double roll_deg, long tick) {
  std::array<double, kLegCount> w{};
  double total = 0.0;
  const double shift = params.roll_load_shift * std::sin(roll_deg * kDeg);
  for (auto leg : kAllLegs) {
    const auto i = index(leg);
    if (!contact[i]) continue;
    w[i] = leg_weight(params, leg) * (1.0 + params.extension_load_gain * extension[i] / 0.01) *
           std::max(0.05, 1.0 + shift * side_sign(leg));
    total += w[i];
  }
  if (total <= 0.0) throw SimulationFault(tick, "free fall: no leg in contact");
  const double weight = robot_mass * kGravity;
  std::array<double, kLegCount> n{};
  for (std::size_t i = 0; i < kLegCount; ++i) n[i] = weight * w[i] / total;
  return n;
}

double ball_leg_moment(const std::array<double, kLegCount>& normal,
                       const std::array<body::Vec3, kLegCount>& feet,
                       const std::array<bool, kLegCount>& contact) {
  double m = 0.0;
  for (auto leg : kAllLegs) {
    if (!is_front(leg) && contact[index(leg)]) m += normal[index(leg)] * feet[index(leg)].y;
  }
  return m;
}

double unsupported_moment(double moment, double support_left, double support_right) {
  return moment > 0 ? std::max(0.0, moment - support_left) : std::min(0.0, moment + support_right);
}

WallContact wall_contact(double ball_x, double ball_y, double vel_x, double vel_y,
                         const BallSpec& ball, const WallSpec& wall, double wall_friction) {
  WallContact c;
  const double d = wall.direction_deg * kDeg;
  c.tx = std::cos(d);
  c.ty = std::sin(d);
  c.nx = std::sin(d);
  c.ny = -std::cos(d);
  const double dist = (ball_x - wall.point_x) * c.nx + (ball_y - wall.point_y) * c.ny;
  c.penetration = std::max(0.0, ball.radius() - dist);
  if (c.penetration <= 0.0) return c;
  c.normal_force = ball.wall_stiffness * c.penetration;
  c.friction_limit = wall_friction * c.normal_force;
  const double slide = vel_x * c.tx + vel_y * c.ty;
  // Friction at the contact point opposes sliding; lever arm is the radius.
  c.yaw_moment = slide == 0.0 ? 0.0 : -std::copysign(c.friction_limit * ball.radius(), slide);
  return c;
}

double BallState::angular_speed() const { return std::hypot(vx, vy); }

BallSim::BallSim(SimSetup setup, Terrain terrain)
    : setup_(std::move(setup)), terrain_(std::move(terrain)), rng_(setup_.seed) {
  setup_.ball.validate();
  world_.robot.joints = setup_.bias_posture;
  for (auto leg : kAllLegs) {
    const auto i = index(leg);
    const auto foot = body::foot_in_body(setup_.geometry, leg, setup_.bias_posture[i]).position;
    nominal_z_[i] = foot.z;
    feet_prev_[i] = foot;
    world_.robot.contact[i] = true;
  }
  world_.ball.x = setup_.start_x;
  world_.ball.y = setup_.start_y;
  world_.ball.heading_deg = setup_.start_heading_deg;
  std::uniform_real_distribution<double> jitter(-setup_.params.initial_gap_jitter,
                                                setup_.params.initial_gap_jitter);
  world_.gap = jitter(rng_);
  pitch_ = setup_.params.pitch_rest_deg - setup_.params.pitch_per_gap * world_.gap;
  update_pose(pitch_, 0.0);
}

void BallSim::update_pose(double pitch, double roll) {
  const auto& b = world_.ball;
  const double h = b.heading_deg * kDeg;
  const double back = setup_.ball.radius() + 0.15 + world_.gap;
  auto& pose = world_.robot.pose;
  pose.position.x = b.x - back * std::cos(h);
  pose.position.y = b.y - back * std::sin(h);
  pose.position.z = terrain_.height(pose.position.x, pose.position.y) + 0.45;
  // The body faces away from the direction of travel.
  pose.yaw_deg = wrap_deg(b.heading_deg + 180.0);
  pose.pitch_deg = pitch;
  pose.roll_deg = roll;
}

StepReport BallSim::step(const JointCommandFrame& command) {
  const auto& P = setup_.params;
  const auto& geo = setup_.geometry;
  const double dt = P.dt;
  const double r = setup_.ball.radius();
  const double m_eff = setup_.ball.effective_mass();
  const double m_ball = setup_.ball.mass;
  const double m_robot = geo.mass;
  StepReport rep;
  ++world_.tick;

  // Servo proxy.
  std::array<Joint3, kLegCount> q_prev = world_.robot.joints;
  const double max_step = P.servo_rate * dt;
  for (std::size_t i = 0; i < kLegCount; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      auto& q = world_.robot.joints[i][k];
      q += std::clamp(command.legs[i][k] - q, -max_step, max_step);
    }
  }

  // Foot kinematics in the body frame.
  std::array<body::Vec3, kLegCount> feet{};
  std::array<double, kLegCount> sweep{};      // propulsive sweep speed
  std::array<double, kLegCount> extension{};
  std::array<bool, kLegCount> contact{};
  rep.ball_contact_lost = std::abs(world_.gap) > P.gap_limit;
  for (auto leg : kAllLegs) {
    const auto i = index(leg);
    const auto fk = body::foot_in_body(geo, leg, world_.robot.joints[i]);
    if (fk.clamped) ++rep.clamp_events;
    feet[i] = fk.position;
    const double dx = (feet[i].x - feet_prev_[i].x) / dt;
    sweep[i] = is_front(leg) ? dx : -dx;
    const double dz = feet[i].z - nominal_z_[i];
    extension[i] = std::max(0.0, -dz);
    contact[i] = dz <= P.contact_tolerance;
    if (!is_front(leg) && rep.ball_contact_lost) contact[i] = false;
    rep.legs[i].lateral = feet[i].y;
  }
  feet_prev_ = feet;

  const double roll_now = world_.robot.pose.roll_deg;
  const auto normal = distribute_load(P, m_robot, contact, extension, roll_now, world_.tick);

  // Frame of travel.
  auto& ball = world_.ball;
  const double h = ball.heading_deg * kDeg;
  const double ux = std::cos(h), uy = std::sin(h);
  const double lx = -uy, ly = ux;  // left of travel
  const double v_par0 = ball.vx * ux + ball.vy * uy;
  const double v_perp0 = ball.vx * lx + ball.vy * ly;

  // External forces on the ball that do not depend on the legs.
  const auto [gx, gy] = terrain_.gradient(ball.x, ball.y);
  {
    const double a = std::exp(-dt / P.floor_noise_time);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double kick = P.floor_noise * std::sqrt(1 - a * a);
    world_.floor_slope = world_.floor_slope * a + kick * n01(rng_);
    world_.floor_slope_lateral = world_.floor_slope_lateral * a + kick * n01(rng_);
  }
  const double grav_par = -m_ball * kGravity * (gx * ux + gy * uy + world_.floor_slope);
  const double grav_perp = -m_ball * kGravity * (gx * lx + gy * ly + world_.floor_slope_lateral);
  WallContact wall;
  if (terrain_.kind() == TerrainKind::Wall) {
    wall = wall_contact(ball.x, ball.y, ball.vx, ball.vy, setup_.ball, terrain_.wall(), P.wall_friction);
    if (wall.penetration > r * 0.5) throw SimulationFault(world_.tick, "ball-wall interpenetration");
  }
  const double wall_par = wall.normal_force * (wall.nx * ux + wall.ny * uy);
  const double wall_perp = wall.normal_force * (wall.nx * lx + wall.ny * ly);
  const double f_other = grav_par + wall_par;

  // Front legs set the body speed; their ground friction bounds what the
  // ball legs can transmit.
  double front_sweep = 0.0, cap_front = 0.0;
  int n_front = 0;
  for (auto leg : {LegId::L1, LegId::R1}) {
    const auto i = index(leg);
    if (!contact[i]) continue;
    front_sweep += sweep[i];
    cap_front += terrain_.mu_ground() * setup_.legs.front_ground_multiplier * normal[i];
    ++n_front;
  }
  if (n_front > 0) front_sweep /= n_front;

  struct BallLeg {
    std::size_t i;
    double kappa, sweep, lean, cap;
  };
  std::array<BallLeg, 4> ball_legs{};
  std::size_t n_ball = 0;
  for (auto leg : {LegId::L2, LegId::L3, LegId::R2, LegId::R3}) {
    const auto i = index(leg);
    if (!contact[i]) continue;
    const double height = is_hind(leg) ? 1.0 : P.middle_contact_height;
    const double mu = setup_.ball.mu_leg * (is_hind(leg) ? setup_.legs.hind_ball_multiplier : 1.0);
    rep.legs[i].mu = mu;
    ball_legs[n_ball++] = {i, 0.5 / height, sweep[i], P.lean_push * normal[i], mu * normal[i]};
  }

  auto raw_force = [&](const BallLeg& b, double v_body, double v) {
    return P.coupling * (b.kappa * (v_body + b.sweep) - P.gap_restore * world_.gap - v) + b.lean;
  };
  auto leg_total = [&](double v_body, double v) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_ball; ++k) {
      sum += std::clamp(raw_force(ball_legs[k], v_body, v), -ball_legs[k].cap, ball_legs[k].cap);
    }
    return sum;
  };
  auto solve_v = [&](double v_body) {
    const double bound = dt / m_eff * (cap_front + std::abs(f_other)) + 1e-9;
    double lo = v_par0 - bound, hi = v_par0 + bound;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = std::clamp(leg_total(v_body, mid), -cap_front, cap_front) + f_other;
      if (m_eff * (mid - v_par0) / dt - f > 0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  // Body speed: the front sweep, reduced when the ball legs would need more
  // traction than the front feet have.
  auto demand_at = [&](double vb) { return leg_total(vb, solve_v(vb)); };
  double v_body = front_sweep;
  double v_par = solve_v(v_body);
  const double demand0 = leg_total(v_body, v_par);
  if (std::abs(demand0) > cap_front) {
    // Pushing too hard slows the body; braking too hard drags it along.
    const double limit = demand0 > 0 ? cap_front : -cap_front;
    double lo = demand0 > 0 ? front_sweep - 1.0 : front_sweep;
    double hi = demand0 > 0 ? front_sweep : front_sweep + 1.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (demand_at(mid) > limit) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    v_body = demand0 > 0 ? lo : hi;
    v_par = solve_v(v_body);
  }
  double front_scale = 1.0;
  double leg_sum = 0.0;
  {
    const double demand = leg_total(v_body, v_par);
    front_scale = std::abs(demand) > cap_front && demand != 0.0 ? cap_front / std::abs(demand) : 1.0;
    rep.front_slip = front_scale < 1.0 || v_body != front_sweep;
    for (std::size_t k = 0; k < n_ball; ++k) {
      const auto& b = ball_legs[k];
      const double raw = raw_force(b, v_body, v_par);
      auto& lf = rep.legs[b.i];
      const auto res = resolve_contact(raw, normal[b.i], lf.mu);
      lf.tangential = res.tangential * front_scale;
      lf.slip = res.state == ContactState::Slip;
      if (lf.slip && is_hind(leg_at(b.i))) rep.hind_slip = true;
      leg_sum += lf.tangential;
    }
  }
  double front_normal = 0.0;
  for (auto leg : {LegId::L1, LegId::R1}) {
    if (contact[index(leg)]) front_normal += normal[index(leg)];
  }
  for (auto leg : {LegId::L1, LegId::R1}) {
    const auto i = index(leg);
    auto& lf = rep.legs[i];
    lf.mu = terrain_.mu_ground() * setup_.legs.front_ground_multiplier;
    if (!contact[i] || front_normal <= 0) continue;
    lf.tangential = leg_sum * normal[i] / front_normal;
    lf.slip = rep.front_slip;
  }
  for (auto leg : kAllLegs) {
    rep.legs[index(leg)].contact = contact[index(leg)];
    rep.legs[index(leg)].normal = normal[index(leg)];
  }

  // Ball update: conservative part, then dissipation that only removes energy.
  const double f_par = leg_sum + f_other;
  double vp = v_par0 + dt / m_eff * f_par;
  double vq = v_perp0 + dt / m_eff * (grav_perp + wall_perp);
  rep.work_in = f_par * 0.5 * (v_par0 + vp) * dt + (grav_perp + wall_perp) * 0.5 * (v_perp0 + vq) * dt;
  double vx = vp * ux + vq * lx;
  double vy = vp * uy + vq * ly;
  {
    const double speed = std::hypot(vx, vy);
    if (speed > 0) {
      const double drop = setup_.ball.rolling_resistance * m_ball * kGravity * dt / m_eff;
      const double keep = std::max(0.0, speed - drop) / speed / (1.0 + setup_.ball.deformation_damping * dt / m_eff);
      vx *= keep;
      vy *= keep;
    }
    // Legs hold the ball sideways.
    const double par = vx * ux + vy * uy;
    const double perp = (vx * lx + vy * ly) / (1.0 + P.lateral_damping * dt / m_eff);
    vx = par * ux + perp * lx;
    vy = par * uy + perp * ly;
  }
  if (wall.normal_force > 0) {
    double vt = vx * wall.tx + vy * wall.ty;
    double vn = vx * wall.nx + vy * wall.ny;
    const double dv = wall.friction_limit * dt / m_eff;
    vt = std::copysign(std::max(0.0, std::abs(vt) - dv), vt);
    if (vn < 0) vn /= (1.0 + P.wall_damping * dt / m_eff);
    vx = vt * wall.tx + vn * wall.nx;
    vy = vt * wall.ty + vn * wall.ny;
  }
  rep.ke_delta = 0.5 * m_eff * (vx * vx + vy * vy - ball.vx * ball.vx - ball.vy * ball.vy);
  ball.vx = vx;
  ball.vy = vy;
  ball.x += vx * dt;
  ball.y += vy * dt;
  const double speed = std::hypot(vx, vy);
  ball.path_length += speed * dt;
  rep.ball_speed = vx * ux + vy * uy;
  rep.body_speed = v_body;
  rep.wall = wall;
  rep.penetration = wall.penetration;

  world_.gap += (rep.ball_speed - v_body) * dt;
  if (speed > 0.02) {
    const double err = wrap_deg(std::atan2(vy, vx) / kDeg - ball.heading_deg);
    ball.heading_deg = wrap_deg(ball.heading_deg + P.heading_follow * err * dt);
  }

  // Pitch follows the robot's position on the ball and the ground under the front legs.
  const auto& pose = world_.robot.pose;
  double pitch_target = P.pitch_rest_deg - P.pitch_per_gap * world_.gap;
  {
    const auto front_world = body::body_to_world(pose, (feet[0] + feet[3]) * 0.5);
    const double dh = terrain_.height(front_world.x, front_world.y) - terrain_.height(ball.x, ball.y);
    pitch_target += std::atan2(dh, 0.6) / kDeg;
  }
  pitch_target += setup_.ball.disturbance_transfer * P.wall_pitch_gain * wall.normal_force;
  pitch_ += (pitch_target - pitch_) * std::min(1.0, dt / P.pitch_lag);

  // Roll: ball-leg load imbalance and the robot's own weight tip the body;
  // only the front leg on the lower side can hold it.
  const double roll_prev = pose.roll_deg;
  double moment = m_robot * kGravity * P.roll_com_height * std::sin(roll_prev * kDeg) +
                  ball_leg_moment(normal, feet, contact);
  moment -= setup_.ball.disturbance_transfer * P.wall_moment_arm * wall_perp;
  double support_left = setup_.legs.front_lateral_support;
  double support_right = setup_.legs.front_lateral_support;
  for (auto leg : {LegId::L1, LegId::R1}) {
    const auto i = index(leg);
    if (!contact[i]) continue;
    const double s = normal[i] * std::abs(feet[i].y) * P.front_support_efficiency;
    (is_left(leg) ? support_left : support_right) += s;
  }
  const double unsupported = unsupported_moment(moment, support_left, support_right);
  const double reference = m_robot * kGravity * 0.1;
  if (unsupported != 0.0) {
    world_.roll_tip += P.roll_tip_gain * unsupported / reference * dt;
  } else {
    world_.roll_tip -= world_.roll_tip * std::min(1.0, dt / P.roll_relax);
  }

  double roll_offset = 0.0;
  {
    const auto l1 = body::body_to_world(pose, feet[index(LegId::L1)]);
    const auto r1 = body::body_to_world(pose, feet[index(LegId::R1)]);
    const double span = std::max(0.05, std::abs(feet[index(LegId::L1)].y - feet[index(LegId::R1)].y));
    const double dh = terrain_.height(l1.x, l1.y) - terrain_.height(r1.x, r1.y);
    roll_offset -= P.terrain_roll_gain * std::atan2(dh, span) / kDeg;
    // Ground rising to the left of travel lifts the robot's right side.
    const double transfer = setup_.ball.disturbance_transfer;
    roll_offset += transfer * P.ball_slope_roll_gain * (gx * lx + gy * ly + world_.floor_slope_lateral);
    roll_offset -= transfer * P.wall_roll_gain * wall_perp;
    for (auto leg : {LegId::L1, LegId::R1}) {
      const auto i = index(leg);
      roll_offset -= side_sign(leg) * std::atan2(extension[i], std::max(0.05, std::abs(feet[i].y))) / kDeg;
    }
  }
  world_.roll_offset += (roll_offset - world_.roll_offset) * std::min(1.0, dt / P.roll_lag);
  update_pose(pitch_, world_.roll_tip + world_.roll_offset);
  rep.tipped = std::abs(world_.robot.pose.roll_deg) > P.tip_over_deg;

  // Joint power from contact forces mapped through the leg Jacobians.
  for (auto leg : kAllLegs) {
    const auto i = index(leg);
    if (!contact[i]) continue;
    // Travel is -x in the body frame.
    const body::Vec3 f = is_front(leg) ? body::Vec3{-rep.legs[i].tangential, 0.0, normal[i]}
                                       : body::Vec3{rep.legs[i].tangential, 0.0, normal[i]};
    const auto J = foot_jacobian(geo, leg, world_.robot.joints[i]);
    for (std::size_t k = 0; k < 3; ++k) {
      const double tau = J[k].x * f.x + J[k].y * f.y + J[k].z * f.z;
      const double omega = (world_.robot.joints[i][k] - q_prev[i][k]) / dt;
      rep.joint_power += std::abs(tau * omega);
    }
  }
  world_.robot.contact = contact;

  if (!finite(ball.x) || !finite(ball.y) || !finite(world_.gap) || !finite(pitch_) ||
      !finite(world_.roll_tip) || !finite(rep.joint_power)) {
    throw SimulationFault(world_.tick, "non-finite simulation state");
  }
  return rep;
}

}  // namespace beetle::sim

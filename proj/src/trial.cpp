#include <cmath>
#include <fstream>

#include "beetle/harness.hpp"
#include "beetle/neuro.hpp"
#include "beetle/roc.hpp"
#include "beetle/sim.hpp"

namespace beetle::harness {

using config::ScenarioConfig;

namespace {

sim::Terrain make_terrain(const ScenarioConfig& c, std::uint64_t seed) {
  const auto& t = c.terrain;
  switch (t.kind) {
    case sim::TerrainKind::Uneven:
      return sim::Terrain::uneven(seed + t.seed_offset, t.roughness_ratio, c.geometry.leg_length(),
                                  t.mu_ground, t.resolution, t.feature_size, t.half_extent);
    case sim::TerrainKind::Wall:
      return sim::Terrain::wall(t.wall, t.mu_ground);
    case sim::TerrainKind::Flat:
      break;
  }
  return sim::Terrain::flat(t.mu_ground);
}

sim::FailureCriteria failure_criteria(const ScenarioConfig& c) {
  sim::FailureCriteria f;
  f.tip_over_deg = c.sim.tip_over_deg;
  f.gap_limit = c.sim.gap_limit;
  f.target_m = c.target_m;
  f.stall_window_s = c.failure.stall_window_s;
  f.stall_distance_m = c.failure.stall_distance_m;
  f.pitch_error_deg = c.failure.pitch_error_deg;
  f.slip_window_s = c.failure.slip_window_s;
  f.slip_fraction = c.failure.slip_fraction;
  return f;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::array<Joint3, kLegCount> bias_posture(const ScenarioConfig& c) {
  std::array<Joint3, kLegCount> p{};
  for (auto leg : kAllLegs) p[index(leg)] = c.motor.for_leg(leg).bias();
  return p;
}

gait::MetricsOptions metrics_options(const ScenarioConfig& c) {
  gait::MetricsOptions m;
  m.stance.force_threshold = c.analysis.stance_force_threshold;
  m.stance.debounce_ticks = c.analysis.stance_debounce_ticks;
  m.warmup_ticks = c.analysis.warmup_ticks;
  m.froude_sqrt = c.analysis.froude_sqrt;
  m.cot_include_ball = c.analysis.cot_include_ball;
  m.pitch_active_below = c.analysis.pitch_active_below;
  m.failure = failure_criteria(c);
  return m;
}

lcpg::BankConfig bank_config(const ScenarioConfig& c) {
  lcpg::BankConfig b;
  b.cpg = lcpg::make_cpg_config(c.period_ticks, c.activation_delay, c.cpg_gain);
  b.cpg.hind_middle_offset = c.hind_middle_offset;
  b.duty_factor = c.duty_factor;
  b.lift_floor = c.lift_floor;
  for (auto leg : kAllLegs) b.motor[index(leg)] = c.motor.for_leg(leg);
  b.limits = c.geometry.limits;
  return b;
}

TrialRun simulate_trial(const ScenarioConfig& c) {
  TrialRun run;
  auto& res = run.result;
  auto& tr = run.trace;
  res.name = c.name;
  res.seed = c.seed;
  res.fingerprint = config::fingerprint_hex(c);
  tr.dt = c.sim.dt;
  tr.header = config::flatten(c);

  try {
    const auto bank_cfg = bank_config(c);
    lcpg::LcpgBank bank(bank_cfg);
    sim::SimSetup setup;
    setup.geometry = c.geometry;
    setup.ball = c.ball;
    setup.legs = c.leg_setup;
    setup.params = c.sim;
    setup.bias_posture = bias_posture(c);
    setup.seed = c.seed;
    if (c.terrain.kind == sim::TerrainKind::Wall) {
      setup.start_heading_deg = c.terrain.wall.direction_deg + c.terrain.approach_deg;
    }
    sim::BallSim world(setup, make_terrain(c, c.seed));
    body::Imu imu(c.seed ^ 0x9e3779b97f4a7c15ULL, c.sim.imu_noise_deg);
    roc::OrientationController roc(c.roll, c.pitch);
    const auto initial = imu.read(world.pose());
    roc.pitch_config().reference_deg = initial.pitch_deg;
    const bool use_roc = c.controller == config::Controller::LcpgRoc;
    sim::FailureMonitor monitor(failure_criteria(c));

    const long max_ticks = std::lround(c.duration_s / c.sim.dt);
    tr.rows.reserve(static_cast<std::size_t>(max_ticks));
    for (long t = 0; t < max_ticks; ++t) {
      const auto bt = bank.step();
      const auto reading = imu.read(world.pose());
      const auto ctl = roc.update(reading.roll_deg, reading.pitch_deg);
      JointCommandFrame frame = bt.frame;
      if (use_roc) frame = roc::apply_roc(bt.frame, bank_cfg.motor, ctl.roll, ctl.gains, bank_cfg.limits);
      const auto rep = world.step(frame);
      const auto& w = world.world();

      trace::TraceRow row;
      row.tick = t;
      row.time_s = static_cast<double>(t + 1) * c.sim.dt;
      row.command = frame.legs;
      row.angle = w.robot.joints;
      for (std::size_t i = 0; i < kLegCount; ++i) {
        row.contact[i] = rep.legs[i].contact;
        row.normal[i] = rep.legs[i].normal;
        row.tangential[i] = rep.legs[i].tangential;
        row.mu[i] = rep.legs[i].mu;
      }
      row.roll_deg = w.robot.pose.roll_deg;
      row.pitch_deg = w.robot.pose.pitch_deg;
      row.yaw_deg = w.robot.pose.yaw_deg;
      row.e_roll = ctl.errors.roll_deg;
      row.e_pitch = ctl.errors.pitch_deg;
      if (use_roc) {
        row.m_left = ctl.roll.m_left;
        row.m_right = ctl.roll.m_right;
        row.gate = ctl.roll.gate_active;
        row.sf_front = ctl.gains.front;
        row.sf_back = ctl.gains.back;
      }
      row.ball_x = w.ball.x;
      row.ball_y = w.ball.y;
      row.path_length = w.ball.path_length;
      row.power_w = rep.joint_power;
      row.hind_slip = rep.hind_slip;
      row.front_slip = rep.front_slip;
      row.gap = w.gap;
      row.body_speed = rep.body_speed;
      row.ball_speed = rep.ball_speed;
      row.ke_delta = rep.ke_delta;
      row.work_in = rep.work_in;
      row.penetration = rep.penetration;
      row.ball_heading_deg = w.ball.heading_deg;
      tr.rows.push_back(row);
      if (monitor.push({row.time_s, row.roll_deg, row.e_pitch, row.gap, row.path_length, row.hind_slip})) break;
    }
    res.ticks = static_cast<long>(tr.rows.size());
    res.metrics = gait::compute_metrics(tr, c.geometry, c.ball.diameter, c.ball.mass, metrics_options(c));
  } catch (const sim::SimulationFault& e) {
    res.faulted = true;
    res.fault = e.what();
  } catch (const lcpg::OscillatorDeathFault& e) {
    res.faulted = true;
    res.fault = e.what();
  } catch (const neuro::NumericFault& e) {
    res.faulted = true;
    res.fault = e.what();
  } catch (const roc::SensorFault& e) {
    res.faulted = true;
    res.fault = e.what();
  }
  res.ticks = static_cast<long>(tr.rows.size());
  return run;
}

TrialResult run_trial(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override,
                      const std::filesystem::path& trace_path) {
  ScenarioConfig c = config;
  if (seed_override) c.seed = *seed_override;
  auto run = simulate_trial(c);
  const auto text = trace::to_csv(run.trace);
  run.result.trace_hash = hex64(config::fnv1a64(text));
  if (!trace_path.empty()) {
    if (trace_path.has_parent_path()) std::filesystem::create_directories(trace_path.parent_path());
    {
      std::ofstream out(trace_path, std::ios::binary);
      out << text;
      if (!out) throw trace::TraceError("cannot write trace " + trace_path.string());
    }
    run.result.trace_path = trace_path.string();
    const auto rp = result_path_for(trace_path);
    std::ofstream out(rp, std::ios::binary);
    out << to_json(run.result).dump(2) << "\n";
    if (!out) throw trace::TraceError("cannot write result " + rp.string());
  }
  return run.result;
}

config::ScenarioConfig config_from_trace(const trace::GaitTrace& trace) { return config::from_flat(trace.header); }

gait::TrialMetrics analyze_trace(const trace::GaitTrace& trace) {
  const auto c = config_from_trace(trace);
  return gait::compute_metrics(trace, c.geometry, c.ball.diameter, c.ball.mass, metrics_options(c));
}

}  // namespace beetle::harness

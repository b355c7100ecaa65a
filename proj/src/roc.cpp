#include "beetle/roc.hpp"

#include <algorithm>
#include <cmath>

namespace beetle::roc {

void RollControlConfig::validate() const {
  if (!(relu_bias_deg > 0)) throw neuro::ConfigurationError("roll ReLU bias must be positive");
  if (k_cf < 0 || k_ft < 0) throw neuro::ConfigurationError("roll gains must be non-negative");
}

void PitchControlConfig::validate() const {
  if (!(slope_deg > 0)) throw neuro::ConfigurationError("pitch slope delta must be positive");
  if (!(alpha > 0 && alpha <= 1)) throw neuro::ConfigurationError("pitch alpha must lie in (0, 1]");
}

Errors compute_errors(double imu_roll_deg, double imu_pitch_deg, const RollControlConfig& roll,
                      const PitchControlConfig& pitch) {
  if (!std::isfinite(imu_roll_deg) || !std::isfinite(imu_pitch_deg)) {
    throw SensorFault("non-finite IMU feedback");
  }
  return {roll.reference_deg - imu_roll_deg, pitch.reference_deg - imu_pitch_deg};
}

RollOutput roll_modulation(double e_roll_deg, const RollControlConfig& config) {
  RollOutput out;
  out.m_left = std::max(0.0, -e_roll_deg - config.relu_bias_deg);
  out.m_right = std::max(0.0, e_roll_deg - config.relu_bias_deg);
  out.d_cf_l1 = config.k_cf * out.m_left;
  out.d_ft_l1 = config.k_ft * out.m_left;
  out.d_cf_r1 = config.k_cf * out.m_right;
  out.d_ft_r1 = config.k_ft * out.m_right;
  out.gate_active = roll_inhibition_gate(e_roll_deg, config);
  return out;
}

bool roll_inhibition_gate(double e_roll_deg, const RollControlConfig& config) {
  return std::abs(e_roll_deg) > config.gate_threshold_deg;
}

ShuntingGains step_pitch_control(double e_pitch_deg, RocState& state,
                                 const PitchControlConfig& config) {
  const double target_front = std::min(e_pitch_deg / config.slope_deg + 1.0, 1.0);
  const double target_back = std::min(-e_pitch_deg / config.slope_deg + 1.0, 1.0);
  state.sf_front = std::clamp(config.alpha * target_front + (1.0 - config.alpha) * state.sf_front, 0.0, 1.0);
  state.sf_back = std::clamp(config.alpha * target_back + (1.0 - config.alpha) * state.sf_back, 0.0, 1.0);
  return {state.sf_front, state.sf_back};
}

JointCommandFrame apply_roc(const JointCommandFrame& frame,
                            const std::array<lcpg::MotorMap, kLegCount>& motor,
                            const RollOutput& roll, ShuntingGains gains,
                            const JointLimits& limits) {
  JointCommandFrame out = frame;
  for (auto leg : kAllLegs) {
    const auto& map = motor[index(leg)];
    Joint3& q = out[leg];
    if (!is_front(leg) && roll.gate_active) {
      q = map.bias();
      continue;
    }
    const double gain = is_front(leg) ? gains.front : gains.back;
    if (gain != 1.0) q.bc = map.b_bc + (q.bc - map.b_bc) * gain;
  }
  out[LegId::L1].cf += roll.d_cf_l1;
  out[LegId::L1].ft += roll.d_ft_l1;
  out[LegId::R1].cf += roll.d_cf_r1;
  out[LegId::R1].ft += roll.d_ft_r1;
  for (auto& q : out.legs) {
    for (std::size_t k = 0; k < 3; ++k) q[k] = std::clamp(q[k], limits.lo[k], limits.hi[k]);
  }
  return out;
}

OrientationController::OrientationController(RollControlConfig roll, PitchControlConfig pitch)
    : roll_(roll), pitch_(pitch) {
  roll_.validate();
  pitch_.validate();
}

OrientationController::Tick OrientationController::update(double imu_roll_deg, double imu_pitch_deg) {
  Tick tick;
  tick.errors = compute_errors(imu_roll_deg, imu_pitch_deg, roll_, pitch_);
  tick.roll = roll_modulation(tick.errors.roll_deg, roll_);
  tick.gains = step_pitch_control(tick.errors.pitch_deg, state_, pitch_);
  state_.roll_inhibit_active = tick.roll.gate_active;
  state_.m_left = tick.roll.m_left;
  state_.m_right = tick.roll.m_right;
  return tick;
}

}  // namespace beetle::roc

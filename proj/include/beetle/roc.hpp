#pragma once

#include <stdexcept>

#include "beetle/lcpg.hpp"
#include "beetle/legs.hpp"

namespace beetle::roc {

class SensorFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RollControlConfig {
  double reference_deg = 0.0;
  double relu_bias_deg = 10.0;
  double gate_threshold_deg = 10.0;  // |e_phi| above this freezes middle and hind legs
  double k_cf = 0.02;  // rad per degree
  double k_ft = 0.02;

  void validate() const;
};

struct PitchControlConfig {
  double reference_deg = 0.0;  // overwritten with the initial standing pitch at trial start
  double slope_deg = 10.0;     // delta
  double alpha = 0.1;          // recurrent smoothing weight

  void validate() const;
};

struct Errors {
  double roll_deg = 0.0;   // e_phi = phi_r - phi_f
  double pitch_deg = 0.0;  // e_theta = theta_r - theta_f
};

Errors compute_errors(double imu_roll_deg, double imu_pitch_deg, const RollControlConfig& roll,
                      const PitchControlConfig& pitch);

struct RollOutput {
  double m_left = 0.0;
  double m_right = 0.0;
  double d_cf_l1 = 0.0, d_ft_l1 = 0.0;
  double d_cf_r1 = 0.0, d_ft_r1 = 0.0;
  bool gate_active = false;
};

/// ReLU pathway to the front legs: m_L = max(0, -e - b), m_R = max(0, e - b).
RollOutput roll_modulation(double e_roll_deg, const RollControlConfig& config);

/// Absolute-value pathway: true when |e_phi| exceeds the gate threshold.
bool roll_inhibition_gate(double e_roll_deg, const RollControlConfig& config);

struct RocState {
  double sf_front = 1.0;
  double sf_back = 1.0;
  bool roll_inhibit_active = false;
  double m_left = 0.0;
  double m_right = 0.0;
};

struct ShuntingGains {
  double front = 1.0;
  double back = 1.0;
};

// sf_F(t) = clamp01(alpha * min(e/delta + 1, 1) + (1 - alpha) * sf_F(t-1)),
// sf_B likewise with -e.
ShuntingGains step_pitch_control(double e_pitch_deg, RocState& state,
                                 const PitchControlConfig& config);

/// Scales BC deviation from bias by the shunting gains, adds roll deltas to
/// L1/R1 CF and FT, freezes middle/hind legs at bias while gated, then clamps.
JointCommandFrame apply_roc(const JointCommandFrame& frame,
                            const std::array<lcpg::MotorMap, kLegCount>& motor,
                            const RollOutput& roll, ShuntingGains gains,
                            const JointLimits& limits);

// Per-tick controller combining the roll and pitch pathways.
class OrientationController {
 public:
  OrientationController(RollControlConfig roll, PitchControlConfig pitch);

  struct Tick {
    Errors errors;
    RollOutput roll;
    ShuntingGains gains;
  };

  Tick update(double imu_roll_deg, double imu_pitch_deg);
  const RocState& state() const { return state_; }
  PitchControlConfig& pitch_config() { return pitch_; }

 private:
  RollControlConfig roll_;
  PitchControlConfig pitch_;
  RocState state_;
};

}  // namespace beetle::roc

#pragma once

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "beetle/legs.hpp"
#include "beetle/neuro.hpp"

namespace beetle::lcpg {

class OscillatorDeathFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-neuron tanh oscillator. The recurrent matrix is gain * R(rotation),
// with rotation tuned so that the free-running limit cycle repeats after
// exactly period_ticks control steps.
struct CpgConfig {
  int period_ticks = 140;
  int activation_delay = 70;  // group {L1, R2, L3} starts this many ticks late
  int hind_middle_offset = 3;  // middle leg starts this many ticks after its diagonal hind leg
  double gain = 1.01;
  double rotation = 0.0;  // rad/tick, filled by make_cpg_config
  std::array<double, 2> initial_activation{0.0, 0.0};
  double amplitude = 0.0;  // peak |o1| on the limit cycle

  neuro::NetworkSpec oscillator_spec() const;
  neuro::NetworkState initial_state() const;
};

/// Tunes rotation for the requested period and places the initial state on
/// the limit cycle at the phase where o1 peaks. Results are memoised.
CpgConfig make_cpg_config(int period_ticks, int activation_delay = -1, double gain = 1.01);

/// Mean rotation per tick (cycles) of the oscillator after warm-up; used for tuning and tests.
double measure_cycles_per_tick(double gain, double rotation, int warmup, int ticks);

struct CpgOutput {
  double o1 = 0.0;
  double o2 = 0.0;
};

// Advances the oscillator one tick. Tracks how long the output stayed near
// zero and throws OscillatorDeathFault after a full silent period.
class Cpg {
 public:
  explicit Cpg(const CpgConfig& config);
  Cpg(const CpgConfig& config, neuro::NetworkState state);

  CpgOutput output() const { return {state_.outputs[0], state_.outputs[1]}; }
  CpgOutput step();
  const neuro::NetworkState& state() const { return state_; }

 private:
  neuro::NetworkSpec spec_;
  neuro::NetworkState state_;
  int period_ = 140;
  int silent_ticks_ = 0;
};

CpgOutput step_cpg(const CpgConfig& config, neuro::NetworkState& state);

// Pattern formation network. PC1 and PC2 are step neurons on o1: PC1 marks the
// long stance sweep (duty_factor of the cycle), PC2 marks the load-bearing
// window (half the cycle, centred in the sweep). The remaining stage converts
// oscillator phase into a sawtooth horizontal sweep and a lift profile.
struct PfnConfig {
  double duty_factor = 0.6;
  double stance_threshold = 0.0;  // PC1
  double load_threshold = 0.0;    // PC2
  double amplitude = 1.0;         // oscillator peak used to normalise the lift profile
  double lift_floor = 0.2;        // minimum normalised lift while unloaded
  int direction = 0;              // 0 forward (middle/hind), 1 backward (front)
};

/// Derives the PC thresholds from one limit-cycle period of the oscillator.
PfnConfig make_pfn_config(const CpgConfig& cpg, double duty_factor, int direction);

struct PfnOutput {
  double horizontal = 0.0;  // p11, drives BC
  double lift = 0.0;        // p12, drives CF/FT
  bool sweep_stance = false;  // PC1
  bool loaded = false;        // PC2
};

PfnOutput step_pfn(const PfnConfig& config, CpgOutput cpg_out);

struct MotorMap {
  double w_bc = 0.0, w_cf = 0.0, w_ft = 0.0;
  double b_bc = 0.0, b_cf = 0.0, b_ft = 0.0;

  Joint3 bias() const { return {b_bc, b_cf, b_ft}; }
};

struct MotorOutput {
  Joint3 command;
  std::array<bool, 3> saturated{false, false, false};
  bool any_saturated() const { return saturated[0] || saturated[1] || saturated[2]; }
};

MotorOutput motor_commands(const MotorMap& map, const PfnOutput& pfn, const JointLimits& limits);

struct BankConfig {
  CpgConfig cpg;
  double duty_factor = 0.6;
  double lift_floor = 0.2;
  std::array<MotorMap, kLegCount> motor{};
  JointLimits limits;
};

/// Tick at which the given leg's oscillator starts.
int activation_tick(const CpgConfig& cpg, LegId leg);

struct BankTick {
  JointCommandFrame frame;
  std::array<PfnOutput, kLegCount> pfn{};
  std::array<bool, kLegCount> active{};
  std::array<bool, kLegCount> commanded_stance{};
  int saturation_events = 0;
};

// Six independent LCPGs. Group {R1, L2, R3} starts at tick 0 and group
// {L1, R2, L3} after activation_delay; front legs run the PFN backwards.
class LcpgBank {
 public:
  explicit LcpgBank(BankConfig config);

  /// Produces commands for the current tick and advances to the next one.
  BankTick step();
  long tick() const { return tick_; }
  const BankConfig& config() const { return config_; }
  const PfnConfig& pfn_config(LegId leg) const { return pfn_[index(leg)]; }

 private:
  BankConfig config_;
  std::array<PfnConfig, kLegCount> pfn_{};
  std::vector<Cpg> cpg_;
  std::array<bool, kLegCount> started_{};
  long tick_ = 0;
};

}  // namespace beetle::lcpg

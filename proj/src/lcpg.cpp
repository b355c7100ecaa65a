#include "beetle/lcpg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace beetle::lcpg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - std::numbers::pi;
}

// Phase increases along the limit cycle; zero where o1 peaks.
double oscillator_phase(CpgOutput o) { return std::atan2(-o.o2, o.o1); }

neuro::NetworkSpec make_oscillator(double gain, double rotation) {
  auto spec = neuro::NetworkSpec::with_size(2, neuro::Tanh{});
  spec.weight(0, 0) = gain * std::cos(rotation);
  spec.weight(0, 1) = gain * std::sin(rotation);
  spec.weight(1, 0) = -gain * std::sin(rotation);
  spec.weight(1, 1) = gain * std::cos(rotation);
  spec.output_indices = {0, 1};
  return spec;
}

std::vector<CpgOutput> sample_cycle(const CpgConfig& cpg) {
  const auto spec = cpg.oscillator_spec();
  auto state = cpg.initial_state();
  std::vector<CpgOutput> samples;
  samples.reserve(static_cast<std::size_t>(cpg.period_ticks));
  for (int t = 0; t < cpg.period_ticks; ++t) {
    samples.push_back({state.outputs[0], state.outputs[1]});
    neuro::step_network_inplace(spec, state);
  }
  return samples;
}

// Threshold such that exactly `count_above` samples are >= it.
double threshold_for_count(std::vector<double> values, int count_above) {
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  count_above = std::clamp(count_above, 1, n - 1);
  const int k = n - count_above;
  return 0.5 * (values[static_cast<std::size_t>(k - 1)] + values[static_cast<std::size_t>(k)]);
}

}  // namespace

neuro::NetworkSpec CpgConfig::oscillator_spec() const { return make_oscillator(gain, rotation); }

neuro::NetworkState CpgConfig::initial_state() const {
  const auto spec = oscillator_spec();
  return neuro::NetworkState::from_activations(spec, {initial_activation[0], initial_activation[1]});
}

double measure_cycles_per_tick(double gain, double rotation, int warmup, int ticks) {
  const auto spec = make_oscillator(gain, rotation);
  auto state = neuro::NetworkState::from_activations(spec, {0.1, 0.0});
  for (int t = 0; t < warmup; ++t) neuro::step_network_inplace(spec, state);
  double total = 0.0;
  double prev = oscillator_phase({state.outputs[0], state.outputs[1]});
  for (int t = 0; t < ticks; ++t) {
    neuro::step_network_inplace(spec, state);
    const double now = oscillator_phase({state.outputs[0], state.outputs[1]});
    total += wrap_angle(now - prev);
    prev = now;
  }
  return total / (kTwoPi * ticks);
}

CpgConfig make_cpg_config(int period_ticks, int activation_delay, double gain) {
  if (period_ticks < 8) throw neuro::ConfigurationError("period_ticks must be >= 8");
  if (!(gain > 1.0)) throw neuro::ConfigurationError("oscillator gain must exceed 1");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, CpgConfig> cache;
  CpgConfig config;
  {
    std::scoped_lock lock(mutex);
    if (auto it = cache.find({period_ticks, gain}); it != cache.end()) config = it->second;
  }
  if (config.rotation == 0.0) {
    const double target = 1.0 / period_ticks;
    double lo = 0.5 * kTwoPi * target;
    double hi = 1.5 * kTwoPi * target;
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (measure_cycles_per_tick(gain, mid, 2000, 20 * period_ticks * 10) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    config.period_ticks = period_ticks;
    config.gain = gain;
    config.rotation = 0.5 * (lo + hi);

    // Settle onto the limit cycle, then stop at the tick nearest zero phase.
    const auto spec = make_oscillator(gain, config.rotation);
    auto state = neuro::NetworkState::from_activations(spec, {0.1, 0.0});
    for (int t = 0; t < 5000; ++t) neuro::step_network_inplace(spec, state);
    auto best = state;
    double best_abs = 10.0;
    double amplitude = 0.0;
    for (int t = 0; t < period_ticks; ++t) {
      const double ph = std::abs(oscillator_phase({state.outputs[0], state.outputs[1]}));
      amplitude = std::max(amplitude, std::abs(state.outputs[0]));
      if (ph < best_abs) {
        best_abs = ph;
        best = state;
      }
      neuro::step_network_inplace(spec, state);
    }
    config.initial_activation = {best.activations[0], best.activations[1]};
    config.amplitude = amplitude;
    std::scoped_lock lock(mutex);
    cache.emplace(std::pair{period_ticks, gain}, config);
  }
  config.activation_delay = activation_delay >= 0 ? activation_delay : period_ticks / 2;
  return config;
}

Cpg::Cpg(const CpgConfig& config) : Cpg(config, config.initial_state()) {}

Cpg::Cpg(const CpgConfig& config, neuro::NetworkState state)
    : spec_(config.oscillator_spec()), state_(std::move(state)), period_(config.period_ticks) {}

CpgOutput Cpg::step() {
  neuro::step_network_inplace(spec_, state_);
  const CpgOutput out = output();
  if (std::abs(out.o1) < 1e-6 && std::abs(out.o2) < 1e-6) {
    if (++silent_ticks_ >= period_) {
      throw OscillatorDeathFault("oscillator output stayed at zero for a full period (tick " +
                                 std::to_string(state_.tick) + ")");
    }
  } else {
    silent_ticks_ = 0;
  }
  return out;
}

CpgOutput step_cpg(const CpgConfig& config, neuro::NetworkState& state) {
  Cpg cpg(config, std::move(state));
  const auto out = cpg.step();
  state = cpg.state();
  return out;
}

PfnConfig make_pfn_config(const CpgConfig& cpg, double duty_factor, int direction) {
  if (!(duty_factor > 0.5 && duty_factor < 1.0)) {
    throw neuro::ConfigurationError("duty factor must lie in (0.5, 1)");
  }
  const auto samples = sample_cycle(cpg);
  std::vector<double> o1;
  o1.reserve(samples.size());
  for (const auto& s : samples) o1.push_back(s.o1);
  PfnConfig pfn;
  pfn.duty_factor = duty_factor;
  pfn.stance_threshold =
      threshold_for_count(o1, static_cast<int>(std::lround(duty_factor * cpg.period_ticks)));
  pfn.load_threshold = threshold_for_count(o1, cpg.period_ticks / 2);
  pfn.amplitude = *std::max_element(o1.begin(), o1.end());
  pfn.direction = direction;
  return pfn;
}

PfnOutput step_pfn(const PfnConfig& config, CpgOutput cpg_out) {
  using neuro::apply_transfer;
  PfnOutput out;
  out.sweep_stance = apply_transfer(neuro::Step{config.stance_threshold}, cpg_out.o1) > 0.5;
  out.loaded = apply_transfer(neuro::Step{config.load_threshold}, cpg_out.o1) > 0.5;

  const double phase = oscillator_phase(cpg_out);  // (-pi, pi]
  const double half_stance = std::numbers::pi * config.duty_factor;
  double h = 0.0;
  if (out.sweep_stance) {
    h = -phase / half_stance;
  } else {
    const double p = phase < 0 ? phase + kTwoPi : phase;
    h = -1.0 + 2.0 * (p - half_stance) / (kTwoPi - 2.0 * half_stance);
  }
  h = apply_transfer(neuro::PiecewiseLinear{-1.0, 1.0}, h);
  out.horizontal = config.direction == 1 ? -h : h;

  if (!out.loaded) {
    const double depth = std::min(1.0, apply_transfer(neuro::Rectifier{0.0}, -cpg_out.o1) / config.amplitude);
    out.lift = config.lift_floor + (1.0 - config.lift_floor) * depth;
  }
  return out;
}

MotorOutput motor_commands(const MotorMap& map, const PfnOutput& pfn, const JointLimits& limits) {
  const Joint3 raw{map.w_bc * pfn.horizontal + map.b_bc, map.w_cf * pfn.lift + map.b_cf,
                   map.w_ft * pfn.lift + map.b_ft};
  MotorOutput out;
  for (std::size_t k = 0; k < 3; ++k) {
    out.command[k] = neuro::apply_transfer(neuro::PiecewiseLinear{limits.lo[k], limits.hi[k]}, raw[k]);
    out.saturated[k] = out.command[k] != raw[k];
  }
  return out;
}

int activation_tick(const CpgConfig& cpg, LegId leg) {
  const bool group_a = leg == LegId::R1 || leg == LegId::L2 || leg == LegId::R3;
  const int base = group_a ? 0 : cpg.activation_delay;
  return base + (is_middle(leg) ? cpg.hind_middle_offset : 0);
}

LcpgBank::LcpgBank(BankConfig config) : config_(std::move(config)) {
  cpg_.reserve(kLegCount);
  for (auto leg : kAllLegs) {
    pfn_[index(leg)] = make_pfn_config(config_.cpg, config_.duty_factor, is_front(leg) ? 1 : 0);
    pfn_[index(leg)].lift_floor = config_.lift_floor;
    cpg_.emplace_back(config_.cpg);
  }
}

BankTick LcpgBank::step() {
  BankTick out;
  for (auto leg : kAllLegs) {
    const auto i = index(leg);
    const auto& map = config_.motor[i];
    if (tick_ < activation_tick(config_.cpg, leg)) {
      out.frame.legs[i] = map.bias();
      out.pfn[i].loaded = true;
      out.commanded_stance[i] = true;
      continue;
    }
    CpgOutput osc;
    if (!started_[i]) {
      started_[i] = true;
      osc = cpg_[i].output();
    } else {
      osc = cpg_[i].step();
    }
    out.active[i] = true;
    out.pfn[i] = step_pfn(pfn_[i], osc);
    out.commanded_stance[i] = out.pfn[i].loaded;
    const auto motor = motor_commands(map, out.pfn[i], config_.limits);
    out.frame.legs[i] = motor.command;
    if (motor.any_saturated()) ++out.saturation_events;
  }
  ++tick_;
  return out;
}

}  // namespace beetle::lcpg

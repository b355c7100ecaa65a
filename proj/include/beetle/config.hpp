#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beetle/body.hpp"
#include "beetle/lcpg.hpp"
#include "beetle/roc.hpp"
#include "beetle/sim.hpp"
#include "beetle/terrain.hpp"

namespace beetle::config {

inline constexpr int kScenarioSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(const std::string& msg, int line, int column)
      : ConfigError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnknownKeyError : public ConfigError {
 public:
  explicit UnknownKeyError(const std::string& key)
      : ConfigError("unknown configuration key '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class OutOfRangeError : public ConfigError {
 public:
  OutOfRangeError(const std::string& key, const std::string& value, const std::string& allowed)
      : ConfigError("value " + value + " for '" + key + "' out of range " + allowed), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Controller { Lcpg, LcpgRoc };

struct TerrainConfig {
  sim::TerrainKind kind = sim::TerrainKind::Flat;
  double roughness_ratio = 0.2;
  std::uint64_t seed_offset = 1000;  // uneven heightfield seed = trial seed + offset
  double mu_ground = 0.5;
  double resolution = 0.05;
  double feature_size = 2.0;
  double half_extent = 15.0;
  sim::WallSpec wall;
  double approach_deg = 30.0;  // initial heading relative to the wall direction
};

struct MotorConfig {
  lcpg::MotorMap front{0.45, -0.25, 0.0, 0.0, -0.2, 1.2};
  lcpg::MotorMap middle{0.09, -0.25, 0.0, 0.0, -0.2, 1.2};
  lcpg::MotorMap hind{0.45, -0.25, 0.0, 0.0, -0.2, 1.2};

  const lcpg::MotorMap& for_leg(LegId leg) const;
};

struct AnalysisConfig {
  long warmup_ticks = 280;
  double stance_force_threshold = 0.05;  // N
  int stance_debounce_ticks = 2;
  bool froude_sqrt = false;     // v / sqrt(gL) instead of v^2 / (gL)
  bool cot_include_ball = true;
  double rule1_tolerance = 0.3;  // rad
  double rule23_min_correlation = 0.8;
  double rule4_min_fraction = 0.8;
  double pitch_active_below = 0.99;
};

struct FailureConfig {
  double stall_window_s = 10.0;
  double stall_distance_m = 0.1;
  double pitch_error_deg = 5.0;
  double slip_window_s = 1.0;
  double slip_fraction = 0.5;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Controller controller = Controller::LcpgRoc;
  double duration_s = 60.0;
  double target_m = 3.0;
  std::uint64_t seed = 1;
  TerrainConfig terrain;
  sim::BallSpec ball = sim::make_ball(sim::BallType::Soft);
  sim::LegSetup leg_setup = sim::make_leg_setup(sim::LegSetupPreset::NL);
  int period_ticks = 140;
  int activation_delay = 70;
  int hind_middle_offset = 3;
  double cpg_gain = 1.01;
  double duty_factor = 0.6;
  double lift_floor = 0.2;
  MotorConfig motor;
  roc::RollControlConfig roll;
  roc::PitchControlConfig pitch;
  body::RobotGeometry geometry;
  sim::SimParams sim;
  FailureConfig failure;
  AnalysisConfig analysis;
};

// One entry per configuration value, addressed by dotted path.
struct FieldDef {
  std::string path;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;  // throws OutOfRangeError
};

/// All fields in canonical order. Preset selectors come first.
const std::vector<FieldDef>& field_table();

/// Flattened (path, value) pairs of every field.
std::vector<std::pair<std::string, std::string>> flatten(const ScenarioConfig& config);
ScenarioConfig from_flat(const std::vector<std::pair<std::string, std::string>>& values);

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
/// Overlays the keys of `text` on `base`; presets in the overlay reset their dependent fields.
ScenarioConfig apply_overrides(const ScenarioConfig& base, const std::string& text);

/// Canonical YAML with every field written; parse_scenario(emit_scenario(c)) == c.
std::string emit_scenario(const ScenarioConfig& config);
std::uint64_t fingerprint(const ScenarioConfig& config);
std::string fingerprint_hex(const ScenarioConfig& config);

std::string format_double(double v);
std::uint64_t fnv1a64(std::string_view data);

struct MatrixCell {
  std::string name;
  ScenarioConfig config;
};

struct Matrix {
  std::vector<MatrixCell> cells;
};

/// `base:` scenario plus `cells:` list of named overlays.
Matrix parse_matrix(const std::string& text);
Matrix load_matrix(const std::filesystem::path& path);

std::string to_string(Controller c);
std::string to_string(sim::TerrainKind k);
std::string to_string(sim::BallType t);
std::string to_string(sim::LegSetupPreset p);

}  // namespace beetle::config

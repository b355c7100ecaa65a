#include "beetle/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace beetle::config {

namespace {

struct BadValue : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double parse_real(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) throw BadValue("expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw BadValue("expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue("expected true or false, got '" + s + "'");
}

std::string range_text(double lo, double hi) {
  return "[" + format_double(lo) + ", " + format_double(hi) + "]";
}

template <class Acc>
FieldDef real(std::string path, Acc acc, double lo, double hi) {
  return {path, [acc](const ScenarioConfig& c) { return format_double(acc(c)); },
          [acc, path, lo, hi](ScenarioConfig& c, const std::string& s) {
            const double v = parse_real(s);
            if (v < lo || v > hi) throw OutOfRangeError(path, s, range_text(lo, hi));
            acc(c) = v;
          }};
}

// Strictly positive real.
template <class Acc>
FieldDef positive(std::string path, Acc acc, double hi = 1e9) {
  return {path, [acc](const ScenarioConfig& c) { return format_double(acc(c)); },
          [acc, path, hi](ScenarioConfig& c, const std::string& s) {
            const double v = parse_real(s);
            if (!(v > 0.0) || v > hi) throw OutOfRangeError(path, s, "(0, " + format_double(hi) + "]");
            acc(c) = v;
          }};
}

template <class Acc>
FieldDef integer(std::string path, Acc acc, long long lo, long long hi) {
  return {path, [acc](const ScenarioConfig& c) { return std::to_string(acc(c)); },
          [acc, path, lo, hi](ScenarioConfig& c, const std::string& s) {
            const long long v = parse_int(s);
            if (v < lo || v > hi) {
              throw OutOfRangeError(path, s, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            acc(c) = static_cast<std::remove_reference_t<decltype(acc(c))>>(v);
          }};
}

template <class Acc>
FieldDef unsigned64(std::string path, Acc acc) {
  return {path, [acc](const ScenarioConfig& c) { return std::to_string(acc(c)); },
          [acc, path](ScenarioConfig& c, const std::string& s) {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec == std::errc::result_out_of_range) throw OutOfRangeError(path, s, "[0, 2^64)");
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
              throw BadValue("expected a non-negative integer, got '" + s + "'");
            }
            acc(c) = v;
          }};
}

template <class Acc>
FieldDef boolean(std::string path, Acc acc) {
  return {path, [acc](const ScenarioConfig& c) { return std::string(acc(c) ? "true" : "false"); },
          [acc](ScenarioConfig& c, const std::string& s) { acc(c) = parse_bool(s); }};
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

template <class E, std::size_t N>
E enum_from(const std::string& path, const std::string& s, const std::array<EnumName<E>, N>& names) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  std::string allowed;
  for (const auto& n : names) {
    if (lower == n.name) return n.value;
    allowed += (allowed.empty() ? "" : ", ") + std::string(n.name);
  }
  throw OutOfRangeError(path, s, "{" + allowed + "}");
}

template <class E, std::size_t N>
std::string enum_to(E v, const std::array<EnumName<E>, N>& names) {
  for (const auto& n : names) {
    if (n.value == v) return n.name;
  }
  return "?";
}

constexpr std::array<EnumName<Controller>, 2> kControllers{{{Controller::Lcpg, "lcpg"},
                                                            {Controller::LcpgRoc, "lcpg_roc"}}};
constexpr std::array<EnumName<sim::TerrainKind>, 3> kTerrains{
    {{sim::TerrainKind::Flat, "flat"}, {sim::TerrainKind::Uneven, "uneven"}, {sim::TerrainKind::Wall, "wall"}}};
constexpr std::array<EnumName<sim::BallType>, 2> kBalls{{{sim::BallType::Soft, "soft"},
                                                         {sim::BallType::Rigid, "rigid"}}};
constexpr std::array<EnumName<sim::LegSetupPreset>, 3> kLegSetups{{{sim::LegSetupPreset::NL, "nl"},
                                                                  {sim::LegSetupPreset::FL, "fl"},
                                                                  {sim::LegSetupPreset::FL_SM, "fl_sm"}}};

void motor_fields(std::vector<FieldDef>& t, const std::string& group, lcpg::MotorMap MotorConfig::*member) {
  const std::string p = "motor." + group + ".";
  auto map = [member](auto& c) -> auto& { return c.motor.*member; };
  t.push_back(real(p + "w_bc", [map](auto& c) -> auto& { return map(c).w_bc; }, -3, 3));
  t.push_back(real(p + "w_cf", [map](auto& c) -> auto& { return map(c).w_cf; }, -3, 3));
  t.push_back(real(p + "w_ft", [map](auto& c) -> auto& { return map(c).w_ft; }, -3, 3));
  t.push_back(real(p + "b_bc", [map](auto& c) -> auto& { return map(c).b_bc; }, -3, 3));
  t.push_back(real(p + "b_cf", [map](auto& c) -> auto& { return map(c).b_cf; }, -3, 3));
  t.push_back(real(p + "b_ft", [map](auto& c) -> auto& { return map(c).b_ft; }, -3, 3));
}

std::vector<FieldDef> build_table() {
  std::vector<FieldDef> t;
  // Preset selectors first: setting them resets their dependent fields.
  t.push_back({"ball.type", [](const ScenarioConfig& c) { return enum_to(c.ball.type, kBalls); },
               [](ScenarioConfig& c, const std::string& s) { c.ball = sim::make_ball(enum_from("ball.type", s, kBalls)); }});
  t.push_back({"leg_setup.preset",
               [](const ScenarioConfig& c) { return enum_to(c.leg_setup.preset, kLegSetups); },
               [](ScenarioConfig& c, const std::string& s) {
                 c.leg_setup = sim::make_leg_setup(enum_from("leg_setup.preset", s, kLegSetups));
               }});
  t.push_back({"terrain.kind", [](const ScenarioConfig& c) { return enum_to(c.terrain.kind, kTerrains); },
               [](ScenarioConfig& c, const std::string& s) { c.terrain.kind = enum_from("terrain.kind", s, kTerrains); }});
  t.push_back({"name", [](const ScenarioConfig& c) { return c.name; },
               [](ScenarioConfig& c, const std::string& s) { c.name = s; }});
  t.push_back({"controller", [](const ScenarioConfig& c) { return enum_to(c.controller, kControllers); },
               [](ScenarioConfig& c, const std::string& s) { c.controller = enum_from("controller", s, kControllers); }});
  t.push_back(real("duration_s", [](auto& c) -> auto& { return c.duration_s; }, 0.0, 3600.0));
  t.push_back(real("target_m", [](auto& c) -> auto& { return c.target_m; }, 0.0, 1000.0));
  t.push_back(unsigned64("seed", [](auto& c) -> auto& { return c.seed; }));

  t.push_back(real("terrain.roughness_ratio", [](auto& c) -> auto& { return c.terrain.roughness_ratio; }, 0.0, 2.0));
  t.push_back(unsigned64("terrain.seed_offset", [](auto& c) -> auto& { return c.terrain.seed_offset; }));
  t.push_back(real("terrain.mu_ground", [](auto& c) -> auto& { return c.terrain.mu_ground; }, 0.0, 5.0));
  t.push_back(positive("terrain.resolution", [](auto& c) -> auto& { return c.terrain.resolution; }, 1.0));
  t.push_back(positive("terrain.feature_size", [](auto& c) -> auto& { return c.terrain.feature_size; }, 100.0));
  t.push_back(positive("terrain.half_extent", [](auto& c) -> auto& { return c.terrain.half_extent; }, 1000.0));
  t.push_back(real("terrain.wall.point_x", [](auto& c) -> auto& { return c.terrain.wall.point_x; }, -1e3, 1e3));
  t.push_back(real("terrain.wall.point_y", [](auto& c) -> auto& { return c.terrain.wall.point_y; }, -1e3, 1e3));
  t.push_back(real("terrain.wall.direction_deg", [](auto& c) -> auto& { return c.terrain.wall.direction_deg; }, -360, 360));
  t.push_back(real("terrain.approach_deg", [](auto& c) -> auto& { return c.terrain.approach_deg; }, -90, 90));

  t.push_back(positive("ball.diameter", [](auto& c) -> auto& { return c.ball.diameter; }, 10.0));
  t.push_back(positive("ball.mass", [](auto& c) -> auto& { return c.ball.mass; }, 1000.0));
  t.push_back(positive("ball.mu_leg", [](auto& c) -> auto& { return c.ball.mu_leg; }, 5.0));
  t.push_back(real("ball.rolling_resistance", [](auto& c) -> auto& { return c.ball.rolling_resistance; }, 0.0, 1.0));
  t.push_back(real("ball.deformation_damping", [](auto& c) -> auto& { return c.ball.deformation_damping; }, 0.0, 1e4));
  t.push_back(positive("ball.wall_stiffness", [](auto& c) -> auto& { return c.ball.wall_stiffness; }, 1e7));
  t.push_back(real("ball.inertia_factor", [](auto& c) -> auto& { return c.ball.inertia_factor; }, 0.0, 1.0));
  t.push_back(real("ball.disturbance_transfer", [](auto& c) -> auto& { return c.ball.disturbance_transfer; }, 0.0, 5.0));

  t.push_back(real("leg_setup.front_ground_multiplier",
                   [](auto& c) -> auto& { return c.leg_setup.front_ground_multiplier; }, 0.1, 10.0));
  t.push_back(real("leg_setup.front_lateral_support",
                   [](auto& c) -> auto& { return c.leg_setup.front_lateral_support; }, 0.0, 100.0));
  t.push_back(real("leg_setup.hind_ball_multiplier",
                   [](auto& c) -> auto& { return c.leg_setup.hind_ball_multiplier; }, 0.1, 10.0));

  t.push_back(integer("cpg.period_ticks", [](auto& c) -> auto& { return c.period_ticks; }, 8, 100000));
  t.push_back(integer("cpg.activation_delay", [](auto& c) -> auto& { return c.activation_delay; }, 0, 100000));
  t.push_back(integer("cpg.hind_middle_offset", [](auto& c) -> auto& { return c.hind_middle_offset; }, 0, 100000));
  t.push_back(real("cpg.gain", [](auto& c) -> auto& { return c.cpg_gain; }, 1.0001, 1.5));
  t.push_back(real("pfn.duty_factor", [](auto& c) -> auto& { return c.duty_factor; }, 0.51, 0.95));
  t.push_back(real("pfn.lift_floor", [](auto& c) -> auto& { return c.lift_floor; }, 0.0, 1.0));

  motor_fields(t, "front", &MotorConfig::front);
  motor_fields(t, "middle", &MotorConfig::middle);
  motor_fields(t, "hind", &MotorConfig::hind);

  t.push_back(real("roc.roll.reference_deg", [](auto& c) -> auto& { return c.roll.reference_deg; }, -90, 90));
  t.push_back(real("roc.roll.relu_bias_deg", [](auto& c) -> auto& { return c.roll.relu_bias_deg; }, 0, 90));
  t.push_back(real("roc.roll.gate_threshold_deg", [](auto& c) -> auto& { return c.roll.gate_threshold_deg; }, 0, 90));
  t.push_back(real("roc.roll.k_cf", [](auto& c) -> auto& { return c.roll.k_cf; }, -1, 1));
  t.push_back(real("roc.roll.k_ft", [](auto& c) -> auto& { return c.roll.k_ft; }, -1, 1));
  t.push_back(positive("roc.pitch.slope_deg", [](auto& c) -> auto& { return c.pitch.slope_deg; }, 90));
  t.push_back(real("roc.pitch.alpha", [](auto& c) -> auto& { return c.pitch.alpha; }, 0, 1));

  t.push_back(positive("geometry.body_length", [](auto& c) -> auto& { return c.geometry.body_length; }, 5));
  t.push_back(positive("geometry.body_width", [](auto& c) -> auto& { return c.geometry.body_width; }, 5));
  t.push_back(positive("geometry.coxa", [](auto& c) -> auto& { return c.geometry.coxa; }, 5));
  t.push_back(positive("geometry.femur", [](auto& c) -> auto& { return c.geometry.femur; }, 5));
  t.push_back(positive("geometry.tibia", [](auto& c) -> auto& { return c.geometry.tibia; }, 5));
  t.push_back(positive("geometry.mass", [](auto& c) -> auto& { return c.geometry.mass; }, 1000));
  t.push_back(real("geometry.mount_x_front", [](auto& c) -> auto& { return c.geometry.mount_x_front; }, -5, 5));
  t.push_back(real("geometry.mount_x_hind", [](auto& c) -> auto& { return c.geometry.mount_x_hind; }, -5, 5));
#define BEETLE_LIMIT(side, joint) \
  t.push_back(real("geometry.limits." #side "." #joint, \
                   [](auto& c) -> auto& { return c.geometry.limits.side.joint; }, -3.2, 3.2))
  BEETLE_LIMIT(lo, bc);
  BEETLE_LIMIT(hi, bc);
  BEETLE_LIMIT(lo, cf);
  BEETLE_LIMIT(hi, cf);
  BEETLE_LIMIT(lo, ft);
  BEETLE_LIMIT(hi, ft);
#undef BEETLE_LIMIT

#define BEETLE_SIM_REAL(field, lo, hi) \
  t.push_back(real("sim." #field, [](auto& c) -> auto& { return c.sim.field; }, lo, hi))
#define BEETLE_SIM_POS(field, hi) \
  t.push_back(positive("sim." #field, [](auto& c) -> auto& { return c.sim.field; }, hi))
  BEETLE_SIM_POS(dt, 1.0);
  BEETLE_SIM_POS(servo_rate, 1000.0);
  BEETLE_SIM_REAL(contact_tolerance, 0.0, 0.1);
  t.push_back(positive("sim.load_weight.front", [](auto& c) -> auto& { return c.sim.load_weight[0]; }, 100));
  t.push_back(positive("sim.load_weight.middle", [](auto& c) -> auto& { return c.sim.load_weight[1]; }, 100));
  t.push_back(positive("sim.load_weight.hind", [](auto& c) -> auto& { return c.sim.load_weight[2]; }, 100));
  BEETLE_SIM_REAL(extension_load_gain, 0.0, 100.0);
  BEETLE_SIM_REAL(roll_load_shift, 0.0, 10.0);
  BEETLE_SIM_POS(coupling, 1e6);
  BEETLE_SIM_REAL(lean_push, 0.0, 10.0);
  BEETLE_SIM_REAL(gap_restore, 0.0, 100.0);
  BEETLE_SIM_POS(middle_contact_height, 1.0);
  BEETLE_SIM_REAL(lateral_damping, 0.0, 1e6);
  BEETLE_SIM_REAL(heading_follow, 0.0, 100.0);
  BEETLE_SIM_POS(gap_limit, 10.0);
  BEETLE_SIM_REAL(pitch_rest_deg, -90.0, 90.0);
  BEETLE_SIM_REAL(pitch_per_gap, -1e4, 1e4);
  BEETLE_SIM_POS(pitch_lag, 100.0);
  BEETLE_SIM_REAL(roll_lag, 1e-3, 100.0);
  BEETLE_SIM_REAL(roll_com_height, 0.0, 10.0);
  BEETLE_SIM_REAL(roll_tip_gain, 0.0, 1e4);
  BEETLE_SIM_POS(roll_relax, 1e4);
  BEETLE_SIM_REAL(front_support_efficiency, 0.0, 100.0);
  BEETLE_SIM_REAL(terrain_roll_gain, 0.0, 100.0);
  BEETLE_SIM_REAL(ball_slope_roll_gain, 0.0, 1e4);
  BEETLE_SIM_REAL(wall_roll_gain, 0.0, 100.0);
  BEETLE_SIM_REAL(wall_pitch_gain, 0.0, 100.0);
  BEETLE_SIM_REAL(wall_moment_arm, 0.0, 10.0);
  BEETLE_SIM_REAL(wall_friction, 0.0, 5.0);
  BEETLE_SIM_REAL(wall_damping, 0.0, 1e6);
  BEETLE_SIM_REAL(floor_noise, 0.0, 1.0);
  BEETLE_SIM_POS(floor_noise_time, 1e4);
  BEETLE_SIM_POS(tip_over_deg, 90.0);
  BEETLE_SIM_REAL(imu_noise_deg, 0.0, 90.0);
  BEETLE_SIM_REAL(initial_gap_jitter, 0.0, 1.0);
#undef BEETLE_SIM_REAL
#undef BEETLE_SIM_POS

  t.push_back(positive("failure.stall_window_s", [](auto& c) -> auto& { return c.failure.stall_window_s; }, 1e4));
  t.push_back(real("failure.stall_distance_m", [](auto& c) -> auto& { return c.failure.stall_distance_m; }, 0, 1e3));
  t.push_back(real("failure.pitch_error_deg", [](auto& c) -> auto& { return c.failure.pitch_error_deg; }, 0, 180));
  t.push_back(positive("failure.slip_window_s", [](auto& c) -> auto& { return c.failure.slip_window_s; }, 1e3));
  t.push_back(real("failure.slip_fraction", [](auto& c) -> auto& { return c.failure.slip_fraction; }, 0, 1));

  t.push_back(integer("analysis.warmup_ticks", [](auto& c) -> auto& { return c.analysis.warmup_ticks; }, 0, 10000000));
  t.push_back(real("analysis.stance_force_threshold",
                   [](auto& c) -> auto& { return c.analysis.stance_force_threshold; }, 0, 1e4));
  t.push_back(integer("analysis.stance_debounce_ticks",
                      [](auto& c) -> auto& { return c.analysis.stance_debounce_ticks; }, 1, 1000));
  t.push_back(boolean("analysis.froude_sqrt", [](auto& c) -> auto& { return c.analysis.froude_sqrt; }));
  t.push_back(boolean("analysis.cot_include_ball", [](auto& c) -> auto& { return c.analysis.cot_include_ball; }));
  t.push_back(real("analysis.rule1_tolerance", [](auto& c) -> auto& { return c.analysis.rule1_tolerance; }, 0, 3.2));
  t.push_back(real("analysis.rule23_min_correlation",
                   [](auto& c) -> auto& { return c.analysis.rule23_min_correlation; }, -1, 1));
  t.push_back(real("analysis.rule4_min_fraction",
                   [](auto& c) -> auto& { return c.analysis.rule4_min_fraction; }, 0, 1));
  t.push_back(real("analysis.pitch_active_below",
                   [](auto& c) -> auto& { return c.analysis.pitch_active_below; }, 0, 1));
  return t;
}

bool is_preset(const std::string& path) {
  return path == "ball.type" || path == "leg_setup.preset" || path == "terrain.kind";
}

void validate(const ScenarioConfig& c) {
  if (c.activation_delay >= c.period_ticks) {
    throw OutOfRangeError("cpg.activation_delay", std::to_string(c.activation_delay),
                          "[0, period_ticks)");
  }
  if (c.hind_middle_offset >= c.period_ticks) {
    throw OutOfRangeError("cpg.hind_middle_offset", std::to_string(c.hind_middle_offset),
                          "[0, period_ticks)");
  }
  const auto& ls = c.leg_setup;
  using P = sim::LegSetupPreset;
  if (ls.preset == P::NL && (ls.front_ground_multiplier != 1.0 || ls.hind_ball_multiplier != 1.0 ||
                             ls.front_lateral_support != 0.0)) {
    throw OutOfRangeError("leg_setup", "nl", "multipliers of 1 and no lateral support");
  }
  if (ls.preset != P::NL && !(ls.front_ground_multiplier > 1.0)) {
    throw OutOfRangeError("leg_setup.front_ground_multiplier", format_double(ls.front_ground_multiplier), "(1, 10]");
  }
  if (ls.preset == P::FL && ls.hind_ball_multiplier != 1.0) {
    throw OutOfRangeError("leg_setup.hind_ball_multiplier", format_double(ls.hind_ball_multiplier), "{1}");
  }
  if (ls.preset == P::FL_SM && !(ls.hind_ball_multiplier > 1.0)) {
    throw OutOfRangeError("leg_setup.hind_ball_multiplier", format_double(ls.hind_ball_multiplier), "(1, 10]");
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(c.geometry.limits.lo[k] < c.geometry.limits.hi[k])) {
      throw OutOfRangeError("geometry.limits", format_double(c.geometry.limits.lo[k]), "lo < hi");
    }
  }
}

const FieldDef* find_field(const std::string& path) {
  for (const auto& f : field_table()) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

// Paths that may be given as a scalar shorthand for a nested key.
const char* shorthand(const std::string& path) {
  if (path == "terrain") return "terrain.kind";
  if (path == "ball") return "ball.type";
  if (path == "leg_setup") return "leg_setup.preset";
  return nullptr;
}

struct Entry {
  std::string path;
  std::string value;
  YAML::Mark mark;
};

[[noreturn]] void parse_error(const std::string& msg, const YAML::Mark& mark) {
  throw ConfigParseError(msg, mark.line + 1, mark.column + 1);
}

void collect(const YAML::Node& node, const std::string& prefix, std::vector<Entry>& out) {
  if (!node.IsMap()) parse_error("expected a mapping" + (prefix.empty() ? "" : " at '" + prefix + "'"), node.Mark());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    const auto& value = kv.second;
    if (prefix.empty() && key == "schema_version") {
      if (!value.IsScalar() || value.Scalar() != std::to_string(kScenarioSchemaVersion)) {
        throw ConfigError("scenario schema_version " + (value.IsScalar() ? value.Scalar() : "?") +
                          " unsupported, expected " + std::to_string(kScenarioSchemaVersion));
      }
      continue;
    }
    if (value.IsMap()) {
      collect(value, path, out);
    } else if (value.IsScalar()) {
      const char* alias = shorthand(path);
      const std::string target = alias ? alias : path;
      if (!find_field(target)) throw UnknownKeyError(path);
      out.push_back({target, value.Scalar(), value.Mark()});
    } else if (value.IsNull()) {
      parse_error("missing value for '" + path + "'", kv.first.Mark());
    } else {
      if (!find_field(path)) throw UnknownKeyError(path);
      parse_error("expected a scalar for '" + path + "'", value.Mark());
    }
  }
}

void apply_entries(ScenarioConfig& config, std::vector<Entry> entries) {
  std::stable_partition(entries.begin(), entries.end(), [](const Entry& e) { return is_preset(e.path); });
  for (const auto& e : entries) {
    try {
      find_field(e.path)->set(config, e.value);
    } catch (const BadValue& err) {
      parse_error(std::string(err.what()) + " for '" + e.path + "'", e.mark);
    }
  }
  validate(config);
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

ScenarioConfig overlay(const ScenarioConfig& base, const YAML::Node& node) {
  ScenarioConfig out = base;
  if (node.IsNull()) return out;
  std::vector<Entry> entries;
  collect(node, "", entries);
  apply_entries(out, std::move(entries));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const lcpg::MotorMap& MotorConfig::for_leg(LegId leg) const {
  if (is_front(leg)) return front;
  if (is_middle(leg)) return middle;
  return hind;
}

const std::vector<FieldDef>& field_table() {
  static const std::vector<FieldDef> table = build_table();
  return table;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  // Keep reals recognisable as reals.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::pair<std::string, std::string>> flatten(const ScenarioConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(field_table().size());
  for (const auto& f : field_table()) out.emplace_back(f.path, f.get(config));
  return out;
}

ScenarioConfig from_flat(const std::vector<std::pair<std::string, std::string>>& values) {
  ScenarioConfig c;
  std::vector<Entry> entries;
  for (const auto& [path, value] : values) {
    if (!find_field(path)) throw UnknownKeyError(path);
    entries.push_back({path, value, YAML::Mark::null_mark()});
  }
  apply_entries(c, std::move(entries));
  return c;
}

ScenarioConfig parse_scenario(const std::string& text) { return overlay(ScenarioConfig{}, load_yaml(text)); }

ScenarioConfig load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

ScenarioConfig apply_overrides(const ScenarioConfig& base, const std::string& text) {
  return overlay(base, load_yaml(text));
}

std::string emit_scenario(const ScenarioConfig& config) {
  YAML::Node root;
  root["schema_version"] = kScenarioSchemaVersion;
  for (const auto& [path, value] : flatten(config)) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    // yaml-cpp nodes are handles; walk down by reassignment.
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) chain.push_back(chain.back()[parts[i]]);
    chain.back()[parts.back()] = value;
  }
  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

std::uint64_t fingerprint(const ScenarioConfig& config) { return fnv1a64(emit_scenario(config)); }

std::string fingerprint_hex(const ScenarioConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint(config)));
  return buf;
}

Matrix parse_matrix(const std::string& text) {
  const auto root = load_yaml(text);
  if (!root.IsMap()) parse_error("expected a mapping", root.Mark());
  Matrix m;
  ScenarioConfig base;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key != "base" && key != "cells") throw UnknownKeyError(key);
  }
  if (root["base"]) base = overlay(base, root["base"]);
  const auto cells = root["cells"];
  if (!cells || !cells.IsSequence() || cells.size() == 0) {
    parse_error("matrix needs a non-empty 'cells' list", root.Mark());
  }
  for (const auto& cell : cells) {
    if (!cell.IsMap()) parse_error("cell must be a mapping", cell.Mark());
    MatrixCell mc;
    mc.config = overlay(base, cell);
    mc.name = mc.config.name;
    m.cells.push_back(std::move(mc));
  }
  return m;
}

Matrix load_matrix(const std::filesystem::path& path) { return parse_matrix(read_file(path)); }

std::string to_string(Controller c) { return enum_to(c, kControllers); }
std::string to_string(sim::TerrainKind k) { return enum_to(k, kTerrains); }
std::string to_string(sim::BallType t) { return enum_to(t, kBalls); }
std::string to_string(sim::LegSetupPreset p) { return enum_to(p, kLegSetups); }

}  // namespace beetle::config

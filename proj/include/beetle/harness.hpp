#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "beetle/config.hpp"
#include "beetle/gait.hpp"
#include "beetle/trace.hpp"

namespace beetle::harness {

struct TrialResult {
  std::string name;
  std::string fingerprint;
  std::uint64_t seed = 0;
  gait::TrialMetrics metrics;
  bool faulted = false;
  std::string fault;
  long ticks = 0;
  std::string trace_path;
  std::string trace_hash;  // FNV-1a of the trace file contents
};

struct TrialRun {
  TrialResult result;
  trace::GaitTrace trace;
};

std::array<Joint3, kLegCount> bias_posture(const config::ScenarioConfig& config);
gait::MetricsOptions metrics_options(const config::ScenarioConfig& config);
lcpg::BankConfig bank_config(const config::ScenarioConfig& config);

/// Runs one trial in memory. Software faults are caught and flagged, never thrown.
TrialRun simulate_trial(const config::ScenarioConfig& config);

/// simulate_trial plus trace and result files when trace_path is non-empty.
TrialResult run_trial(const config::ScenarioConfig& config, std::optional<std::uint64_t> seed_override = {},
                      const std::filesystem::path& trace_path = {});

/// Metrics recomputed from a persisted trace.
gait::TrialMetrics analyze_trace(const trace::GaitTrace& trace);
config::ScenarioConfig config_from_trace(const trace::GaitTrace& trace);

nlohmann::json to_json(const gait::TrialMetrics& m);
gait::TrialMetrics metrics_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrialResult& r);
TrialResult result_from_json(const nlohmann::json& j);
std::filesystem::path result_path_for(const std::filesystem::path& trace_path);

struct ReplayReport {
  gait::TrialMetrics stored;
  gait::TrialMetrics recomputed;
  bool identical = false;
};

ReplayReport replay(const std::filesystem::path& trace_path);

struct CellSummary {
  std::string name;
  std::string fingerprint;
  int trials = 0;
  int successes = 0;
  int failures = 0;
  int faults = 0;
  double success_rate = 0.0;  // % of non-faulted trials
  double failure_rate = 0.0;
  std::map<std::string, int> failure_histogram;
  double mean_speed = 0.0;
  double sd_speed = 0.0;
  double mean_cot = 0.0;  // over trials with bounded COT
  double mean_tripod = 0.0;
  double mean_atypical = 0.0;
  double mean_roll_active = 0.0;
  double mean_pitch_active = 0.0;

  bool operator==(const CellSummary&) const = default;
};

struct BatchOptions {
  int seeds = 20;
  int jobs = 1;
  std::filesystem::path trace_dir;  // empty: keep traces in memory only
};

struct BatchResult {
  std::vector<CellSummary> cells;
  std::vector<std::vector<TrialResult>> trials;  // [cell][seed index]
};

/// Runs seeds base, base+1, ... for every cell. Results are ordered by
/// (cell, seed) regardless of the number of worker threads.
BatchResult run_batch(const config::Matrix& matrix, const BatchOptions& options);
CellSummary summarize(const std::string& name, const std::vector<TrialResult>& trials);
std::string format_table(const BatchResult& batch);
nlohmann::json to_json(const BatchResult& batch);

struct GaitDiagramFiles {
  std::filesystem::path svg;
  std::filesystem::path csv;
  std::size_t intervals = 0;
};

struct StanceInterval {
  LegId leg;
  long start = 0;  // first stance tick
  long end = 0;    // one past the last stance tick
};

std::vector<StanceInterval> stance_intervals(std::span<const gait::StanceSet> stance, long first_tick = 0);
std::string gait_diagram_svg(std::span<const gait::StanceSet> stance, long first_tick = 0);

/// Writes <out>.svg and <out>.csv. Throws on an empty trace or write failure.
GaitDiagramFiles emit_gait_diagram(const trace::GaitTrace& trace, const std::filesystem::path& out_stem);

}  // namespace beetle::harness

#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "beetle/body.hpp"
#include "beetle/failure.hpp"
#include "beetle/legs.hpp"
#include "beetle/trace.hpp"

namespace beetle::gait {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SupportPattern { TripodA, TripodB, AtypicalA, AtypicalB, Other };

using StanceSet = std::array<bool, kLegCount>;

std::string to_string(SupportPattern p);

/// Exact match against the four canonical triples; everything else is Other.
SupportPattern classify_support(const StanceSet& stance);

struct StanceOptions {
  double force_threshold = 0.05;  // N
  int debounce_ticks = 2;         // raw state must persist this long before the stance state flips
};

/// Debounced per-tick stance sets from logged normal forces.
std::vector<StanceSet> stance_series(const trace::GaitTrace& trace, const StanceOptions& options);

struct SupportPercentages {
  double tripod = 0.0;
  double atypical = 0.0;
  double other = 0.0;
  // Same two labels renormalised over tripod + atypical ticks only.
  double tripod_of_classified = 0.0;
  double atypical_of_classified = 0.0;
  long analyzed_ticks = 0;

  bool operator==(const SupportPercentages&) const = default;
};

SupportPercentages support_percentages(std::span<const StanceSet> stance);
/// Excludes the first warmup_ticks; throws AnalysisError on an empty trace.
SupportPercentages support_percentages(const trace::GaitTrace& trace, const StanceOptions& options,
                                       long warmup_ticks);

struct RuleResult {
  std::string name;
  bool pass = false;
  double statistic = 0.0;
};

struct RuleThresholds {
  double phase_tolerance = 0.3;  // rad around pi
  double min_correlation = 0.8;
  double min_order_fraction = 0.8;
  int min_cycles = 5;
};

struct RuleReport {
  std::array<RuleResult, 4> rules;
  double period_ticks = 0.0;
  double cycles = 0.0;
  bool all_pass() const;
};

/// Stance period from the autocorrelation of a 0/1 stance signal (ticks).
double estimate_period(std::span<const double> signal);
/// Lag in [0, period) maximising the circular cross-correlation of b against a.
int best_lag(std::span<const double> a, std::span<const double> b, int max_lag);
double pearson(std::span<const double> a, std::span<const double> b);

RuleReport check_rules(std::span<const StanceSet> stance, const RuleThresholds& thresholds = {});

struct MetricsOptions {
  StanceOptions stance;
  long warmup_ticks = 280;
  bool froude_sqrt = false;
  bool cot_include_ball = true;
  double pitch_active_below = 0.99;
  sim::FailureCriteria failure;
};

struct TrialMetrics {
  double distance_m = 0.0;
  double duration_s = 0.0;
  double mean_speed = 0.0;
  bool success = false;
  sim::FailureType failure = sim::FailureType::None;
  SupportPercentages support;
  std::array<double, kLegCount> duty_factor{};
  std::optional<double> cot;  // empty when distance is zero (unbounded)
  double froude = 0.0;
  double size_ratio = 0.0;
  double weight_ratio = 0.0;
  double roll_active_pct = 0.0;
  double pitch_active_pct = 0.0;
  double energy_j = 0.0;

  bool operator==(const TrialMetrics&) const = default;
};

double froude_number(double mean_speed, double leg_length, bool sqrt_convention = false);
std::optional<double> cost_of_transport(double energy_j, double mass_kg, double distance_m);

struct RocActivation {
  double roll_pct = 0.0;
  double pitch_pct = 0.0;
};

RocActivation roc_activation_stats(std::span<const trace::TraceRow> rows, double pitch_active_below = 0.99);

std::vector<sim::HistorySample> history_from_trace(const trace::GaitTrace& trace);

TrialMetrics compute_metrics(const trace::GaitTrace& trace, const body::RobotGeometry& geometry,
                             double ball_diameter, double ball_mass, const MetricsOptions& options);

/// Corners of the body and feet of a robot standing behind the ball in its rolling posture.
std::vector<body::Vec3> rolling_posture_points(const body::RobotGeometry& geometry,
                                               const std::array<Joint3, kLegCount>& posture,
                                               double ball_diameter, double pitch_deg);
/// Sphere volume over the axis-aligned box holding the ball and the given points.
double object_to_space_ratio(double ball_diameter, std::span<const body::Vec3> robot_points);

}  // namespace beetle::gait

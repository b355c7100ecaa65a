#include "beetle/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "beetle/sim.hpp"

namespace beetle::gait {

namespace {

constexpr StanceSet kTripodA{false, true, false, true, false, true};    // R1 L2 R3
constexpr StanceSet kTripodB{true, false, true, false, true, false};    // L1 R2 L3
constexpr StanceSet kAtypicalA{true, true, false, false, false, true};  // L1 L2 R3
constexpr StanceSet kAtypicalB{false, false, true, true, true, false};  // R1 R2 L3

std::vector<double> leg_signal(std::span<const StanceSet> stance, LegId leg) {
  std::vector<double> s(stance.size());
  for (std::size_t t = 0; t < stance.size(); ++t) s[t] = stance[t][index(leg)] ? 1.0 : 0.0;
  return s;
}

std::vector<long> swing_onsets(std::span<const StanceSet> stance, LegId leg) {
  std::vector<long> out;
  for (std::size_t t = 1; t < stance.size(); ++t) {
    if (stance[t - 1][index(leg)] && !stance[t][index(leg)]) out.push_back(static_cast<long>(t));
  }
  return out;
}

// Fraction of hind swing onsets followed (not preceded) by the paired middle onset.
double order_fraction(std::span<const StanceSet> stance, LegId hind, LegId middle, double period,
                      long& counted) {
  const auto h = swing_onsets(stance, hind);
  const auto m = swing_onsets(stance, middle);
  long ok = 0;
  counted = 0;
  for (long th : h) {
    long best = -1;
    double best_dist = period / 2.0;
    for (long tm : m) {
      const double d = std::abs(static_cast<double>(tm - th));
      if (d < best_dist) {
        best_dist = d;
        best = tm;
      }
    }
    if (best < 0) continue;
    ++counted;
    if (best > th) ++ok;
  }
  return counted ? static_cast<double>(ok) / static_cast<double>(counted) : 0.0;
}

}  // namespace

std::string to_string(SupportPattern p) {
  switch (p) {
    case SupportPattern::TripodA: return "TripodA";
    case SupportPattern::TripodB: return "TripodB";
    case SupportPattern::AtypicalA: return "AtypicalA";
    case SupportPattern::AtypicalB: return "AtypicalB";
    case SupportPattern::Other: return "Other";
  }
  return "Other";
}

SupportPattern classify_support(const StanceSet& stance) {
  if (stance == kTripodA) return SupportPattern::TripodA;
  if (stance == kTripodB) return SupportPattern::TripodB;
  if (stance == kAtypicalA) return SupportPattern::AtypicalA;
  if (stance == kAtypicalB) return SupportPattern::AtypicalB;
  return SupportPattern::Other;
}

std::vector<StanceSet> stance_series(const trace::GaitTrace& trace, const StanceOptions& options) {
  std::vector<StanceSet> out(trace.rows.size());
  if (trace.rows.empty()) return out;
  const int k = std::max(1, options.debounce_ticks);
  for (std::size_t leg = 0; leg < kLegCount; ++leg) {
    bool state = trace.rows[0].normal[leg] > options.force_threshold;
    int run = 0;
    for (std::size_t t = 0; t < trace.rows.size(); ++t) {
      const bool raw = trace.rows[t].normal[leg] > options.force_threshold;
      run = raw != state ? run + 1 : 0;
      if (run >= k) {
        state = raw;
        run = 0;
      }
      out[t][leg] = state;
    }
  }
  // Stamp debounced transitions back onto the tick where the raw change began.
  if (k > 1) {
    std::vector<StanceSet> shifted(out.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
      const std::size_t src = std::min(out.size() - 1, t + static_cast<std::size_t>(k - 1));
      shifted[t] = out[src];
    }
    return shifted;
  }
  return out;
}

SupportPercentages support_percentages(std::span<const StanceSet> stance) {
  SupportPercentages p;
  p.analyzed_ticks = static_cast<long>(stance.size());
  if (stance.empty()) {
    p.other = 100.0;
    return p;
  }
  long tri = 0, aty = 0, other = 0;
  for (const auto& s : stance) {
    switch (classify_support(s)) {
      case SupportPattern::TripodA:
      case SupportPattern::TripodB: ++tri; break;
      case SupportPattern::AtypicalA:
      case SupportPattern::AtypicalB: ++aty; break;
      case SupportPattern::Other: ++other; break;
    }
  }
  const double n = static_cast<double>(stance.size());
  p.tripod = 100.0 * static_cast<double>(tri) / n;
  p.atypical = 100.0 * static_cast<double>(aty) / n;
  p.other = 100.0 * static_cast<double>(other) / n;
  if (tri + aty > 0) {
    p.tripod_of_classified = 100.0 * static_cast<double>(tri) / static_cast<double>(tri + aty);
    p.atypical_of_classified = 100.0 * static_cast<double>(aty) / static_cast<double>(tri + aty);
  }
  return p;
}

SupportPercentages support_percentages(const trace::GaitTrace& trace, const StanceOptions& options,
                                       long warmup_ticks) {
  if (trace.rows.empty()) throw AnalysisError("empty trace");
  const auto stance = stance_series(trace, options);
  const auto skip = std::min<std::size_t>(stance.size(), static_cast<std::size_t>(std::max(0L, warmup_ticks)));
  return support_percentages(std::span<const StanceSet>(stance).subspan(skip));
}

double estimate_period(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 4) throw AnalysisError("signal too short for a period estimate");
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = signal[i] - mean;
  const double r0 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  if (r0 <= 1e-12) throw AnalysisError("no stepping: stance signal is constant");
  std::vector<double> r(n / 2 + 1, 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    for (std::size_t t = 0; t + k < n; ++t) r[k] += x[t] * x[t + k];
  }
  std::size_t k = 1;
  while (k < r.size() && r[k] > 0) ++k;
  if (k >= r.size()) throw AnalysisError("no periodicity in stance signal");
  std::size_t best = k;
  for (; k < r.size(); ++k) {
    if (r[k] > r[best]) best = k;
  }
  if (r[best] <= 0) throw AnalysisError("no periodicity in stance signal");
  return static_cast<double>(best);
}

int best_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
  const std::size_t n = std::min(a.size(), b.size());
  const double ma = std::accumulate(a.begin(), a.begin() + static_cast<long>(n), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.begin() + static_cast<long>(n), 0.0) / static_cast<double>(n);
  int best = 0;
  double best_c = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_lag && static_cast<std::size_t>(k) < n; ++k) {
    double c = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
      c += (a[t] - ma) * (b[t + static_cast<std::size_t>(k)] - mb);
    }
    c /= static_cast<double>(n - static_cast<std::size_t>(k));
    if (c > best_c) {
      best_c = c;
      best = k;
    }
  }
  return best;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

bool RuleReport::all_pass() const {
  return std::all_of(rules.begin(), rules.end(), [](const RuleResult& r) { return r.pass; });
}

RuleReport check_rules(std::span<const StanceSet> stance, const RuleThresholds& th) {
  RuleReport rep;
  const auto l1 = leg_signal(stance, LegId::L1);
  const auto r1 = leg_signal(stance, LegId::R1);
  rep.period_ticks = estimate_period(l1);
  rep.cycles = static_cast<double>(stance.size()) / rep.period_ticks;
  if (rep.cycles < th.min_cycles) {
    throw AnalysisError("trace too short: " + std::to_string(rep.cycles) + " cycles, need " +
                        std::to_string(th.min_cycles));
  }
  const int period = static_cast<int>(std::lround(rep.period_ticks));
  const int lag = best_lag(l1, r1, period);
  const double phase = 2.0 * std::numbers::pi * lag / rep.period_ticks;
  rep.rules[0] = {"front anti-phase", std::abs(phase - std::numbers::pi) <= th.phase_tolerance, phase};

  const double c2 = pearson(leg_signal(stance, LegId::L2), leg_signal(stance, LegId::R3));
  const double c3 = pearson(leg_signal(stance, LegId::R2), leg_signal(stance, LegId::L3));
  rep.rules[1] = {"L2-R3 in phase", c2 > th.min_correlation, c2};
  rep.rules[2] = {"R2-L3 in phase", c3 > th.min_correlation, c3};

  long n_a = 0, n_b = 0;
  const double fa = order_fraction(stance, LegId::R3, LegId::L2, rep.period_ticks, n_a);
  const double fb = order_fraction(stance, LegId::L3, LegId::R2, rep.period_ticks, n_b);
  const double frac = (n_a + n_b) ? (fa * static_cast<double>(n_a) + fb * static_cast<double>(n_b)) /
                                        static_cast<double>(n_a + n_b)
                                  : 0.0;
  rep.rules[3] = {"rear-to-front onset", frac >= th.min_order_fraction, frac};
  return rep;
}

double froude_number(double mean_speed, double leg_length, bool sqrt_convention) {
  const double gl = sim::kGravity * leg_length;
  return sqrt_convention ? mean_speed / std::sqrt(gl) : mean_speed * mean_speed / gl;
}

std::optional<double> cost_of_transport(double energy_j, double mass_kg, double distance_m) {
  if (!(distance_m > 0.0)) return std::nullopt;
  return energy_j / (mass_kg * sim::kGravity * distance_m);
}

RocActivation roc_activation_stats(std::span<const trace::TraceRow> rows, double pitch_active_below) {
  RocActivation a;
  if (rows.empty()) return a;
  long roll = 0, pitch = 0;
  for (const auto& r : rows) {
    if (r.m_left + r.m_right > 0.0 || r.gate) ++roll;
    if (std::min(r.sf_front, r.sf_back) < pitch_active_below) ++pitch;
  }
  a.roll_pct = 100.0 * static_cast<double>(roll) / static_cast<double>(rows.size());
  a.pitch_pct = 100.0 * static_cast<double>(pitch) / static_cast<double>(rows.size());
  return a;
}

std::vector<sim::HistorySample> history_from_trace(const trace::GaitTrace& trace) {
  std::vector<sim::HistorySample> h;
  h.reserve(trace.rows.size());
  for (const auto& r : trace.rows) {
    h.push_back({r.time_s, r.roll_deg, r.e_pitch, r.gap, r.path_length, r.hind_slip});
  }
  return h;
}

TrialMetrics compute_metrics(const trace::GaitTrace& trace, const body::RobotGeometry& geometry,
                             double ball_diameter, double ball_mass, const MetricsOptions& options) {
  TrialMetrics m;
  if (trace.rows.empty()) throw AnalysisError("empty trace");
  m.distance_m = trace.rows.back().path_length;
  m.duration_s = static_cast<double>(trace.rows.size()) * trace.dt;
  m.mean_speed = m.distance_m / m.duration_s;
  m.success = m.distance_m >= options.failure.target_m;
  m.failure = m.success ? sim::FailureType::None
                        : sim::classify_failure(history_from_trace(trace), options.failure);
  for (const auto& r : trace.rows) m.energy_j += r.power_w * trace.dt;
  const double mass = geometry.mass + (options.cot_include_ball ? ball_mass : 0.0);
  m.cot = cost_of_transport(m.energy_j, mass, m.distance_m);
  m.froude = froude_number(m.mean_speed, geometry.leg_length(), options.froude_sqrt);
  m.size_ratio = ball_diameter / geometry.leg_length();
  m.weight_ratio = ball_mass / geometry.mass;

  const auto stance = stance_series(trace, options.stance);
  const auto skip = std::min<std::size_t>(stance.size(),
                                          static_cast<std::size_t>(std::max(0L, options.warmup_ticks)));
  const std::span<const StanceSet> analyzed = std::span<const StanceSet>(stance).subspan(skip);
  m.support = support_percentages(analyzed);
  if (!analyzed.empty()) {
    for (std::size_t leg = 0; leg < kLegCount; ++leg) {
      long n = 0;
      for (const auto& s : analyzed) n += s[leg];
      m.duty_factor[leg] = static_cast<double>(n) / static_cast<double>(analyzed.size());
    }
  }
  const auto act = roc_activation_stats(std::span<const trace::TraceRow>(trace.rows).subspan(skip),
                                        options.pitch_active_below);
  m.roll_active_pct = act.roll_pct;
  m.pitch_active_pct = act.pitch_pct;
  return m;
}

std::vector<body::Vec3> rolling_posture_points(const body::RobotGeometry& geometry,
                                               const std::array<Joint3, kLegCount>& posture,
                                               double ball_diameter, double pitch_deg) {
  const double r = 0.5 * ball_diameter;
  body::BodyPose pose;
  // Ball centred over the origin, robot behind it facing away.
  pose.position = {-(r + 0.5 * geometry.body_length), 0.0, 0.45};
  pose.yaw_deg = 180.0;
  pose.pitch_deg = pitch_deg;
  std::vector<body::Vec3> pts;
  const double hl = 0.5 * geometry.body_length, hw = 0.5 * geometry.body_width;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) pts.push_back(body::body_to_world(pose, {sx * hl, sy * hw, 0.0}));
  }
  for (auto leg : kAllLegs) {
    const auto foot = body::foot_in_body(geometry, leg, posture[index(leg)]).position;
    pts.push_back(body::body_to_world(pose, foot));
    pts.push_back(body::body_to_world(pose, geometry.mount(leg)));
  }
  return pts;
}

double object_to_space_ratio(double ball_diameter, std::span<const body::Vec3> robot_points) {
  const double r = 0.5 * ball_diameter;
  double lo[3] = {-r, -r, 0.0};
  double hi[3] = {r, r, 2.0 * r};
  for (const auto& p : robot_points) {
    const double c[3] = {p.x, p.y, p.z};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  }
  const double box = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  const double sphere = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  return sphere / box;
}

}  // namespace beetle::gait

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "beetle/config.hpp"
#include "beetle/gait.hpp"
#include "beetle/harness.hpp"
#include "beetle/lcpg.hpp"

using namespace beetle;
using namespace beetle::gait;

namespace {

constexpr unsigned bit(LegId l) { return 1u << index(l); }

// Truth table written from the leg-set definitions, independent of classify_support.
SupportPattern oracle(unsigned mask) {
  const unsigned tripod_a = bit(LegId::R1) | bit(LegId::L2) | bit(LegId::R3);
  const unsigned tripod_b = bit(LegId::L1) | bit(LegId::R2) | bit(LegId::L3);
  const unsigned atyp_a = bit(LegId::L1) | bit(LegId::L2) | bit(LegId::R3);
  const unsigned atyp_b = bit(LegId::R1) | bit(LegId::R2) | bit(LegId::L3);
  if (mask == tripod_a) return SupportPattern::TripodA;
  if (mask == tripod_b) return SupportPattern::TripodB;
  if (mask == atyp_a) return SupportPattern::AtypicalA;
  if (mask == atyp_b) return SupportPattern::AtypicalB;
  return SupportPattern::Other;
}

StanceSet from_mask(unsigned mask) {
  StanceSet s{};
  for (std::size_t i = 0; i < kLegCount; ++i) s[i] = (mask >> i) & 1u;
  return s;
}

StanceSet legs(std::initializer_list<LegId> in) {
  StanceSet s{};
  for (auto l : in) s[index(l)] = true;
  return s;
}

// Alternating tripods with a swing onset lag of `middle_lag` ticks for the middle legs.
std::vector<StanceSet> synthetic_gait(int cycles, int period, int middle_lag, bool front_in_phase = false) {
  std::vector<StanceSet> out;
  for (int t = 0; t < cycles * period; ++t) {
    auto phase = [&](int shift) { return ((t - shift) % period + period) % period; };
    StanceSet s{};
    const bool a = phase(0) < period / 2;
    const bool b = !a;
    s[index(LegId::R1)] = a;
    s[index(LegId::R3)] = a;
    s[index(LegId::L2)] = phase(middle_lag) < period / 2;
    s[index(LegId::L1)] = front_in_phase ? a : b;
    s[index(LegId::L3)] = b;
    s[index(LegId::R2)] = phase(middle_lag) >= period / 2;
    out.push_back(s);
  }
  return out;
}

trace::GaitTrace trace_from(const std::vector<StanceSet>& stance, double speed = 0.15) {
  trace::GaitTrace tr;
  for (std::size_t t = 0; t < stance.size(); ++t) {
    trace::TraceRow r;
    r.tick = static_cast<long>(t);
    r.time_s = t * tr.dt;
    for (std::size_t i = 0; i < kLegCount; ++i) {
      r.contact[i] = stance[t][i];
      r.normal[i] = stance[t][i] ? 10.0 : 0.0;
    }
    r.path_length = speed * (t + 1) * tr.dt;
    r.power_w = 2.0;
    tr.rows.push_back(r);
  }
  return tr;
}

}  // namespace

TEST_CASE("classifier equals the truth table over all stance sets") {
  for (unsigned mask = 0; mask < 64; ++mask) REQUIRE(classify_support(from_mask(mask)) == oracle(mask));
  CHECK(classify_support(legs({LegId::R1, LegId::L2, LegId::R3})) == SupportPattern::TripodA);
  CHECK(classify_support(legs({LegId::L1, LegId::L2, LegId::R3})) == SupportPattern::AtypicalA);
  CHECK(classify_support(from_mask(63)) == SupportPattern::Other);
}

TEST_CASE("support percentages") {
  const auto ta = legs({LegId::R1, LegId::L2, LegId::R3});
  const auto tb = legs({LegId::L1, LegId::R2, LegId::L3});
  const auto aa = legs({LegId::L1, LegId::L2, LegId::R3});
  std::vector<StanceSet> alt{ta, tb, ta, tb};
  const auto p = support_percentages(alt);
  CHECK(p.tripod == 100.0);
  CHECK(p.atypical == 0.0);
  CHECK(p.other == 0.0);
  std::vector<StanceSet> half{ta, aa, tb, aa};
  const auto q = support_percentages(half);
  CHECK(q.tripod == 50.0);
  CHECK(q.atypical == 50.0);
  std::vector<StanceSet> mixed{ta, aa, from_mask(63), from_mask(0), tb, tb, ta};
  const auto m = support_percentages(mixed);
  CHECK(std::abs(m.tripod + m.atypical + m.other - 100.0) < 1e-9);
  CHECK(m.tripod_of_classified + m.atypical_of_classified == doctest::Approx(100.0));

  trace::GaitTrace empty;
  CHECK_THROWS_AS(support_percentages(empty, {}, 0), AnalysisError);
}

TEST_CASE("stance detection debounces single-tick blips") {
  std::vector<StanceSet> raw(40, legs({LegId::R1}));
  for (int t = 20; t < 40; ++t) raw[t] = legs({LegId::L1});
  raw[10] = legs({});
  const auto s = stance_series(trace_from(raw), {});
  CHECK(s[10][index(LegId::R1)]);
  CHECK(s[19][index(LegId::R1)]);
  CHECK(s[20][index(LegId::L1)]);
  CHECK_FALSE(s[20][index(LegId::R1)]);
}

TEST_CASE("rule checks on synthetic gaits") {
  const auto good = check_rules(synthetic_gait(10, 140, 3));
  CHECK(good.all_pass());
  CHECK(good.period_ticks == doctest::Approx(140).epsilon(0.02));

  const auto in_phase = check_rules(synthetic_gait(10, 140, 3, true));
  CHECK_FALSE(in_phase.rules[0].pass);

  const auto reversed = check_rules(synthetic_gait(10, 140, -3));
  CHECK_FALSE(reversed.rules[3].pass);

  CHECK_THROWS_AS(check_rules(synthetic_gait(3, 140, 3)), AnalysisError);
}

TEST_CASE("rule checks close the loop with the pattern generator") {
  lcpg::LcpgBank bank(harness::bank_config(config::ScenarioConfig{}));
  std::vector<StanceSet> stance;
  for (int t = 0; t < 140 * 12; ++t) {
    const auto tick = bank.step();
    if (t >= 280) stance.push_back(tick.commanded_stance);
  }
  const auto rep = check_rules(stance);
  for (const auto& r : rep.rules) CHECK_MESSAGE(r.pass, r.name << " " << r.statistic);
}

TEST_CASE("dimensionless numbers") {
  CHECK(std::abs(froude_number(0.15, 0.35) - 0.15 * 0.15 / (9.81 * 0.35)) < 1e-12);
  CHECK(froude_number(0.15, 0.35) == doctest::Approx(0.00655).epsilon(1e-3));
  CHECK(std::abs(froude_number(0.15, 0.35, true) - 0.15 / std::sqrt(9.81 * 0.35)) < 1e-12);
  CHECK_FALSE(cost_of_transport(10.0, 6.7, 0.0).has_value());
  CHECK(*cost_of_transport(10.0, 5.0, 2.0) == doctest::Approx(10.0 / (5.0 * 9.81 * 2.0)));
}

TEST_CASE("metrics from a synthetic trace") {
  const auto tr = trace_from(synthetic_gait(12, 140, 3));
  body::RobotGeometry g;
  MetricsOptions opt;
  const auto m = compute_metrics(tr, g, 0.6, 2.0, opt);
  CHECK(m.size_ratio == doctest::Approx(0.6 / 0.35));
  CHECK(m.weight_ratio == doctest::Approx(2.0 / 4.7));
  CHECK(m.mean_speed == doctest::Approx(0.15));
  CHECK(m.froude == doctest::Approx(froude_number(0.15, 0.35)));
  CHECK(m.energy_j == doctest::Approx(2.0 * tr.rows.size() * tr.dt));
  CHECK(m.cot.has_value());
  CHECK(*m.cot >= 0.0);
  CHECK(m.roll_active_pct == 0.0);
  CHECK(m.pitch_active_pct == 0.0);
  CHECK(m.support.tripod > 90.0);
  CHECK(std::abs(m.support.tripod + m.support.atypical + m.support.other - 100.0) < 1e-9);
}

TEST_CASE("success is exactly distance >= target") {
  auto tr = trace_from(synthetic_gait(1, 140, 3));
  body::RobotGeometry g;
  MetricsOptions opt;
  tr.rows.back().path_length = 3.0;
  CHECK(compute_metrics(tr, g, 0.6, 2.0, opt).success);
  tr.rows.back().path_length = std::nextafter(3.0, 0.0);
  CHECK_FALSE(compute_metrics(tr, g, 0.6, 2.0, opt).success);
}

TEST_CASE("activation statistics") {
  std::vector<trace::TraceRow> rows(100);
  for (int i = 0; i < 30; ++i) rows[i].gate = true;
  auto a = roc_activation_stats(rows);
  CHECK(a.roll_pct == 30.0);
  CHECK(a.pitch_pct == 0.0);
  rows[50].sf_back = 0.5;
  rows[51].m_right = 1.0;
  a = roc_activation_stats(rows);
  CHECK(a.roll_pct == 31.0);
  CHECK(a.pitch_pct == 1.0);
}

TEST_CASE("object to space ratio") {
  const std::vector<body::Vec3> none;
  CHECK(object_to_space_ratio(0.6, none) == doctest::Approx(std::numbers::pi / 6.0));
  const config::ScenarioConfig c;
  const auto pts = rolling_posture_points(c.geometry, harness::bias_posture(c), 0.6, 20.0);
  const double base = object_to_space_ratio(0.6, pts);
  CHECK(base > 0.0);
  CHECK(base < std::numbers::pi / 6.0);
  CHECK(base == doctest::Approx(0.278313).epsilon(1e-5));
  const auto big = rolling_posture_points(c.geometry, harness::bias_posture(c), 1.2, 20.0);
  CHECK(object_to_space_ratio(1.2, big) > base);
}

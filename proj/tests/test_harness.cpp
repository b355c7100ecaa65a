#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beetle/config.hpp"
#include "beetle/harness.hpp"

using namespace beetle;
using namespace beetle::harness;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "beetle_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

config::ScenarioConfig short_run(const std::string& extra = "") {
  return config::parse_scenario("duration_s: 12\nball: rigid\n" + extra);
}

}  // namespace

TEST_CASE("trial files replay to identical metrics") {
  const auto path = scratch("replay.csv");
  const auto r = run_trial(short_run(), 11, path);
  CHECK(r.seed == 11);
  CHECK_FALSE(r.faulted);
  REQUIRE(std::filesystem::exists(path));
  REQUIRE(std::filesystem::exists(result_path_for(path)));
  const auto rep = replay(path);
  CHECK(rep.identical);
  CHECK(rep.stored == r.metrics);

  const auto tr = trace::read_trace(path);
  CHECK(config::fingerprint_hex(config_from_trace(tr)) == r.fingerprint);
}

TEST_CASE("replay without a stored result fails") {
  const auto path = scratch("lonely.csv");
  auto run = simulate_trial(short_run("duration_s: 1\n"));
  trace::write_trace(path, run.trace);
  std::filesystem::remove(result_path_for(path));
  CHECK_THROWS_AS(replay(path), trace::TraceError);
}

TEST_CASE("result json round trip") {
  const auto run = simulate_trial(short_run("duration_s: 4\n"));
  const auto j = to_json(run.result);
  const auto back = result_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.metrics == run.result.metrics);
  CHECK(back.seed == run.result.seed);
  CHECK(back.fingerprint == run.result.fingerprint);
  CHECK(back.ticks == run.result.ticks);
}

TEST_CASE("a 0.1 s trial is a push in place") {
  const auto run = simulate_trial(config::parse_scenario("duration_s: 0.1\n"));
  CHECK_FALSE(run.result.faulted);
  CHECK_FALSE(run.result.metrics.success);
  CHECK(run.result.metrics.failure == sim::FailureType::PushInPlace);
  CHECK(run.trace.rows.size() == 6);
}

TEST_CASE("trial ticks match the duration") {
  const auto run = simulate_trial(short_run("duration_s: 2\n"));
  CHECK(run.result.ticks == static_cast<long>(run.trace.rows.size()));
  CHECK(run.trace.rows.size() <= 120);
}

TEST_CASE("gait diagram") {
  const auto run = simulate_trial(short_run("duration_s: 20\ncontroller: lcpg\n"));
  const auto stem = scratch("diagram");
  const auto files = emit_gait_diagram(run.trace, stem);
  CHECK(files.intervals > 20);
  REQUIRE(std::filesystem::exists(files.svg));
  REQUIRE(std::filesystem::exists(files.csv));

  std::ifstream in(files.csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "leg,start_tick,end_tick,duration_ticks");
  std::vector<long> l1, r1;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string leg, a, b, d;
    std::getline(ss, leg, ',');
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, d, ',');
    CHECK(std::stol(b) - std::stol(a) == std::stol(d));
    if (std::stol(a) < 280) continue;
    if (leg == "L1") l1.push_back(std::stol(a));
    if (leg == "R1") r1.push_back(std::stol(a));
  }
  REQUIRE(l1.size() >= 4);
  REQUIRE(r1.size() >= 4);
  std::vector<long> offsets;
  for (long s : r1) {
    long best = 1 << 30;
    for (long t : l1)
      if (t > s && t - s < best) best = t - s;
    if (best < 1000) offsets.push_back(best);
  }
  std::sort(offsets.begin(), offsets.end());
  const long median = offsets[offsets.size() / 2];
  CHECK(std::abs(median - 70) <= 2);

  const std::string svg = [&] {
    std::ifstream s(files.svg);
    return std::string(std::istreambuf_iterator<char>(s), {});
  }();
  CHECK(svg.find("<svg") != std::string::npos);

  trace::GaitTrace empty;
  CHECK_THROWS_AS(emit_gait_diagram(empty, scratch("empty")), gait::AnalysisError);
}

TEST_CASE("batch results do not depend on worker count") {
  const auto m = config::parse_matrix(
      "base:\n  duration_s: 6\ncells:\n  - {name: a, ball: rigid}\n  - {name: b, terrain: uneven, controller: lcpg}\n");
  BatchOptions serial;
  serial.seeds = 3;
  serial.jobs = 1;
  auto parallel = serial;
  parallel.jobs = 4;
  const auto s = run_batch(m, serial);
  const auto p = run_batch(m, parallel);
  REQUIRE(s.cells.size() == 2);
  CHECK(s.cells == p.cells);
  for (std::size_t c = 0; c < s.trials.size(); ++c)
    for (std::size_t i = 0; i < s.trials[c].size(); ++i) {
      CHECK(s.trials[c][i].seed == p.trials[c][i].seed);
      CHECK(s.trials[c][i].metrics == p.trials[c][i].metrics);
    }
  for (const auto& c : s.cells) {
    CHECK(c.trials == 3);
    CHECK(c.success_rate + c.failure_rate == doctest::Approx(100.0));
    CHECK(c.successes + c.failures + c.faults == c.trials);
  }
  CHECK(format_table(s).find("a") != std::string::npos);
  CHECK(to_json(s)["cells"].size() == 2);
}

TEST_CASE("summary arithmetic") {
  std::vector<TrialResult> t(4);
  t[0].metrics.success = true;
  t[0].metrics.mean_speed = 0.1;
  t[1].metrics.success = true;
  t[1].metrics.mean_speed = 0.3;
  t[2].metrics.failure = sim::FailureType::FallSideways;
  t[2].metrics.mean_speed = 0.2;
  t[3].faulted = true;
  const auto s = summarize("x", t);
  CHECK(s.trials == 4);
  CHECK(s.faults == 1);
  CHECK(s.successes == 2);
  CHECK(s.success_rate == doctest::Approx(200.0 / 3.0));
  CHECK(s.success_rate + s.failure_rate == doctest::Approx(100.0));
  CHECK(s.failure_histogram.at("FallSideways") == 1);
  CHECK(s.mean_speed == doctest::Approx(0.2));
}

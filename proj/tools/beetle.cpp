#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "beetle/config.hpp"
#include "beetle/gait.hpp"
#include "beetle/harness.hpp"
#include "beetle/trace.hpp"

namespace {

enum Exit { kOk = 0, kBehaviour = 1, kConfig = 2, kFault = 3 };

using namespace beetle;

void print_metrics(const gait::TrialMetrics& m) {
  std::printf("distance      %.4f m in %.2f s\n", m.distance_m, m.duration_s);
  std::printf("mean speed    %.4f m/s\n", m.mean_speed);
  std::printf("success       %s (%s)\n", m.success ? "yes" : "no", sim::to_string(m.failure).c_str());
  std::printf("support       tripod %.1f%%  atypical %.1f%%  other %.1f%%\n", m.support.tripod, m.support.atypical,
              m.support.other);
  std::printf("              tripod/atypical only: %.1f%% / %.1f%%\n", m.support.tripod_of_classified,
              m.support.atypical_of_classified);
  std::printf("duty          ");
  for (auto leg : kAllLegs) std::printf("%s %.2f  ", std::string(leg_name(leg)).c_str(), m.duty_factor[index(leg)]);
  std::printf("\n");
  if (m.cot) {
    std::printf("COT           %.4f\n", *m.cot);
  } else {
    std::printf("COT           unbounded\n");
  }
  std::printf("Froude        %.6f\n", m.froude);
  std::printf("size ratio    %.3f  weight ratio %.3f\n", m.size_ratio, m.weight_ratio);
  std::printf("ROC active    roll %.1f%%  pitch %.1f%%\n", m.roll_active_pct, m.pitch_active_pct);
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out,
            std::optional<double> duration) {
  auto cfg = config::load_scenario(scenario);
  if (duration) cfg.duration_s = *duration;
  const std::string path = out.empty() ? cfg.name + "_seed" + std::to_string(seed.value_or(cfg.seed)) + ".csv" : out;
  const auto r = harness::run_trial(cfg, seed, path);
  std::printf("trace         %s\nfingerprint   %s\ntrace hash    %s\n", r.trace_path.c_str(), r.fingerprint.c_str(),
              r.trace_hash.c_str());
  if (r.faulted) {
    std::fprintf(stderr, "simulation fault: %s\n", r.fault.c_str());
    return kFault;
  }
  print_metrics(r.metrics);
  return r.metrics.success ? kOk : kBehaviour;
}

int cmd_batch(const std::string& matrix_path, int seeds, int jobs, const std::string& trace_dir,
              const std::string& json_out) {
  const auto matrix = config::load_matrix(matrix_path);
  harness::BatchOptions opt;
  opt.seeds = seeds;
  opt.jobs = jobs;
  opt.trace_dir = trace_dir;
  const auto batch = harness::run_batch(matrix, opt);
  std::cout << harness::format_table(batch);
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << harness::to_json(batch).dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + json_out);
  }
  for (const auto& c : batch.cells) {
    if (c.faults > 0) return kFault;
  }
  return kOk;
}

int cmd_analyze(const std::string& path) {
  const auto tr = trace::read_trace(path);
  const auto m = harness::analyze_trace(tr);
  print_metrics(m);
  const auto cfg = harness::config_from_trace(tr);
  const auto stance = gait::stance_series(tr, harness::metrics_options(cfg).stance);
  const auto skip = std::min<std::size_t>(stance.size(), static_cast<std::size_t>(cfg.analysis.warmup_ticks));
  gait::RuleThresholds th;
  th.phase_tolerance = cfg.analysis.rule1_tolerance;
  th.min_correlation = cfg.analysis.rule23_min_correlation;
  th.min_order_fraction = cfg.analysis.rule4_min_fraction;
  try {
    const auto rules = gait::check_rules(std::span<const gait::StanceSet>(stance).subspan(skip), th);
    std::printf("period        %.1f ticks, %.1f cycles\n", rules.period_ticks, rules.cycles);
    for (std::size_t i = 0; i < rules.rules.size(); ++i) {
      std::printf("rule %zu        %-20s %s (%.4f)\n", i + 1, rules.rules[i].name.c_str(),
                  rules.rules[i].pass ? "pass" : "FAIL", rules.rules[i].statistic);
    }
  } catch (const gait::AnalysisError& e) {
    std::printf("rules         not checked: %s\n", e.what());
  }
  return kOk;
}

int cmd_diagram(const std::string& path, const std::string& out) {
  const auto tr = trace::read_trace(path);
  std::filesystem::path stem = out.empty() ? std::filesystem::path(path).replace_extension("") : std::filesystem::path(out);
  if (out.empty()) stem += ".gait";
  const auto files = harness::emit_gait_diagram(tr, stem);
  std::printf("%s\n%s (%zu stance intervals)\n", files.svg.c_str(), files.csv.c_str(), files.intervals);
  return kOk;
}

int cmd_replay(const std::string& path) {
  const auto rep = harness::replay(path);
  print_metrics(rep.recomputed);
  std::printf("replay        %s\n", rep.identical ? "identical to stored metrics" : "DIFFERS from stored metrics");
  return rep.identical ? kOk : kBehaviour;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dung-beetle-inspired ball-rolling hexapod: controller, simulator and analysis harness"};
  app.require_subcommand(1);

  std::string scenario, out, matrix, trace_dir, json_out, trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  int seeds = 20, jobs = 1;

  auto* run = app.add_subcommand("run", "Run one trial and write its trace and result");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--duration", duration, "Override the duration (s)");
  run->add_option("-o,--out", out, "Trace path (default <name>_seed<N>.csv)");

  auto* batch = app.add_subcommand("batch", "Run a condition matrix over several seeds");
  batch->add_option("matrix", matrix, "Matrix file")->required()->check(CLI::ExistingFile);
  batch->add_option("--seeds", seeds, "Seeds per cell")->check(CLI::PositiveNumber);
  batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--traces", trace_dir, "Directory for per-trial traces");
  batch->add_option("--json", json_out, "Write the summary as JSON");

  auto* analyze = app.add_subcommand("analyze", "Metrics and rule checks for a trace");
  analyze->add_option("trace", trace_path)->required()->check(CLI::ExistingFile);

  auto* diagram = app.add_subcommand("gait-diagram", "Footfall chart (SVG) and stance intervals (CSV)");
  diagram->add_option("trace", trace_path)->required()->check(CLI::ExistingFile);
  diagram->add_option("-o,--out", out, "Output stem");

  auto* rep = app.add_subcommand("replay", "Recompute metrics and compare with the stored result");
  rep->add_option("trace", trace_path)->required()->check(CLI::ExistingFile);

  auto* resolve = app.add_subcommand("resolve", "Print the fully resolved scenario");
  resolve->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(scenario, seed, out, duration);
    if (*batch) return cmd_batch(matrix, seeds, jobs, trace_dir, json_out);
    if (*analyze) return cmd_analyze(trace_path);
    if (*diagram) return cmd_diagram(trace_path, out);
    if (*rep) return cmd_replay(trace_path);
    if (*resolve) {
      std::cout << config::emit_scenario(config::load_scenario(scenario));
      return kOk;
    }
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const trace::TraceError& e) {
    std::fprintf(stderr, "trace error: %s\n", e.what());
    return kConfig;
  } catch (const gait::AnalysisError& e) {
    std::fprintf(stderr, "analysis error: %s\n", e.what());
    return kBehaviour;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFault;
  }
  return kOk;
}

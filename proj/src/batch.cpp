#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "beetle/harness.hpp"

namespace beetle::harness {

CellSummary summarize(const std::string& name, const std::vector<TrialResult>& trials) {
  CellSummary s;
  s.name = name;
  if (!trials.empty()) s.fingerprint = trials.front().fingerprint;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> speeds;
  double cot_sum = 0.0;
  int cot_n = 0;
  for (const auto& t : trials) {
    if (t.faulted) {
      ++s.faults;
      continue;
    }
    const auto& m = t.metrics;
    if (m.success) {
      ++s.successes;
    } else {
      ++s.failures;
      ++s.failure_histogram[sim::to_string(m.failure)];
    }
    speeds.push_back(m.mean_speed);
    if (m.cot) {
      cot_sum += *m.cot;
      ++cot_n;
    }
    s.mean_tripod += m.support.tripod;
    s.mean_atypical += m.support.atypical;
    s.mean_roll_active += m.roll_active_pct;
    s.mean_pitch_active += m.pitch_active_pct;
  }
  const int ok = s.successes + s.failures;
  if (ok > 0) {
    s.success_rate = 100.0 * s.successes / ok;
    s.failure_rate = 100.0 - s.success_rate;
    double sum = 0.0;
    for (double v : speeds) sum += v;
    s.mean_speed = sum / ok;
    double var = 0.0;
    for (double v : speeds) var += (v - s.mean_speed) * (v - s.mean_speed);
    s.sd_speed = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
    s.mean_tripod /= ok;
    s.mean_atypical /= ok;
    s.mean_roll_active /= ok;
    s.mean_pitch_active /= ok;
  }
  if (cot_n > 0) s.mean_cot = cot_sum / cot_n;
  return s;
}

BatchResult run_batch(const config::Matrix& matrix, const BatchOptions& options) {
  if (options.seeds < 1) throw std::invalid_argument("batch needs at least one seed per cell");
  const std::size_t n_cells = matrix.cells.size();
  const auto seeds = static_cast<std::size_t>(options.seeds);
  BatchResult out;
  out.trials.assign(n_cells, std::vector<TrialResult>(seeds));
  const std::size_t total = n_cells * seeds;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const std::size_t cell = k / seeds, s = k % seeds;
      const auto& cfg = matrix.cells[cell].config;
      try {
        std::filesystem::path path;
        if (!options.trace_dir.empty()) {
          path = options.trace_dir / (matrix.cells[cell].name + "_seed" + std::to_string(cfg.seed + s) + ".csv");
        }
        out.trials[cell][s] = run_trial(cfg, cfg.seed + s, path);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(total)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  for (std::size_t c = 0; c < n_cells; ++c) out.cells.push_back(summarize(matrix.cells[c].name, out.trials[c]));
  return out;
}

std::string format_table(const BatchResult& batch) {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-24s %6s %8s %8s %6s %16s %8s %7s %7s %6s %6s  %s\n", "condition", "trials",
                "success%", "failure%", "faults", "speed m/s", "COT", "tripod%", "atyp%", "roll%", "pitch%",
                "failure types");
  os << line;
  for (const auto& c : batch.cells) {
    std::string hist;
    for (const auto& [k, v] : c.failure_histogram) hist += (hist.empty() ? "" : " ") + k + "=" + std::to_string(v);
    std::snprintf(line, sizeof line, "%-24s %6d %8.1f %8.1f %6d %7.3f +- %5.3f %8.3f %7.1f %7.1f %6.1f %6.1f  %s\n",
                  c.name.c_str(), c.trials, c.success_rate, c.failure_rate, c.faults, c.mean_speed, c.sd_speed,
                  c.mean_cot, c.mean_tripod, c.mean_atypical, c.mean_roll_active, c.mean_pitch_active,
                  hist.empty() ? "-" : hist.c_str());
    os << line;
  }
  return os.str();
}

nlohmann::json to_json(const BatchResult& batch) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < batch.cells.size(); ++i) {
    const auto& c = batch.cells[i];
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : batch.trials[i]) trials.push_back(to_json(t));
    cells.push_back({{"name", c.name},
                     {"fingerprint", c.fingerprint},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"failures", c.failures},
                     {"faults", c.faults},
                     {"success_rate", c.success_rate},
                     {"failure_rate", c.failure_rate},
                     {"failure_histogram", c.failure_histogram},
                     {"mean_speed", c.mean_speed},
                     {"sd_speed", c.sd_speed},
                     {"mean_cot", c.mean_cot},
                     {"mean_tripod", c.mean_tripod},
                     {"mean_atypical", c.mean_atypical},
                     {"mean_roll_active", c.mean_roll_active},
                     {"mean_pitch_active", c.mean_pitch_active},
                     {"results", trials}});
  }
  return {{"cells", cells}};
}

}  // namespace beetle::harness

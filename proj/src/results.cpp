#include <fstream>

#include "beetle/harness.hpp"

namespace beetle::harness {

using nlohmann::json;

json to_json(const gait::TrialMetrics& m) {
  json j;
  j["distance_m"] = m.distance_m;
  j["duration_s"] = m.duration_s;
  j["mean_speed"] = m.mean_speed;
  j["success"] = m.success;
  j["failure"] = sim::to_string(m.failure);
  j["support"] = {{"tripod", m.support.tripod},
                  {"atypical", m.support.atypical},
                  {"other", m.support.other},
                  {"tripod_of_classified", m.support.tripod_of_classified},
                  {"atypical_of_classified", m.support.atypical_of_classified},
                  {"analyzed_ticks", m.support.analyzed_ticks}};
  json duty = json::object();
  for (auto leg : kAllLegs) duty[leg_name(leg)] = m.duty_factor[index(leg)];
  j["duty_factor"] = duty;
  if (m.cot) {
    j["cot"] = *m.cot;
  } else {
    j["cot"] = "unbounded";
  }
  j["froude"] = m.froude;
  j["size_ratio"] = m.size_ratio;
  j["weight_ratio"] = m.weight_ratio;
  j["roll_active_pct"] = m.roll_active_pct;
  j["pitch_active_pct"] = m.pitch_active_pct;
  j["energy_j"] = m.energy_j;
  return j;
}

gait::TrialMetrics metrics_from_json(const json& j) {
  gait::TrialMetrics m;
  m.distance_m = j.at("distance_m").get<double>();
  m.duration_s = j.at("duration_s").get<double>();
  m.mean_speed = j.at("mean_speed").get<double>();
  m.success = j.at("success").get<bool>();
  m.failure = sim::failure_from_string(j.at("failure").get<std::string>());
  const auto& s = j.at("support");
  m.support.tripod = s.at("tripod").get<double>();
  m.support.atypical = s.at("atypical").get<double>();
  m.support.other = s.at("other").get<double>();
  m.support.tripod_of_classified = s.at("tripod_of_classified").get<double>();
  m.support.atypical_of_classified = s.at("atypical_of_classified").get<double>();
  m.support.analyzed_ticks = s.at("analyzed_ticks").get<long>();
  for (auto leg : kAllLegs) m.duty_factor[index(leg)] = j.at("duty_factor").at(leg_name(leg)).get<double>();
  if (j.at("cot").is_number()) m.cot = j.at("cot").get<double>();
  m.froude = j.at("froude").get<double>();
  m.size_ratio = j.at("size_ratio").get<double>();
  m.weight_ratio = j.at("weight_ratio").get<double>();
  m.roll_active_pct = j.at("roll_active_pct").get<double>();
  m.pitch_active_pct = j.at("pitch_active_pct").get<double>();
  m.energy_j = j.at("energy_j").get<double>();
  return m;
}

json to_json(const TrialResult& r) {
  json j;
  j["schema"] = 1;
  j["name"] = r.name;
  j["fingerprint"] = r.fingerprint;
  j["seed"] = r.seed;
  j["faulted"] = r.faulted;
  j["fault"] = r.fault;
  j["ticks"] = r.ticks;
  j["trace_path"] = r.trace_path;
  j["trace_hash"] = r.trace_hash;
  j["metrics"] = to_json(r.metrics);
  return j;
}

TrialResult result_from_json(const json& j) {
  if (j.at("schema").get<int>() != 1) throw trace::TraceError("unsupported result schema");
  TrialResult r;
  r.name = j.at("name").get<std::string>();
  r.fingerprint = j.at("fingerprint").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.faulted = j.at("faulted").get<bool>();
  r.fault = j.at("fault").get<std::string>();
  r.ticks = j.at("ticks").get<long>();
  r.trace_path = j.at("trace_path").get<std::string>();
  r.trace_hash = j.at("trace_hash").get<std::string>();
  r.metrics = metrics_from_json(j.at("metrics"));
  return r;
}

std::filesystem::path result_path_for(const std::filesystem::path& trace_path) {
  auto p = trace_path;
  p += ".result.json";
  return p;
}

ReplayReport replay(const std::filesystem::path& trace_path) {
  ReplayReport rep;
  const auto tr = trace::read_trace(trace_path);
  rep.recomputed = analyze_trace(tr);
  const auto rp = result_path_for(trace_path);
  std::ifstream in(rp);
  if (!in) throw trace::TraceError("no stored result next to trace: " + rp.string());
  json j;
  try {
    in >> j;
    rep.stored = result_from_json(j).metrics;
  } catch (const json::exception& e) {
    throw trace::TraceError("bad result file " + rp.string() + ": " + e.what());
  }
  rep.identical = rep.stored == rep.recomputed;
  return rep;
}

}  // namespace beetle::harness

#include <algorithm>
#include <fstream>
#include <sstream>

#include "beetle/harness.hpp"

namespace beetle::harness {

namespace {

constexpr std::array<LegId, kLegCount> kRowOrder{LegId::L1, LegId::L2, LegId::L3, LegId::R1, LegId::R2, LegId::R3};

const char* pattern_colour(gait::SupportPattern p) {
  switch (p) {
    case gait::SupportPattern::TripodA: return "#cfe2f3";
    case gait::SupportPattern::TripodB: return "#d9ead3";
    case gait::SupportPattern::AtypicalA: return "#fce5cd";
    case gait::SupportPattern::AtypicalB: return "#f4cccc";
    case gait::SupportPattern::Other: return "#ffffff";
  }
  return "#ffffff";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<StanceInterval> stance_intervals(std::span<const gait::StanceSet> stance, long first_tick) {
  std::vector<StanceInterval> out;
  for (auto leg : kRowOrder) {
    const auto i = index(leg);
    long start = -1;
    for (std::size_t t = 0; t <= stance.size(); ++t) {
      const bool on = t < stance.size() && stance[t][i];
      if (on && start < 0) start = static_cast<long>(t);
      if (!on && start >= 0) {
        out.push_back({leg, first_tick + start, first_tick + static_cast<long>(t)});
        start = -1;
      }
    }
  }
  return out;
}

std::string gait_diagram_svg(std::span<const gait::StanceSet> stance, long first_tick) {
  const double n = static_cast<double>(std::max<std::size_t>(1, stance.size()));
  const double scale = std::min(4.0, 1600.0 / n);
  const double left = 40, top = 20, row_h = 18, gap = 6;
  const double width = left + n * scale + 20;
  const double height = top + kLegCount * (row_h + gap) + 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Support-pattern background bands.
  std::size_t t = 0;
  while (t < stance.size()) {
    const auto p = gait::classify_support(stance[t]);
    std::size_t e = t;
    while (e < stance.size() && gait::classify_support(stance[e]) == p) ++e;
    if (p != gait::SupportPattern::Other) {
      os << "<rect class=\"" << gait::to_string(p) << "\" x=\"" << left + t * scale << "\" y=\"" << top
         << "\" width=\"" << (e - t) * scale << "\" height=\"" << kLegCount * (row_h + gap)
         << "\" fill=\"" << pattern_colour(p) << "\"/>\n";
    }
    t = e;
  }
  for (std::size_t r = 0; r < kRowOrder.size(); ++r) {
    const double y = top + r * (row_h + gap);
    os << "<text x=\"4\" y=\"" << y + row_h - 4 << "\" font-family=\"monospace\" font-size=\"12\">"
       << leg_name(kRowOrder[r]) << "</text>\n";
  }
  for (const auto& iv : stance_intervals(stance, first_tick)) {
    std::size_t r = 0;
    while (kRowOrder[r] != iv.leg) ++r;
    const double y = top + r * (row_h + gap);
    os << "<rect class=\"stance\" x=\"" << left + (iv.start - first_tick) * scale << "\" y=\"" << y
       << "\" width=\"" << (iv.end - iv.start) * scale << "\" height=\"" << row_h << "\" fill=\"black\"/>\n";
  }
  const double ly = top + kLegCount * (row_h + gap) + 20;
  double lx = left;
  for (auto p : {gait::SupportPattern::TripodA, gait::SupportPattern::TripodB, gait::SupportPattern::AtypicalA,
                 gait::SupportPattern::AtypicalB}) {
    os << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\"" << pattern_colour(p)
       << "\" stroke=\"gray\"/><text x=\"" << lx + 16 << "\" y=\"" << ly
       << "\" font-family=\"monospace\" font-size=\"11\">" << gait::to_string(p) << "</text>\n";
    lx += 110;
  }
  os << "</svg>\n";
  return os.str();
}

GaitDiagramFiles emit_gait_diagram(const trace::GaitTrace& trace, const std::filesystem::path& out_stem) {
  if (trace.rows.empty()) throw gait::AnalysisError("empty trace: no gait diagram written");
  const auto c = config_from_trace(trace);
  const auto stance = gait::stance_series(trace, metrics_options(c).stance);
  const long first = trace.rows.front().tick;
  GaitDiagramFiles files;
  files.svg = out_stem;
  files.svg += ".svg";
  files.csv = out_stem;
  files.csv += ".csv";
  const auto intervals = stance_intervals(stance, first);
  std::string csv = "leg,start_tick,end_tick,duration_ticks\n";
  for (const auto& iv : intervals) {
    csv += std::string(leg_name(iv.leg)) + "," + std::to_string(iv.start) + "," + std::to_string(iv.end) + "," +
           std::to_string(iv.end - iv.start) + "\n";
  }
  files.intervals = intervals.size();
  write_file(files.svg, gait_diagram_svg(stance, first));
  write_file(files.csv, csv);
  return files;
}

}  // namespace beetle::harness

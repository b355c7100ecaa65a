#include "beetle/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace beetle::trace {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, long line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw TraceError("bad number '" + std::string(s) + "' on line " + std::to_string(line));
  }
  return v;
}

long parse_long(std::string_view s, long line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw TraceError("bad integer '" + std::string(s) + "' on line " + std::to_string(line));
  }
  return v;
}

bool parse_flag(std::string_view s, long line) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw TraceError("bad flag '" + std::string(s) + "' on line " + std::to_string(line));
}

constexpr const char* kJointNames[] = {"bc", "cf", "ft"};

std::vector<std::string> build_columns() {
  std::vector<std::string> c{"tick", "time_s"};
  for (const char* kind : {"cmd", "q"}) {
    for (auto leg : kAllLegs) {
      for (const char* j : kJointNames) c.push_back(std::string(kind) + "_" + std::string(leg_name(leg)) + "_" + j);
    }
  }
  for (auto leg : kAllLegs) c.push_back("contact_" + std::string(leg_name(leg)));
  for (auto leg : kAllLegs) c.push_back("fz_" + std::string(leg_name(leg)));
  for (const char* n : {"roll", "pitch", "yaw", "e_roll", "e_pitch", "m_L", "m_R", "gate", "sf_F", "sf_B",
                        "ball_x", "ball_y", "ball_path", "power_w", "hind_slip", "front_slip", "gap",
                        "body_speed", "ball_speed"}) {
    c.push_back(n);
  }
  for (auto leg : kAllLegs) c.push_back("t_" + std::string(leg_name(leg)));
  for (auto leg : kAllLegs) c.push_back("mu_" + std::string(leg_name(leg)));
  for (const char* n : {"ke_delta", "work_in", "penetration", "ball_heading"}) c.push_back(n);
  return c;
}

// Field-by-field serialisation shared by writer and reader.
template <class Visitor>
void visit_row(TraceRow& r, Visitor&& v) {
  v.integer(r.tick);
  v.real(r.time_s);
  for (auto* joints : {&r.command, &r.angle}) {
    for (auto& j : *joints) {
      v.real(j.bc);
      v.real(j.cf);
      v.real(j.ft);
    }
  }
  for (std::size_t i = 0; i < kLegCount; ++i) v.flag(r.contact[i]);
  for (auto& n : r.normal) v.real(n);
  v.real(r.roll_deg);
  v.real(r.pitch_deg);
  v.real(r.yaw_deg);
  v.real(r.e_roll);
  v.real(r.e_pitch);
  v.real(r.m_left);
  v.real(r.m_right);
  v.flag(r.gate);
  v.real(r.sf_front);
  v.real(r.sf_back);
  v.real(r.ball_x);
  v.real(r.ball_y);
  v.real(r.path_length);
  v.real(r.power_w);
  v.flag(r.hind_slip);
  v.flag(r.front_slip);
  v.real(r.gap);
  v.real(r.body_speed);
  v.real(r.ball_speed);
  for (auto& t : r.tangential) v.real(t);
  for (auto& m : r.mu) v.real(m);
  v.real(r.ke_delta);
  v.real(r.work_in);
  v.real(r.penetration);
  v.real(r.ball_heading_deg);
}

struct Writer {
  std::string& out;
  bool first = true;
  void sep() {
    if (!first) out += ',';
    first = false;
  }
  void integer(long& v) {
    sep();
    out += std::to_string(v);
  }
  void real(double& v) {
    sep();
    out += fmt(v);
  }
  void flag(bool& v) {
    sep();
    out += v ? '1' : '0';
  }
};

struct Reader {
  std::vector<std::string_view> cells;
  long line;
  std::size_t k = 0;
  std::string_view next() {
    if (k >= cells.size()) throw TraceError("too few columns on line " + std::to_string(line));
    return cells[k++];
  }
  void integer(long& v) { v = parse_long(next(), line); }
  void real(double& v) { v = parse_double(next(), line); }
  void flag(bool& v) { v = parse_flag(next(), line); }
};

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

const std::string* GaitTrace::header_value(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::vector<std::string>& columns() {
  static const std::vector<std::string> c = build_columns();
  return c;
}

std::string to_csv(const GaitTrace& trace) {
  std::string out;
  out.reserve(trace.rows.size() * 1200 + 8192);
  out += "# beetle-gait-trace schema=" + std::to_string(trace.schema_version) + "\n";
  out += "# dt=" + fmt(trace.dt) + "\n";
  for (const auto& [k, v] : trace.header) out += "# config " + k + "=" + v + "\n";
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (auto row : trace.rows) {
    Writer w{out};
    visit_row(row, w);
    out += '\n';
  }
  out += "# end rows=" + std::to_string(trace.rows.size()) + "\n";
  return out;
}

void write_trace(std::ostream& out, const GaitTrace& trace) {
  out << to_csv(trace);
  if (!out) throw TraceError("trace write failed");
}

void write_trace(const std::filesystem::path& path, const GaitTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError("cannot open " + path.string() + " for writing");
  out << to_csv(trace);
  out.close();
  if (!out) throw TraceError("write failed for " + path.string());
}

GaitTrace read_trace(std::istream& in) {
  GaitTrace t;
  std::string line;
  long lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line.rfind("# beetle-gait-trace schema=", 0) != 0) {
    throw TraceError("not a gait trace (missing schema line)");
  }
  const int version = static_cast<int>(parse_long(std::string_view(line).substr(27), lineno));
  if (version != kTraceSchemaVersion) throw SchemaVersionError(version, kTraceSchemaVersion);
  t.schema_version = version;
  bool have_columns = false;
  while (next_line()) {
    if (line.rfind("# dt=", 0) == 0) {
      t.dt = parse_double(std::string_view(line).substr(5), lineno);
    } else if (line.rfind("# config ", 0) == 0) {
      const auto body = line.substr(9);
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw TraceError("bad config line " + std::to_string(lineno));
      t.header.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (line.rfind("#", 0) == 0) {
      throw TraceError("unexpected comment before columns on line " + std::to_string(lineno));
    } else {
      std::vector<std::string> got;
      for (auto c : split(line, ',')) got.emplace_back(c);
      if (got != columns()) throw TraceError("column header does not match schema " + std::to_string(version));
      have_columns = true;
      break;
    }
  }
  if (!have_columns) throw TraceError("trace truncated: no column header");
  bool ended = false;
  while (next_line()) {
    if (line.rfind("# end rows=", 0) == 0) {
      const long n = parse_long(std::string_view(line).substr(11), lineno);
      if (n != static_cast<long>(t.rows.size())) {
        throw TraceError("trace truncated: trailer says " + std::to_string(n) + " rows, found " +
                         std::to_string(t.rows.size()));
      }
      ended = true;
      break;
    }
    Reader r{split(line, ','), lineno};
    if (r.cells.size() != columns().size()) {
      throw TraceError("trace truncated or corrupt: line " + std::to_string(lineno) + " has " +
                       std::to_string(r.cells.size()) + " columns");
    }
    TraceRow row;
    visit_row(row, r);
    t.rows.push_back(row);
  }
  if (!ended) throw TraceError("trace truncated: missing end marker");
  return t;
}

GaitTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace beetle::trace

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beetle/legs.hpp"

namespace beetle::trace {

inline constexpr int kTraceSchemaVersion = 1;

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaVersionError : public TraceError {
 public:
  SchemaVersionError(int found, int expected)
      : TraceError("trace schema version " + std::to_string(found) + " not supported (expected " +
                   std::to_string(expected) + ")"),
        found_(found) {}
  int found() const { return found_; }

 private:
  int found_;
};

struct TraceRow {
  long tick = 0;
  double time_s = 0.0;
  std::array<Joint3, kLegCount> command{};
  std::array<Joint3, kLegCount> angle{};
  std::array<bool, kLegCount> contact{};
  std::array<double, kLegCount> normal{};
  double roll_deg = 0.0, pitch_deg = 0.0, yaw_deg = 0.0;
  double e_roll = 0.0, e_pitch = 0.0;
  double m_left = 0.0, m_right = 0.0;
  bool gate = false;
  double sf_front = 1.0, sf_back = 1.0;
  double ball_x = 0.0, ball_y = 0.0, path_length = 0.0;
  // Extension columns.
  double power_w = 0.0;
  bool hind_slip = false;
  bool front_slip = false;
  double gap = 0.0;
  double body_speed = 0.0;
  double ball_speed = 0.0;
  std::array<double, kLegCount> tangential{};
  std::array<double, kLegCount> mu{};
  double ke_delta = 0.0;
  double work_in = 0.0;
  double penetration = 0.0;
  double ball_heading_deg = 0.0;

  bool operator==(const TraceRow&) const = default;
};

struct GaitTrace {
  int schema_version = kTraceSchemaVersion;
  double dt = 1.0 / 60.0;
  std::vector<std::pair<std::string, std::string>> header;  // resolved configuration
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  const std::string* header_value(const std::string& key) const;
};

/// Column names in file order.
const std::vector<std::string>& columns();

void write_trace(std::ostream& out, const GaitTrace& trace);
void write_trace(const std::filesystem::path& path, const GaitTrace& trace);
GaitTrace read_trace(std::istream& in);
GaitTrace read_trace(const std::filesystem::path& path);

std::string to_csv(const GaitTrace& trace);

}  // namespace beetle::trace

#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace beetle {

enum class LegId : int { L1 = 0, L2 = 1, L3 = 2, R1 = 3, R2 = 4, R3 = 5 };

inline constexpr std::size_t kLegCount = 6;
inline constexpr std::array<LegId, kLegCount> kAllLegs = {LegId::L1, LegId::L2, LegId::L3,
                                                          LegId::R1, LegId::R2, LegId::R3};

constexpr std::size_t index(LegId leg) { return static_cast<std::size_t>(leg); }
constexpr LegId leg_at(std::size_t i) { return static_cast<LegId>(i); }
constexpr bool is_left(LegId leg) { return index(leg) < 3; }
constexpr bool is_front(LegId leg) { return leg == LegId::L1 || leg == LegId::R1; }
constexpr bool is_middle(LegId leg) { return leg == LegId::L2 || leg == LegId::R2; }
constexpr bool is_hind(LegId leg) { return leg == LegId::L3 || leg == LegId::R3; }
/// +1 for left legs, -1 for right legs.
constexpr double side_sign(LegId leg) { return is_left(leg) ? 1.0 : -1.0; }

constexpr std::string_view leg_name(LegId leg) {
  constexpr std::array<std::string_view, kLegCount> names = {"L1", "L2", "L3", "R1", "R2", "R3"};
  return names[index(leg)];
}

/// Body-coxa, coxa-femur and femur-tibia angles in radians.
struct Joint3 {
  double bc = 0.0;
  double cf = 0.0;
  double ft = 0.0;

  double& operator[](std::size_t k) { return k == 0 ? bc : (k == 1 ? cf : ft); }
  double operator[](std::size_t k) const { return k == 0 ? bc : (k == 1 ? cf : ft); }
  bool operator==(const Joint3&) const = default;
};

/// Joint targets for all legs at one control tick, indexed by LegId.
struct JointCommandFrame {
  std::array<Joint3, kLegCount> legs{};

  Joint3& operator[](LegId leg) { return legs[index(leg)]; }
  const Joint3& operator[](LegId leg) const { return legs[index(leg)]; }
  bool operator==(const JointCommandFrame&) const = default;
};

struct JointLimits {
  Joint3 lo{-1.4, -1.4, -1.4};
  Joint3 hi{1.4, 1.4, 1.4};
};

}  // namespace beetle

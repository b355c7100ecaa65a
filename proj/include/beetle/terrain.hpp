#pragma once

#include <cstdint>
#include <vector>

namespace beetle::sim {

enum class TerrainKind { Flat, Uneven, Wall };

/// Vertical wall along the line through `point` with direction `direction_deg`;
/// the free side is the one the ball starts on.
struct WallSpec {
  double point_x = 0.0;
  double point_y = -0.5;
  double direction_deg = 180.0;
};

// Seeded smooth height field. Flat and Wall terrains have zero height
// everywhere; Uneven is two octaves of value noise rescaled so that the
// height range over the sampling grid equals roughness_ratio * leg_length.
class Terrain {
 public:
  static Terrain flat(double mu_ground = 0.5);
  static Terrain uneven(std::uint64_t seed, double roughness_ratio, double leg_length,
                        double mu_ground = 0.5, double resolution = 0.05,
                        double feature_size = 2.0, double half_extent = 15.0);
  static Terrain wall(WallSpec wall, double mu_ground = 0.5);

  TerrainKind kind() const { return kind_; }
  double height(double x, double y) const;
  /// Central-difference gradient (dh/dx, dh/dy).
  std::pair<double, double> gradient(double x, double y) const;
  double mu_ground() const { return mu_ground_; }
  const WallSpec& wall() const { return wall_; }
  double resolution() const { return resolution_; }
  double half_extent() const { return half_extent_; }

 private:
  double raw_noise(double x, double y) const;
  double lattice(int octave, long ix, long iy) const;

  TerrainKind kind_ = TerrainKind::Flat;
  double mu_ground_ = 0.5;
  WallSpec wall_;
  std::uint64_t seed_ = 0;
  double feature_size_ = 2.0;
  double half_extent_ = 15.0;
  double resolution_ = 0.05;
  double scale_ = 0.0;
  double offset_ = 0.0;
};

double terrain_height(const Terrain& terrain, double x, double y);
Terrain make_uneven_terrain(std::uint64_t seed, double roughness_ratio, double leg_length);

}  // namespace beetle::sim

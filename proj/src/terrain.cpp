#include "beetle/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace beetle::sim {

namespace {

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

Terrain Terrain::flat(double mu_ground) {
  Terrain t;
  t.kind_ = TerrainKind::Flat;
  t.mu_ground_ = mu_ground;
  return t;
}

Terrain Terrain::wall(WallSpec wall, double mu_ground) {
  Terrain t = flat(mu_ground);
  t.kind_ = TerrainKind::Wall;
  t.wall_ = wall;
  return t;
}

Terrain Terrain::uneven(std::uint64_t seed, double roughness_ratio, double leg_length,
                        double mu_ground, double resolution, double feature_size,
                        double half_extent) {
  if (roughness_ratio < 0) throw std::invalid_argument("roughness ratio must be non-negative");
  if (!(resolution > 0) || !(feature_size > 0) || !(half_extent > 0)) {
    throw std::invalid_argument("terrain resolution, feature size and extent must be positive");
  }
  Terrain t;
  t.kind_ = TerrainKind::Uneven;
  t.mu_ground_ = mu_ground;
  t.seed_ = seed;
  t.feature_size_ = feature_size;
  t.half_extent_ = half_extent;
  t.resolution_ = resolution;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const long n = static_cast<long>(std::floor(2.0 * half_extent / resolution)) + 1;
  for (long i = 0; i < n; ++i) {
    const double x = -half_extent + static_cast<double>(i) * resolution;
    for (long j = 0; j < n; ++j) {
      const double v = t.raw_noise(x, -half_extent + static_cast<double>(j) * resolution);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double target = roughness_ratio * leg_length;
  t.scale_ = hi > lo ? target / (hi - lo) : 0.0;
  t.offset_ = -lo * t.scale_;
  return t;
}

double Terrain::lattice(int octave, long ix, long iy) const {
  std::uint64_t h = mix(seed_ ^ mix(static_cast<std::uint64_t>(octave) + 0x51ed270b27b5a5ULL));
  h = mix(h ^ static_cast<std::uint64_t>(ix));
  h = mix(h ^ static_cast<std::uint64_t>(iy) * 0x2545f4914f6cdd1dULL);
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
}

double Terrain::raw_noise(double x, double y) const {
  double sum = 0.0;
  double amplitude = 1.0;
  double cell = feature_size_;
  for (int octave = 0; octave < 2; ++octave) {
    const double fx = x / cell;
    const double fy = y / cell;
    const long ix = static_cast<long>(std::floor(fx));
    const long iy = static_cast<long>(std::floor(fy));
    const double tx = smoothstep(fx - static_cast<double>(ix));
    const double ty = smoothstep(fy - static_cast<double>(iy));
    const double v00 = lattice(octave, ix, iy);
    const double v10 = lattice(octave, ix + 1, iy);
    const double v01 = lattice(octave, ix, iy + 1);
    const double v11 = lattice(octave, ix + 1, iy + 1);
    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    sum += amplitude * (a + (b - a) * ty);
    amplitude *= 0.4;
    cell *= 0.5;
  }
  return sum;
}

double Terrain::height(double x, double y) const {
  if (kind_ != TerrainKind::Uneven) return 0.0;
  x = std::clamp(x, -half_extent_, half_extent_);
  y = std::clamp(y, -half_extent_, half_extent_);
  return raw_noise(x, y) * scale_ + offset_;
}

std::pair<double, double> Terrain::gradient(double x, double y) const {
  if (kind_ != TerrainKind::Uneven) return {0.0, 0.0};
  constexpr double h = 1e-3;
  return {(height(x + h, y) - height(x - h, y)) / (2 * h),
          (height(x, y + h) - height(x, y - h)) / (2 * h)};
}

double terrain_height(const Terrain& terrain, double x, double y) { return terrain.height(x, y); }

Terrain make_uneven_terrain(std::uint64_t seed, double roughness_ratio, double leg_length) {
  return Terrain::uneven(seed, roughness_ratio, leg_length);
}

}  // namespace beetle::sim

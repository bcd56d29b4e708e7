#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hamp/core.hpp"

namespace hamp {

/// Human modeled as a finite set of Cartesian points with optional
/// velocities (zero when omitted).
struct DeterministicHuman {
  std::vector<Vec3> points;
  std::vector<Vec3> velocities;

  DeterministicHuman() = default;
  explicit DeterministicHuman(std::vector<Vec3> pts, std::vector<Vec3> vels = {})
      : points(std::move(pts)), velocities(std::move(vels)) {
    if (points.empty()) throw std::invalid_argument("human needs at least one point");
    if (velocities.empty()) velocities.assign(points.size(), Vec3::Zero());
    if (velocities.size() != points.size())
      throw std::invalid_argument("human velocities must match the number of points");
    for (const auto& p : points)
      if (!p.allFinite()) throw std::invalid_argument("human point coordinates must be finite");
  }
};

/// Regular axis-aligned voxel grid carrying per-voxel occupancy
/// probabilities. Cells are half-open [lo, hi) boxes; the linear index runs
/// x-fastest, then y, then z.
struct OccupancyGrid {
  Vec3 origin{0, 0, 0};
  double voxel_size = 0.1;
  std::array<int, 3> dims{1, 1, 1};
  std::vector<double> pi;

  static OccupancyGrid make(const Vec3& origin, double voxel_size, std::array<int, 3> dims) {
    if (!(voxel_size > 0.0)) throw std::invalid_argument("grid voxel size must be positive");
    for (int d : dims)
      if (d < 1) throw std::invalid_argument("grid dimensions must be at least 1");
    OccupancyGrid g;
    g.origin = origin;
    g.voxel_size = voxel_size;
    g.dims = dims;
    g.pi.assign(g.num_voxels(), 0.0);
    return g;
  }

  std::size_t num_voxels() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }

  std::size_t linear_index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(iz));
  }

  Vec3 voxel_center(std::size_t j) const {
    const auto nx = static_cast<std::size_t>(dims[0]);
    const auto ny = static_cast<std::size_t>(dims[1]);
    const std::size_t ix = j % nx;
    const std::size_t iy = (j / nx) % ny;
    const std::size_t iz = j / (nx * ny);
    return origin + voxel_size * Vec3(static_cast<double>(ix) + 0.5, static_cast<double>(iy) + 0.5,
                                      static_cast<double>(iz) + 0.5);
  }

  /// Linear index of the voxel containing x, or nullopt when x lies outside
  /// the grid. Points on a lower cell face belong to that cell.
  std::optional<std::size_t> voxelize(const Vec3& x) const {
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      const double t = (x[a] - origin[a]) / voxel_size;
      const double f = std::floor(t);
      if (f < 0.0 || f >= static_cast<double>(dims[a])) return std::nullopt;
      idx[a] = static_cast<int>(f);
    }
    return linear_index(idx[0], idx[1], idx[2]);
  }

  void validate() const {
    if (pi.size() != num_voxels())
      throw std::invalid_argument("grid probability array size does not match dimensions");
    for (double p : pi)
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("occupancy probabilities must lie in [0,1]");
  }
};

/// How the occupancy generator interprets its radius parameter. `Radius`
/// reads r as the support radius in meters (pi = 1 - d/r); `InverseRate`
/// reads r as an inverse length (pi = 1 - r*d, support d <= 1/r).
enum class OccupancyFalloff { Radius, InverseRate };

/// Fills a grid with a linear radial occupancy falloff centered at mu.
inline OccupancyGrid radial_occupancy(const OccupancyGrid& shape, const Vec3& mu, double r,
                                      OccupancyFalloff falloff = OccupancyFalloff::Radius) {
  if (!(r > 0.0)) throw std::invalid_argument("radial_occupancy: radius must be positive");
  OccupancyGrid grid = shape;
  grid.pi.assign(grid.num_voxels(), 0.0);
  for (std::size_t j = 0; j < grid.pi.size(); ++j) {
    const double d = (mu - grid.voxel_center(j)).norm();
    const double value = falloff == OccupancyFalloff::Radius ? 1.0 - d / r : 1.0 - r * d;
    grid.pi[j] = std::max(0.0, value);
  }
  return grid;
}

/// Draws one human position from the grid: a voxel sampled with probability
/// proportional to its occupancy, placed at the voxel center. Deterministic
/// for a given seed.
inline DeterministicHuman sample_realization(const OccupancyGrid& grid, std::uint64_t seed) {
  double total = 0.0;
  for (double p : grid.pi) total += p;
  if (!(total > 0.0)) throw std::invalid_argument("sample_realization: grid has no support");
  Rng rng(seed);
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t pick = grid.pi.size() - 1;
  for (std::size_t j = 0; j < grid.pi.size(); ++j) {
    acc += grid.pi[j];
    if (u < acc) {
      pick = j;
      break;
    }
  }
  return DeterministicHuman({grid.voxel_center(pick)});
}

/// Human body centered at `center`, approximated by the center plus six
/// axis-aligned offset points at distance `extent` (head, feet, reach).
/// With extent <= 0 the body collapses to the center point.
inline DeterministicHuman extent_human(const Vec3& center, double extent) {
  if (extent <= 0.0) return DeterministicHuman({center});
  std::vector<Vec3> points = {center};
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 offset = Vec3::Zero();
    offset[axis] = extent;
    points.push_back(center + offset);
    points.push_back(center - offset);
  }
  return DeterministicHuman(std::move(points));
}

/// Keyframed human motion with hold-last extrapolation. Times must be
/// strictly increasing.
struct HumanTimeline {
  struct Keyframe {
    double t = 0.0;
    DeterministicHuman human;
  };
  std::vector<Keyframe> keyframes;

  static HumanTimeline constant(DeterministicHuman human) {
    HumanTimeline tl;
    tl.keyframes.push_back({0.0, std::move(human)});
    return tl;
  }

  void validate() const {
    if (keyframes.empty()) throw std::invalid_argument("timeline needs at least one keyframe");
    for (std::size_t k = 0; k + 1 < keyframes.size(); ++k)
      if (!(keyframes[k].t < keyframes[k + 1].t))
        throw std::invalid_argument("timeline keyframe times must be strictly increasing");
  }

  const DeterministicHuman& at(double t) const {
    std::size_t k = 0;
    while (k + 1 < keyframes.size() && keyframes[k + 1].t <= t) ++k;
    return keyframes[k].human;
  }
};

/// Human snapshot handed to the cost model: either a point set or an
/// occupancy grid.
using HumanState = std::variant<DeterministicHuman, OccupancyGrid>;

struct OccupiedVoxel {
  Vec3 center;
  double pi;
};

/// Centers and probabilities of all voxels with positive occupancy.
inline std::vector<OccupiedVoxel> occupied_voxels(const OccupancyGrid& grid) {
  std::vector<OccupiedVoxel> cells;
  for (std::size_t j = 0; j < grid.pi.size(); ++j)
    if (grid.pi[j] > 0.0) cells.push_back({grid.voxel_center(j), grid.pi[j]});
  return cells;
}

}  // namespace hamp

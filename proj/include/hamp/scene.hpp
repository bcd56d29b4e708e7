#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/robot_model.hpp"

namespace hamp {

struct Sphere {
  Vec3 center{0, 0, 0};
  double radius = 0.0;
};

struct Aabb {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Static workspace obstacles.
struct Scene {
  std::vector<Sphere> spheres;
  std::vector<Aabb> boxes;

  bool empty() const { return spheres.empty() && boxes.empty(); }
};

inline Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

inline double segment_point_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  return (closest_point_on_segment(a, b, p) - p).norm();
}

inline bool segment_hits_sphere(const Vec3& a, const Vec3& b, const Sphere& s) {
  return segment_point_distance(a, b, s.center) <= s.radius;
}

/// Slab-clipping segment/box intersection test.
inline bool segment_hits_aabb(const Vec3& a, const Vec3& b, const Aabb& box) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = b - a;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(d[axis]) < 1e-15) {
      if (a[axis] < box.min[axis] || a[axis] > box.max[axis]) return false;
    } else {
      double ta = (box.min[axis] - a[axis]) / d[axis];
      double tb = (box.max[axis] - a[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

/// Collision test for one configuration. The robot body is approximated by
/// the chain of segments between consecutive points of interest (a single
/// point when only one is defined).
inline bool config_collision_free(const Scene& scene, const RobotModel& model, const VecX& q,
                                  FkBuffer& buf) {
  if (scene.empty()) return true;
  compute_fk(model, q, buf);
  const auto check_segment = [&](const Vec3& a, const Vec3& b) {
    for (const auto& s : scene.spheres)
      if (segment_hits_sphere(a, b, s)) return false;
    for (const auto& box : scene.boxes)
      if (segment_hits_aabb(a, b, box)) return false;
    return true;
  };
  if (buf.poi.size() == 1) return check_segment(buf.poi[0], buf.poi[0]);
  for (std::size_t i = 0; i + 1 < buf.poi.size(); ++i)
    if (!check_segment(buf.poi[i], buf.poi[i + 1])) return false;
  return true;
}

inline bool config_collision_free(const Scene& scene, const RobotModel& model, const VecX& q) {
  FkBuffer buf;
  return config_collision_free(scene, model, q, buf);
}

/// Checks interpolated configurations along qa -> qb at the given joint-space
/// resolution, endpoints included.
inline bool collision_free_segment(const Scene& scene, const RobotModel& model, const VecX& qa,
                                   const VecX& qb, double resolution, FkBuffer& buf) {
  if (scene.empty()) return true;
  const double len = (qb - qa).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    if (!config_collision_free(scene, model, qa + t * (qb - qa), buf)) return false;
  }
  return true;
}

inline bool collision_free_segment(const Scene& scene, const RobotModel& model, const VecX& qa,
                                   const VecX& qb, double resolution = 0.02) {
  FkBuffer buf;
  return collision_free_segment(scene, model, qa, qb, resolution, buf);
}

}  // namespace hamp

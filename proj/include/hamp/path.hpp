#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/robot_model.hpp"

namespace hamp {

/// Ordered list of joint-space waypoints. Consecutive waypoints are distinct
/// except for the degenerate start-equals-goal path.
struct Path {
  std::vector<VecX> waypoints;

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
};

/// Joint-space L2 length.
inline double path_length(const Path& path) {
  double len = 0.0;
  for (std::size_t l = 0; l + 1 < path.waypoints.size(); ++l)
    len += (path.waypoints[l + 1] - path.waypoints[l]).norm();
  return len;
}

/// Execution time under the max-joint-speed model, with no human slowdown.
inline double nominal_time(const RobotModel& model, const Path& path) {
  double t = 0.0;
  for (std::size_t l = 0; l + 1 < path.waypoints.size(); ++l)
    t += segment_min_time(model, path.waypoints[l], path.waypoints[l + 1]);
  return t;
}

/// Splits every segment evenly so no piece is longer than max_step (joint
/// space L2). Endpoints are preserved; collinear insertion leaves both length
/// and nominal time unchanged.
inline Path discretize(const Path& path, double max_step) {
  if (!(max_step > 0.0)) throw std::invalid_argument("discretize: max_step must be positive");
  Path out;
  if (path.waypoints.empty()) return out;
  out.waypoints.push_back(path.waypoints.front());
  for (std::size_t l = 0; l + 1 < path.waypoints.size(); ++l) {
    const VecX& a = path.waypoints[l];
    const VecX& b = path.waypoints[l + 1];
    const double len = (b - a).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_step)));
    for (int i = 1; i < pieces; ++i)
      out.waypoints.push_back(a + (static_cast<double>(i) / pieces) * (b - a));
    out.waypoints.push_back(b);
  }
  return out;
}

}  // namespace hamp

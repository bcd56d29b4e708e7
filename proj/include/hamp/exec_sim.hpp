#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/human.hpp"
#include "hamp/path.hpp"
#include "hamp/robot_model.hpp"
#include "hamp/safety.hpp"

namespace hamp {

/// Piecewise-constant-velocity parametrization of a path: every segment is
/// traversed at the speed that saturates exactly one joint, so the total
/// duration equals the nominal (no-human) execution time.
struct Trajectory {
  Path path;
  std::vector<double> segment_start;     // cumulative nominal time at segment begin
  std::vector<double> segment_duration;  // nonzero segments only match durations > 0
  std::vector<VecX> segment_velocity;
  double total_duration = 0.0;

  bool empty() const { return path.waypoints.size() < 2 || total_duration <= 0.0; }

  /// Configuration and nominal joint velocity at path time p in [0, total].
  void state_at(double p, VecX& q, VecX& qdot) const {
    if (path.waypoints.empty()) throw std::invalid_argument("trajectory has no waypoints");
    if (segment_duration.empty() || p <= 0.0) {
      q = path.waypoints.front();
      qdot = VecX::Zero(path.waypoints.front().size());
      return;
    }
    std::size_t s = 0;
    while (s + 1 < segment_duration.size() && p >= segment_start[s] + segment_duration[s]) ++s;
    const double local = std::clamp(p - segment_start[s], 0.0, segment_duration[s]);
    const VecX& qa = path.waypoints[s];
    const VecX& qb = path.waypoints[s + 1];
    q = qa + (local / segment_duration[s]) * (qb - qa);
    qdot = segment_velocity[s];
  }
};

inline Trajectory parametrize(const RobotModel& model, const Path& path) {
  Trajectory traj;
  traj.path.waypoints.reserve(path.waypoints.size());
  double t = 0.0;
  for (std::size_t l = 0; l + 1 < path.waypoints.size(); ++l) {
    const VecX& qa = path.waypoints[l];
    const VecX& qb = path.waypoints[l + 1];
    if ((qb - qa).norm() < 1e-15) continue;  // degenerate segments are dropped
    if (traj.path.waypoints.empty()) traj.path.waypoints.push_back(qa);
    traj.path.waypoints.push_back(qb);
    traj.segment_start.push_back(t);
    const double dur = segment_min_time(model, qa, qb);
    traj.segment_duration.push_back(dur);
    traj.segment_velocity.push_back(segment_velocity(model, qa, qb));
    t += dur;
  }
  if (traj.path.waypoints.empty() && !path.waypoints.empty())
    traj.path.waypoints.push_back(path.waypoints.front());
  traj.total_duration = t;
  return traj;
}

/// Smallest distance between any robot point of interest and any human point.
inline double min_human_distance(const RobotModel& model, const VecX& q,
                                 const DeterministicHuman& human, FkBuffer& buf) {
  compute_fk(model, q, buf);
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& r : buf.poi)
    for (const auto& h : human.points) dmin = std::min(dmin, (r - h).norm());
  return dmin;
}

inline double min_human_distance(const RobotModel& model, const VecX& q,
                                 const DeterministicHuman& human) {
  FkBuffer buf;
  return min_human_distance(model, q, human, buf);
}

enum class ExecutionOutcome { Completed, SafetyStop };

struct TraceStep {
  double t = 0.0;
  VecX q;
  double s_ovr = 1.0;
  double min_distance = std::numeric_limits<double>::infinity();
};

struct ExecutionTrace {
  double dt = 0.01;
  ExecutionOutcome outcome = ExecutionOutcome::Completed;
  std::vector<TraceStep> steps;
};

struct ExecutionMetrics {
  double t_nom = 0.0;
  double t_ex = 0.0;
  double delay_ratio = 1.0;  // t_ex / t_nom
  double avg_override = 1.0;
  double min_distance = std::numeric_limits<double>::infinity();
  bool success = true;
};

struct ExecutionParams {
  double dt = 0.01;
  double eps_stop = 0.01;       // override below this counts toward a stop
  double stop_timeout = 3.0;    // persistent near-zero override for this long fails the run
  double max_duration = 0.0;    // 0: derived from the nominal time
  bool human_speed_from_timeline = false;  // estimate v_h by finite differences
  bool record_trace = true;
};

struct ExecutionResult {
  ExecutionTrace trace;
  ExecutionMetrics metrics;
};

/// Steps the trajectory forward under the speed-and-separation override: at
/// each tick the commanded (nominal) velocity is scaled by s_ovr computed
/// from the current human state, advancing path progress by s_ovr * dt. The
/// override rescales timing only; the executed geometry is the planned path.
inline ExecutionResult execute(const Trajectory& traj, const RobotModel& model,
                               const SafetyParams& safety, const HumanTimeline& timeline,
                               const ExecutionParams& params = {}) {
  if (!(params.dt > 0.0)) throw std::invalid_argument("execute: dt must be positive");
  timeline.validate();

  ExecutionResult result;
  result.trace.dt = params.dt;
  result.metrics.t_nom = traj.total_duration;
  if (traj.empty()) {
    result.metrics.t_ex = 0.0;
    result.metrics.delay_ratio = 1.0;
    return result;
  }

  const double hard_cap = params.max_duration > 0.0
                              ? params.max_duration
                              : std::max(60.0, 50.0 * traj.total_duration);
  FkBuffer buf;
  VecX q(model.dof()), qdot(model.dof());
  double t = 0.0, progress = 0.0, stopped_for = 0.0;
  double override_sum = 0.0;
  std::size_t steps = 0;
  bool completed = false;

  while (true) {
    const DeterministicHuman& human = timeline.at(t);
    traj.state_at(progress, q, qdot);
    compute_fk(model, q, buf);
    compute_poi_velocities(model, qdot, buf);

    double dmin = std::numeric_limits<double>::infinity();
    double v_max_rh = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < human.points.size(); ++j) {
      for (std::size_t i = 0; i < buf.poi.size(); ++i) {
        const Vec3 d = human.points[j] - buf.poi[i];
        const double dist = d.norm();
        dmin = std::min(dmin, dist);
        if (dist > 1e-12)
          v_max_rh = std::max(v_max_rh, d.dot(buf.poi_velocity[i] - human.velocities[j]) / dist);
        else
          v_max_rh = std::max(v_max_rh, buf.poi_velocity[i].norm());
      }
    }

    double s = 1.0;
    if (!human.points.empty()) {
      SafetyParams active = safety;
      if (params.human_speed_from_timeline && t > 0.0) {
        const DeterministicHuman& prev = timeline.at(t - params.dt);
        double vh = 0.0;
        if (prev.points.size() == human.points.size()) {
          for (std::size_t j = 0; j < human.points.size(); ++j)
            vh = std::max(vh, (human.points[j] - prev.points[j]).norm() / params.dt);
        }
        active.v_h = vh;
      }
      s = speed_override(max_allowed_speed(active, dmin), v_max_rh);
    }

    if (params.record_trace) result.trace.steps.push_back({t, q, s, dmin});
    override_sum += s;
    ++steps;
    result.metrics.min_distance = std::min(result.metrics.min_distance, dmin);

    const double remaining = traj.total_duration - progress;
    if (s > 0.0 && remaining <= s * params.dt) {
      t += remaining / s;  // fractional final step
      progress = traj.total_duration;
      completed = true;
      break;
    }
    progress += s * params.dt;
    t += params.dt;

    if (s < params.eps_stop) {
      stopped_for += params.dt;
      if (stopped_for >= params.stop_timeout) break;
    } else {
      stopped_for = 0.0;
    }
    if (t >= hard_cap) break;  // stalled below nominal progress for far too long
  }

  result.metrics.t_ex = t;
  result.metrics.delay_ratio =
      traj.total_duration > 0.0 ? result.metrics.t_ex / traj.total_duration : 1.0;
  result.metrics.avg_override = steps > 0 ? override_sum / static_cast<double>(steps) : 1.0;
  result.metrics.success = completed;
  result.trace.outcome = completed ? ExecutionOutcome::Completed : ExecutionOutcome::SafetyStop;
  return result;
}

/// Column schema: t, q_0..q_{dof-1}, s_ovr, min_distance.
inline void write_trace_csv(std::ostream& os, const ExecutionTrace& trace, int dof) {
  os << "t";
  for (int k = 0; k < dof; ++k) os << ",q" << k;
  os << ",s_ovr,min_distance\n";
  for (const auto& step : trace.steps) {
    os << step.t;
    for (Eigen::Index k = 0; k < step.q.size(); ++k) os << "," << step.q[k];
    os << "," << step.s_ovr << "," << step.min_distance << "\n";
  }
}

}  // namespace hamp

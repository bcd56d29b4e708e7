#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamp/core.hpp"

namespace hamp {

/// One revolute joint of a serial chain. `origin` is the translation from the
/// parent link frame to the joint frame; `axis` is the (unit) rotation axis
/// expressed in the joint frame.
struct Joint {
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
};

/// A point of interest rigidly attached to a link. Link 0 is the fixed base;
/// link k moves with joints 1..k. `offset` is expressed in the link frame.
struct PoiAttachment {
  int link = 0;
  Vec3 offset{0.0, 0.0, 0.0};
};

/// Serial kinematic chain with joint limits, per-joint speed limits and a set
/// of points of interest used for human-robot distance and speed checks.
class RobotModel {
 public:
  RobotModel(std::vector<Joint> joints, VecX q_min, VecX q_max, VecX qdot_max,
             std::vector<PoiAttachment> poi)
      : joints_(std::move(joints)),
        q_min_(std::move(q_min)),
        q_max_(std::move(q_max)),
        qdot_max_(std::move(qdot_max)),
        poi_(std::move(poi)) {
    const auto d = static_cast<Eigen::Index>(joints_.size());
    if (d == 0) throw std::invalid_argument("robot model needs at least one joint");
    if (q_min_.size() != d || q_max_.size() != d || qdot_max_.size() != d)
      throw std::invalid_argument("joint limit vectors must match the number of joints");
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(q_min_[k] < q_max_[k]))
        throw std::invalid_argument("q_min must be strictly below q_max (joint " + std::to_string(k) + ")");
      if (!(qdot_max_[k] > 0.0))
        throw std::invalid_argument("qdot_max must be positive (joint " + std::to_string(k) + ")");
    }
    if (poi_.empty()) throw std::invalid_argument("robot model needs at least one point of interest");
    for (const auto& p : poi_) {
      if (p.link < 0 || p.link > static_cast<int>(joints_.size()))
        throw std::invalid_argument("point of interest attached to invalid link index");
    }
    for (auto& j : joints_) {
      const double n = j.axis.norm();
      if (n < 1e-12) throw std::invalid_argument("joint axis must be nonzero");
      j.axis /= n;
    }
  }

  int dof() const { return static_cast<int>(joints_.size()); }
  int num_poi() const { return static_cast<int>(poi_.size()); }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<PoiAttachment>& poi() const { return poi_; }
  const VecX& q_min() const { return q_min_; }
  const VecX& q_max() const { return q_max_; }
  const VecX& qdot_max() const { return qdot_max_; }

  bool within_limits(const VecX& q, double tol = 1e-9) const {
    if (q.size() != q_min_.size()) return false;
    for (Eigen::Index k = 0; k < q.size(); ++k)
      if (q[k] < q_min_[k] - tol || q[k] > q_max_[k] + tol) return false;
    return true;
  }

  void check_dimension(const VecX& q) const {
    if (q.size() != static_cast<Eigen::Index>(joints_.size()))
      throw std::invalid_argument("configuration dimension does not match robot dof");
  }

  /// Planar arm with all joints rotating about z and links along local x.
  /// Points of interest sit at every joint origin past the first plus the tip.
  static RobotModel planar(const std::vector<double>& link_lengths, double qdot = 1.0) {
    const int d = static_cast<int>(link_lengths.size());
    std::vector<Joint> joints(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      joints[static_cast<std::size_t>(k)].axis = Vec3(0, 0, 1);
      joints[static_cast<std::size_t>(k)].origin =
          k == 0 ? Vec3(0, 0, 0) : Vec3(link_lengths[static_cast<std::size_t>(k - 1)], 0, 0);
    }
    std::vector<PoiAttachment> poi;
    for (int k = 1; k < d; ++k) poi.push_back({k + 1, Vec3(0, 0, 0)});
    poi.push_back({d, Vec3(link_lengths.back(), 0, 0)});
    const double pi = M_PI;
    return RobotModel(std::move(joints), VecX::Constant(d, -pi), VecX::Constant(d, pi),
                      VecX::Constant(d, qdot), std::move(poi));
  }

  /// Spatial 3-dof arm: base yaw, then two pitch joints. At q = 0 the arm
  /// reaches horizontally along +x with the shoulder lifted by `l1`.
  static RobotModel bench_3dof(double l1 = 0.5, double l2 = 0.5, double l3 = 0.5,
                               double qdot = 3.0) {
    std::vector<Joint> joints = {
        {Vec3(0, 0, 1), Vec3(0, 0, 0)},
        {Vec3(0, 1, 0), Vec3(0, 0, l1)},
        {Vec3(0, 1, 0), Vec3(l2, 0, 0)},
    };
    std::vector<PoiAttachment> poi = {
        {1, Vec3(0, 0, 0)},   // base yaw origin
        {2, Vec3(0, 0, 0)},   // shoulder
        {3, Vec3(0, 0, 0)},   // elbow
        {3, Vec3(l3, 0, 0)},  // tool tip
    };
    VecX qmin(3), qmax(3);
    qmin << -M_PI, -M_PI / 2.0, -M_PI;
    qmax << M_PI, M_PI / 2.0, M_PI;
    return RobotModel(std::move(joints), qmin, qmax, VecX::Constant(3, qdot), std::move(poi));
  }

 private:
  std::vector<Joint> joints_;
  VecX q_min_, q_max_, qdot_max_;
  std::vector<PoiAttachment> poi_;
};

/// Scratch space for forward kinematics, reusable across evaluations to keep
/// the planner's inner loop allocation-free.
struct FkBuffer {
  std::vector<Eigen::Matrix3d> rot;    // world rotation of link k (index k, 0 = base)
  std::vector<Vec3> link_origin;       // world origin of link k
  std::vector<Vec3> joint_axis;        // world axis of joint k (1-based joint k at index k-1)
  std::vector<Vec3> poi;               // world positions of the points of interest
  std::vector<Vec3> poi_velocity;      // world velocities for the last qdot passed

  void resize(const RobotModel& model) {
    const auto d = static_cast<std::size_t>(model.dof());
    rot.resize(d + 1);
    link_origin.resize(d + 1);
    joint_axis.resize(d);
    poi.resize(static_cast<std::size_t>(model.num_poi()));
    poi_velocity.resize(poi.size());
  }
};

/// Computes world link frames and point-of-interest positions for q.
inline void compute_fk(const RobotModel& model, const VecX& q, FkBuffer& buf) {
  model.check_dimension(q);
  buf.resize(model);
  buf.rot[0].setIdentity();
  buf.link_origin[0].setZero();
  const auto& joints = model.joints();
  for (std::size_t k = 0; k < joints.size(); ++k) {
    buf.link_origin[k + 1] = buf.link_origin[k] + buf.rot[k] * joints[k].origin;
    buf.joint_axis[k] = buf.rot[k] * joints[k].axis;
    buf.rot[k + 1].noalias() =
        buf.rot[k] * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(k)], joints[k].axis).toRotationMatrix();
  }
  const auto& poi = model.poi();
  for (std::size_t i = 0; i < poi.size(); ++i) {
    const auto link = static_cast<std::size_t>(poi[i].link);
    buf.poi[i] = buf.link_origin[link] + buf.rot[link] * poi[i].offset;
  }
}

/// Fills buf.poi_velocity with the linear velocities J_i(q) qdot. Requires a
/// preceding compute_fk on the same buffer.
inline void compute_poi_velocities(const RobotModel& model, const VecX& qdot, FkBuffer& buf) {
  const auto& poi = model.poi();
  for (std::size_t i = 0; i < poi.size(); ++i) {
    Vec3 v = Vec3::Zero();
    const int link = poi[i].link;
    for (int k = 0; k < link; ++k)
      v += qdot[k] * buf.joint_axis[static_cast<std::size_t>(k)].cross(
                         buf.poi[i] - buf.link_origin[static_cast<std::size_t>(k) + 1]);
    buf.poi_velocity[i] = v;
  }
}

/// World positions of all points of interest at configuration q.
inline std::vector<Vec3> forward_points(const RobotModel& model, const VecX& q) {
  FkBuffer buf;
  compute_fk(model, q, buf);
  return buf.poi;
}

/// Linear Jacobian of point of interest `poi_index`: a 3 x dof matrix mapping
/// joint velocities to the Cartesian velocity of that point.
inline Eigen::Matrix3Xd linear_jacobian(const RobotModel& model, const VecX& q, int poi_index) {
  if (poi_index < 0 || poi_index >= model.num_poi())
    throw std::invalid_argument("point of interest index out of range");
  FkBuffer buf;
  compute_fk(model, q, buf);
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, model.dof());
  const int link = model.poi()[static_cast<std::size_t>(poi_index)].link;
  const Vec3& p = buf.poi[static_cast<std::size_t>(poi_index)];
  for (int k = 0; k < link; ++k)
    jac.col(k) = buf.joint_axis[static_cast<std::size_t>(k)].cross(
        p - buf.link_origin[static_cast<std::size_t>(k) + 1]);
  return jac;
}

/// Minimum traversal time of the straight segment qa -> qb when at least one
/// joint runs at its speed limit: the max component-wise |dq| / qdot_max.
inline double segment_min_time(const RobotModel& model, const VecX& qa, const VecX& qb) {
  model.check_dimension(qa);
  model.check_dimension(qb);
  double t = 0.0;
  for (Eigen::Index k = 0; k < qa.size(); ++k)
    t = std::max(t, std::abs(qa[k] - qb[k]) / model.qdot_max()[k]);
  return t;
}

/// Joint velocity along the segment direction scaled so exactly one joint
/// saturates its limit. Throws for a degenerate (zero-length) segment.
inline VecX segment_velocity(const RobotModel& model, const VecX& qa, const VecX& qb) {
  model.check_dimension(qa);
  model.check_dimension(qb);
  VecX u = qb - qa;
  const double len = u.norm();
  if (len < 1e-15) throw std::invalid_argument("segment_velocity: degenerate segment");
  u /= len;
  double scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < u.size(); ++k)
    if (u[k] != 0.0) scale = std::min(scale, model.qdot_max()[k] / std::abs(u[k]));
  return scale * u;
}

}  // namespace hamp

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/human.hpp"
#include "hamp/path.hpp"
#include "hamp/robot_model.hpp"
#include "hamp/safety.hpp"

namespace hamp {

/// Cost shaping constants. `nu` is the Tikhonov path-length weight that
/// breaks ties between equal-time paths; `b` weighs the terminal dilation in
/// the multi-goal approximation; `lambda_stop` caps the dilation factor where
/// the safety rules force a full stop, keeping costs finite and ordered.
struct CostWeights {
  double nu = 1e-3;
  double b = 1.2;
  double lambda_stop = 1e3;

  void validate() const {
    if (nu < 0.0 || b < 0.0) throw std::invalid_argument("CostWeights: nu and b must be nonnegative");
    if (!(lambda_stop >= 1.0)) throw std::invalid_argument("CostWeights: lambda_stop must be >= 1");
  }
};

/// One voxel's dilation factor and occupancy probability.
struct LambdaItem {
  double lambda = 1.0;
  double pi = 0.0;
};

/// Probability-mass decomposition of the expected worst-case dilation: the
/// factors sorted in descending order, the probability that each one is the
/// realized maximum, and the probability that no voxel is occupied.
struct DilationMass {
  std::vector<double> lambda;
  std::vector<double> prob;
  double prob_none = 1.0;
};

namespace detail {

/// Descending by lambda, ties broken by descending pi so the result is
/// invariant to the input ordering even with exactly tied factors.
inline void sort_items_desc(std::vector<LambdaItem>& items) {
  std::sort(items.begin(), items.end(), [](const LambdaItem& a, const LambdaItem& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return a.pi > b.pi;
  });
}

}  // namespace detail

/// Full decomposition over voxels with positive occupancy (no pruning).
inline DilationMass dilation_mass(std::vector<LambdaItem> items) {
  std::erase_if(items, [](const LambdaItem& it) { return !(it.pi > 0.0); });
  detail::sort_items_desc(items);
  DilationMass mass;
  mass.lambda.reserve(items.size());
  mass.prob.reserve(items.size());
  double not_occupied = 1.0;
  for (const auto& it : items) {
    mass.lambda.push_back(it.lambda);
    mass.prob.push_back(it.pi * not_occupied);
    not_occupied *= 1.0 - it.pi;
  }
  mass.prob_none = not_occupied;
  return mass;
}

/// Expected value of the worst-case dilation over independently occupied
/// voxels: the probability that voxel y realizes the maximum is its own
/// occupancy times the probability that every worse voxel is empty; when all
/// are empty the dilation is 1. Voxels with lambda exactly 1 cannot change
/// the maximum and are dropped before sorting.
inline double expected_max_dilation(std::vector<LambdaItem> items) {
  std::erase_if(items, [](const LambdaItem& it) { return !(it.pi > 0.0) || it.lambda == 1.0; });
  if (items.empty()) return 1.0;
  detail::sort_items_desc(items);
  double expectation = 0.0;
  double not_occupied = 1.0;
  for (const auto& it : items) {
    expectation += it.lambda * (it.pi * not_occupied);
    not_occupied *= 1.0 - it.pi;
  }
  return expectation + not_occupied;
}

/// Inputs of one dilation evaluation: the configuration (usually a segment
/// midpoint) and the joint-space direction of motion through it.
struct LambdaQuery {
  const RobotModel* model = nullptr;
  const SafetyParams* safety = nullptr;
  VecX q;
  VecX direction;
};

/// Regularized expected-time cost of a path, with the per-segment dilation
/// supplied by the caller. The accumulation order is fixed (one fused term
/// per segment) so independent re-evaluations reproduce planner sums exactly.
template <typename LambdaFn>
double path_cost_with(const RobotModel& model, const Path& path, LambdaFn&& segment_lambda,
                      double nu) {
  double cost = 0.0;
  for (std::size_t l = 0; l + 1 < path.waypoints.size(); ++l) {
    const VecX& qa = path.waypoints[l];
    const VecX& qb = path.waypoints[l + 1];
    const double len = (qb - qa).norm();
    if (len < 1e-15) continue;  // degenerate segment contributes nothing
    const VecX u = (qb - qa) / len;
    const VecX mid = 0.5 * (qa + qb);
    cost += segment_min_time(model, qa, qb) * segment_lambda(mid, u) + nu * len;
  }
  return cost;
}

/// Evaluates time-dilation factors and path costs against one immutable
/// human snapshot. Holds scratch buffers and the per-query evaluation
/// counter, so each planner query owns its own instance.
class CostEvaluator {
 public:
  CostEvaluator(const RobotModel& model, const SafetyParams& safety, const CostWeights& weights,
                HumanState human)
      : model_(&model), safety_(safety), weights_(weights), human_(std::move(human)) {
    safety_.validate();
    weights_.validate();
    if (const auto* grid = std::get_if<OccupancyGrid>(&human_)) {
      grid->validate();
      voxels_ = occupied_voxels(*grid);
      // Row layout for the per-voxel distance/closing kernel (SIMD across
      // voxels), plus a bounding sphere for the far-field short circuit.
      const auto m = static_cast<Eigen::Index>(voxels_.size());
      cx_.resize(m);
      cy_.resize(m);
      cz_.resize(m);
      cell_pi_.resize(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const Vec3& c = voxels_[static_cast<std::size_t>(j)].center;
        cx_[j] = c.x();
        cy_[j] = c.y();
        cz_[j] = c.z();
        cell_pi_[j] = voxels_[static_cast<std::size_t>(j)].pi;
        support_center_ += c;
      }
      if (m > 0) {
        support_center_ /= static_cast<double>(m);
        for (Eigen::Index j = 0; j < m; ++j)
          support_radius_ = std::max(
              support_radius_, (voxels_[static_cast<std::size_t>(j)].center - support_center_).norm());
      }
    }
  }

  const RobotModel& model() const { return *model_; }
  const SafetyParams& safety() const { return safety_; }
  const CostWeights& weights() const { return weights_; }
  const HumanState& human() const { return human_; }
  bool probabilistic() const { return std::holds_alternative<OccupancyGrid>(human_); }

  std::size_t lambda_evaluations() const { return lambda_evaluations_; }
  void reset_lambda_evaluations() { lambda_evaluations_ = 0; }

  /// Time-dilation factor at q when moving along the joint-space direction u.
  double lambda(const VecX& q, const VecX& direction) {
    ++lambda_evaluations_;
    prepare(q, direction);
    if (const auto* human = std::get_if<DeterministicHuman>(&human_)) {
      double worst = 1.0;
      for (std::size_t j = 0; j < human->points.size(); ++j)
        worst = std::max(worst, point_dilation(human->points[j], human->velocities[j]));
      return worst;
    }
    return grid_dilation();
  }

  /// Worst-case dilation at q over all grid directions of joint-velocity
  /// space ({-1,0,1}^dof minus the origin). Used for goal configurations,
  /// where no segment supplies a direction.
  double terminal_lambda(const VecX& q) {
    double worst = 1.0;
    for (const VecX& u : grid_directions())
      worst = std::max(worst, lambda(q, u));
    return worst;
  }

  /// Maximum closing speed between any robot point and the human point h
  /// when the joints move along direction u at the segment's scaled speed.
  /// Pairs with a coincident robot point are skipped (no defined direction).
  double relative_speed_toward(const VecX& q, const VecX& direction, const Vec3& h,
                               const Vec3& hdot) {
    prepare(q, direction);
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fk_.poi.size(); ++i) {
      const Vec3 d = h - fk_.poi[i];
      const double dist = d.norm();
      if (dist < kCoincident) continue;
      v = std::max(v, d.dot(fk_.poi_velocity[i] - hdot) / dist);
    }
    return std::isfinite(v) ? v : 0.0;
  }

  /// Expected-execution-time cost with Tikhonov regularization.
  double path_cost(const Path& path) {
    return path_cost_with(
        *model_, path, [this](const VecX& mid, const VecX& u) { return lambda(mid, u); },
        weights_.nu);
  }

  /// Multi-goal approximation: path length plus the weighted dilation at the
  /// final (goal) configuration only.
  double multi_goal_cost(const Path& path) {
    if (path.waypoints.empty()) throw std::invalid_argument("multi_goal_cost: empty path");
    return path_length(path) + weights_.b * terminal_lambda(path.waypoints.back());
  }

  /// Cost of one tree edge under the expected-time objective. The edge is
  /// split evenly at `resolution` and the dilation sampled per piece, exactly
  /// as path_cost sees it after discretize() at the same step; sparser
  /// sampling lets the optimizer thread segments through unpriced slowdown
  /// pockets.
  double time_edge_cost(const VecX& qa, const VecX& qb, double resolution) {
    const double len = (qb - qa).norm();
    if (len < 1e-15) return 0.0;
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    double cost = 0.0;
    VecX prev = qa;
    for (int i = 1; i <= pieces; ++i) {
      const VecX next =
          i == pieces ? qb : VecX(qa + (static_cast<double>(i) / pieces) * (qb - qa));
      const double piece_len = (next - prev).norm();
      if (piece_len >= 1e-15) {
        const VecX u = (next - prev) / piece_len;
        cost += segment_min_time(*model_, prev, next) * lambda(0.5 * (prev + next), u) +
                weights_.nu * piece_len;
      }
      prev = next;
    }
    return cost;
  }

  const std::vector<VecX>& grid_directions() {
    if (directions_.empty()) {
      const int d = model_->dof();
      std::vector<int> signs(static_cast<std::size_t>(d), -1);
      while (true) {
        VecX u(d);
        for (int k = 0; k < d; ++k) u[k] = signs[static_cast<std::size_t>(k)];
        if (u.norm() > 0.5) directions_.push_back(u / u.norm());
        int k = 0;
        while (k < d && signs[static_cast<std::size_t>(k)] == 1) {
          signs[static_cast<std::size_t>(k)] = -1;
          ++k;
        }
        if (k == d) break;
        ++signs[static_cast<std::size_t>(k)];
      }
    }
    return directions_;
  }

 private:
  static constexpr double kCoincident = 1e-9;

  /// FK + point velocities for motion along `direction` with one joint at
  /// its speed limit.
  void prepare(const VecX& q, const VecX& direction) {
    model_->check_dimension(q);
    if (direction.size() != q.size())
      throw std::invalid_argument("lambda query: direction dimension mismatch");
    const double norm = direction.norm();
    if (norm < 1e-15) throw std::invalid_argument("lambda query: zero direction");
    double scale = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < direction.size(); ++k)
      if (direction[k] != 0.0) scale = std::min(scale, model_->qdot_max()[k] * norm / std::abs(direction[k]));
    qdot_ = (scale / norm) * direction;
    compute_fk(*model_, q, fk_);
    compute_poi_velocities(*model_, qdot_, fk_);
  }

  /// Expected dilation over the occupied voxels given prepared FK state.
  /// Per voxel this matches point_dilation at the voxel center with zero
  /// velocity; the distance/closing reduction runs vectorized over columns.
  double grid_dilation() {
    const Eigen::Index m = centers_.cols();
    if (m == 0) return 1.0;
    // Far-field short circuit: if even the fastest robot point heading
    // straight at the support sphere stays under the speed allowed at its
    // near boundary, every voxel dilation is exactly 1.
    double support_gap = std::numeric_limits<double>::infinity();
    double top_speed = 0.0;
    for (std::size_t i = 0; i < fk_.poi.size(); ++i) {
      support_gap = std::min(support_gap, (fk_.poi[i] - support_center_).norm() - support_radius_);
      top_speed = std::max(top_speed, fk_.poi_velocity[i].norm());
    }
    if (support_gap > 0.0 && top_speed <= max_allowed_speed(safety_, support_gap)) return 1.0;
    dist_.resize(m);
    closing_.resize(m);
    dist_.setConstant(std::numeric_limits<double>::infinity());
    closing_.setConstant(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fk_.poi.size(); ++i) {
      diff_ = centers_.colwise() - fk_.poi[i];
      norm_ = diff_.colwise().norm().transpose().array().max(kCoincident);
      dist_ = dist_.min(norm_);
      closing_ = closing_.max((diff_.transpose() * fk_.poi_velocity[i]).array() / norm_);
    }
    items_.clear();
    for (Eigen::Index j = 0; j < m; ++j) {
      double lam;
      if (dist_[j] <= kCoincident) {
        lam = weights_.lambda_stop;
      } else if (closing_[j] <= 0.0) {
        continue;  // receding: dilation 1, cannot raise the expected maximum
      } else {
        const double v_max = max_allowed_speed(safety_, dist_[j]);
        lam = v_max <= 0.0 ? weights_.lambda_stop
                           : std::clamp(closing_[j] / v_max, 1.0, weights_.lambda_stop);
      }
      if (lam > 1.0) items_.push_back({lam, cell_pi_[j]});
    }
    return expected_max_dilation(items_);
  }

  /// Dilation contribution of a single human point given prepared FK state.
  double point_dilation(const Vec3& h, const Vec3& hdot) const {
    double min_dist = std::numeric_limits<double>::infinity();
    double closing = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fk_.poi.size(); ++i) {
      const Vec3 d = h - fk_.poi[i];
      const double dist = d.norm();
      if (dist < kCoincident) return weights_.lambda_stop;  // inside any margin by definition
      min_dist = std::min(min_dist, dist);
      closing = std::max(closing, d.dot(fk_.poi_velocity[i] - hdot) / dist);
    }
    if (closing <= 0.0) return 1.0;  // receding from this point: no limit active
    const double v_max = max_allowed_speed(safety_, min_dist);
    if (v_max <= 0.0) return weights_.lambda_stop;
    return std::clamp(closing / v_max, 1.0, weights_.lambda_stop);
  }

  const RobotModel* model_;
  SafetyParams safety_;
  CostWeights weights_;
  HumanState human_;
  std::vector<OccupiedVoxel> voxels_;
  Eigen::Matrix3Xd centers_;
  Eigen::ArrayXd cell_pi_, dist_, closing_, norm_;
  Eigen::Matrix3Xd diff_;
  Vec3 support_center_{0, 0, 0};
  double support_radius_ = 0.0;
  std::vector<VecX> directions_;
  std::vector<LambdaItem> items_;
  FkBuffer fk_;
  VecX qdot_;
  std::size_t lambda_evaluations_ = 0;
};

inline double lambda_deterministic(const LambdaQuery& query, const CostWeights& weights,
                                   const DeterministicHuman& human) {
  CostEvaluator eval(*query.model, *query.safety, weights, human);
  return eval.lambda(query.q, query.direction);
}

inline double lambda_probabilistic(const LambdaQuery& query, const CostWeights& weights,
                                   const OccupancyGrid& grid) {
  CostEvaluator eval(*query.model, *query.safety, weights, grid);
  return eval.lambda(query.q, query.direction);
}

inline double relative_speed_toward(const LambdaQuery& query, const Vec3& h, const Vec3& hdot) {
  CostEvaluator eval(*query.model, *query.safety, CostWeights{}, DeterministicHuman({h}, {hdot}));
  return eval.relative_speed_toward(query.q, query.direction, h, hdot);
}

inline double path_cost(const RobotModel& model, const SafetyParams& safety,
                        const CostWeights& weights, const HumanState& human, const Path& path) {
  CostEvaluator eval(model, safety, weights, human);
  return eval.path_cost(path);
}

inline double multi_goal_cost(const RobotModel& model, const SafetyParams& safety,
                              const CostWeights& weights, const HumanState& human,
                              const Path& path) {
  CostEvaluator eval(model, safety, weights, human);
  return eval.multi_goal_cost(path);
}

}  // namespace hamp

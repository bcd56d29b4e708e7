#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/costmap.hpp"
#include "hamp/path.hpp"
#include "hamp/robot_model.hpp"
#include "hamp/scene.hpp"

namespace hamp {

/// Objective minimized by the planner:
///  - MinPath: joint-space path length, human ignored.
///  - Hamp: regularized expected execution time, deterministic human.
///  - HampProbabilistic: same cost with the occupancy-grid dilation.
///  - HampApproximated: path length plus a terminal dilation at the goal.
enum class PlannerMode { MinPath, Hamp, HampProbabilistic, HampApproximated };

inline std::string to_string(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::MinPath: return "min-path";
    case PlannerMode::Hamp: return "hamp";
    case PlannerMode::HampProbabilistic: return "hamp-probabilistic";
    case PlannerMode::HampApproximated: return "hamp-approximated";
  }
  return "unknown";
}

inline PlannerMode planner_mode_from_string(const std::string& name) {
  if (name == "min-path" || name == "minpath") return PlannerMode::MinPath;
  if (name == "hamp") return PlannerMode::Hamp;
  if (name == "hamp-probabilistic" || name == "hamp-prob") return PlannerMode::HampProbabilistic;
  if (name == "hamp-approximated" || name == "hamp-approx") return PlannerMode::HampApproximated;
  throw std::invalid_argument("unknown planner mode: " + name);
}

struct PlanningQuery {
  VecX start;
  std::vector<VecX> goals;
  PlannerMode mode = PlannerMode::MinPath;
  std::size_t max_iterations = 3000;
  double max_seconds = 0.0;  // 0: no wall-clock budget, keeps runs reproducible
  std::uint64_t seed = 0;
};

struct PlannerConfig {
  double steer_step = 0.25;            // max joint-space edge length (rad)
  double goal_bias = 0.05;             // fraction of samples drawn at a goal
  double collision_resolution = 0.02;  // joint-space collision stepping (rad)
  double cost_resolution = 0.1;        // dilation sampling step along edges (rad)
  int max_near = 24;                   // cap on the rewiring neighborhood
  double rewire_gamma = 0.0;           // 0: derived from the joint-box measure
  bool informed = true;                // restrict samples once a solution exists
  bool human_as_obstacle = false;      // treat deterministic human points as spheres
  double human_obstacle_radius = 0.0;  // 0: use the safety margin c
};

struct PlanResult {
  bool found = false;
  Path path;
  double cost = std::numeric_limits<double>::infinity();
  int goal_index = -1;
  std::size_t iterations = 0;
  std::size_t tree_size = 0;
  std::size_t lambda_evaluations = 0;
  bool cost_monotone = true;
  std::vector<std::pair<std::size_t, double>> incumbent_history;  // (iteration, cost)
};

/// Draws configurations uniformly over the joint box, or — once an incumbent
/// solution exists — restricted to the region whose cost lower bound could
/// still improve it (rejection sampling with a fallback onto the start-goal
/// segment, which always satisfies the bound).
class InformedSampler {
 public:
  InformedSampler(const RobotModel& model, PlannerMode mode, double nu, VecX start,
                  std::vector<VecX> goals, std::vector<double> terminal_costs)
      : model_(&model),
        mode_(mode),
        nu_(nu),
        start_(std::move(start)),
        goals_(std::move(goals)),
        terminal_costs_(std::move(terminal_costs)) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < goals_.size(); ++g) {
      const double c = heuristic(start_, goals_[g]) + terminal_costs_[g];
      if (c < best) {
        best = c;
        cheapest_goal_ = g;
      }
    }
  }

  /// Admissible cost-to-go metric between two configurations.
  double heuristic(const VecX& a, const VecX& b) const {
    const double len = (b - a).norm();
    if (mode_ == PlannerMode::Hamp || mode_ == PlannerMode::HampProbabilistic)
      return segment_min_time(*model_, a, b) + nu_ * len;
    return len;
  }

  /// Smallest possible cost of any solution through x.
  double lower_bound_through(const VecX& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < goals_.size(); ++g)
      best = std::min(best, heuristic(start_, x) + heuristic(x, goals_[g]) + terminal_costs_[g]);
    return best;
  }

  VecX sample(Rng& rng, double incumbent_cost) const {
    if (!std::isfinite(incumbent_cost))
      return rng.uniform_vector(model_->q_min(), model_->q_max());
    for (int attempt = 0; attempt < 64; ++attempt) {
      VecX x = rng.uniform_vector(model_->q_min(), model_->q_max());
      if (lower_bound_through(x) <= incumbent_cost) return x;
    }
    // Degenerate informed set: points on the straight segment toward the
    // cheapest goal always satisfy the bound.
    return start_ + rng.uniform01() * (goals_[cheapest_goal_] - start_);
  }

 private:
  const RobotModel* model_;
  PlannerMode mode_;
  double nu_;
  VecX start_;
  std::vector<VecX> goals_;
  std::vector<double> terminal_costs_;
  std::size_t cheapest_goal_ = 0;
};

namespace detail {

inline double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

inline double default_rewire_gamma(const RobotModel& model) {
  const int d = model.dof();
  double volume = 1.0;
  for (Eigen::Index k = 0; k < model.q_min().size(); ++k)
    volume *= model.q_max()[k] - model.q_min()[k];
  const double gamma_star =
      2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d) * std::pow(volume / unit_ball_volume(d), 1.0 / d);
  return 1.25 * gamma_star;
}

}  // namespace detail

/// Sampling-based asymptotically-optimal planner (RRT* with informed
/// sampling) over the joint box, minimizing the cost selected by the query
/// mode. Deterministic for a given seed; anytime (the incumbent cost never
/// increases).
class RrtStarPlanner {
 public:
  RrtStarPlanner(const Scene& scene, const RobotModel& model, const SafetyParams& safety,
                 const HumanState& human, const CostWeights& weights, PlannerConfig config = {})
      : scene_(scene), model_(&model), config_(config), evaluator_(model, safety, weights, human) {
    if (config_.human_as_obstacle) {
      if (const auto* det = std::get_if<DeterministicHuman>(&human)) {
        const double radius =
            config_.human_obstacle_radius > 0.0 ? config_.human_obstacle_radius : safety.c;
        for (const auto& p : det->points) scene_.spheres.push_back({p, radius});
      }
    }
    if (config_.rewire_gamma <= 0.0) config_.rewire_gamma = detail::default_rewire_gamma(model);
  }

  PlanResult plan(const PlanningQuery& query) {
    validate(query);
    evaluator_.reset_lambda_evaluations();
    const PlannerMode mode = query.mode;
    Rng rng(query.seed);

    // Terminal cost constants (multi-goal approximation only).
    std::vector<double> terminal(query.goals.size(), 0.0);
    if (mode == PlannerMode::HampApproximated)
      for (std::size_t g = 0; g < query.goals.size(); ++g)
        terminal[g] = evaluator_.weights().b * evaluator_.terminal_lambda(query.goals[g]);

    PlanResult result;

    // Degenerate query: the start already is a goal configuration.
    for (std::size_t g = 0; g < query.goals.size(); ++g) {
      if ((query.goals[g] - query.start).norm() < 1e-12) {
        result.found = true;
        result.goal_index = static_cast<int>(g);
        result.path.waypoints = {query.start, query.goals[g]};
        result.cost = mode == PlannerMode::HampApproximated ? terminal[g] : 0.0;
        result.tree_size = 1;
        result.lambda_evaluations = evaluator_.lambda_evaluations();
        result.incumbent_history.push_back({0, result.cost});
        return result;
      }
    }

    InformedSampler sampler(*model_, mode, evaluator_.weights().nu, query.start, query.goals,
                            terminal);

    nodes_.clear();
    nodes_.push_back({query.start, -1, 0.0, 0.0, {}});
    std::vector<int> goal_node(query.goals.size(), -1);

    double incumbent = std::numeric_limits<double>::infinity();
    const auto t_begin = std::chrono::steady_clock::now();
    const int dim = model_->dof();
    std::vector<std::pair<double, int>> near;
    FkBuffer collision_buf;

    std::size_t iter = 0;
    for (; iter < query.max_iterations; ++iter) {
      if (query.max_seconds > 0.0 && (iter & 63) == 0) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t_begin;
        if (elapsed.count() > query.max_seconds) break;
      }

      // -- sample
      VecX target;
      if (rng.uniform01() < config_.goal_bias) {
        target = query.goals[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(query.goals.size())))];
      } else if (config_.informed) {
        target = sampler.sample(rng, incumbent);
      } else {
        target = rng.uniform_vector(model_->q_min(), model_->q_max());
      }

      // -- steer from the nearest node
      int nearest = -1;
      double nearest_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const double d2 = (nodes_[n].q - target).squaredNorm();
        if (d2 < nearest_d2) {
          nearest_d2 = d2;
          nearest = static_cast<int>(n);
        }
      }
      const double nearest_dist = std::sqrt(nearest_d2);
      if (nearest_dist < 1e-12) continue;
      VecX q_new = target;
      if (nearest_dist > config_.steer_step)
        q_new = nodes_[static_cast<std::size_t>(nearest)].q +
                (config_.steer_step / nearest_dist) * (target - nodes_[static_cast<std::size_t>(nearest)].q);

      // Skip exact duplicates of an existing goal node; rewiring keeps
      // improving that node's cost-to-come through its neighbors.
      bool duplicate = false;
      for (std::size_t g = 0; g < query.goals.size(); ++g)
        if (goal_node[g] >= 0 && (query.goals[g] - q_new).norm() < 1e-12) duplicate = true;
      if (duplicate) continue;

      if (!collision_free_segment(scene_, *model_, nodes_[static_cast<std::size_t>(nearest)].q, q_new,
                                  config_.collision_resolution, collision_buf))
        continue;

      // -- neighborhood (shrinking ball; max_near keeps the k-nearest of it)
      const double n_count = static_cast<double>(nodes_.size());
      const double ball =
          config_.rewire_gamma * std::pow(std::log(n_count + 1.0) / (n_count + 1.0), 1.0 / dim);
      near.clear();
      for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const double d2 = (nodes_[n].q - q_new).squaredNorm();
        if (d2 <= ball * ball) near.push_back({std::sqrt(d2), static_cast<int>(n)});
      }
      std::sort(near.begin(), near.end());
      if (static_cast<int>(near.size()) > config_.max_near) near.resize(static_cast<std::size_t>(config_.max_near));

      // -- choose the cheapest collision-free parent. Candidates are scanned
      // in lower-bound order: the nominal time is admissible for the dilated
      // edge cost, so a candidate whose bound cannot beat the best true cost
      // needs no dilation evaluation at all.
      std::vector<std::pair<double, int>> candidates;  // (cost lower bound through n, node)
      candidates.reserve(near.size() + 1);
      bool nearest_included = false;
      for (const auto& [dist, n] : near) {
        candidates.push_back({nodes_[static_cast<std::size_t>(n)].cost +
                                  edge_cost_lower_bound(mode, nodes_[static_cast<std::size_t>(n)].q, q_new),
                              n});
        nearest_included |= n == nearest;
      }
      if (!nearest_included)
        candidates.push_back({nodes_[static_cast<std::size_t>(nearest)].cost +
                                  edge_cost_lower_bound(mode, nodes_[static_cast<std::size_t>(nearest)].q, q_new),
                              nearest});
      std::sort(candidates.begin(), candidates.end());

      int parent = -1;
      double cost_new = std::numeric_limits<double>::infinity();
      for (const auto& [bound, n] : candidates) {
        if (bound >= cost_new) break;  // ascending bounds: nothing better left
        const double through =
            nodes_[static_cast<std::size_t>(n)].cost +
            edge_cost(mode, nodes_[static_cast<std::size_t>(n)].q, q_new);
        if (through >= cost_new) continue;
        if (n == nearest ||
            collision_free_segment(scene_, *model_, nodes_[static_cast<std::size_t>(n)].q, q_new,
                                   config_.collision_resolution, collision_buf)) {
          parent = n;
          cost_new = through;
        }
      }
      if (parent < 0) continue;

      const int new_index = static_cast<int>(nodes_.size());
      nodes_.push_back({q_new, parent,
                        cost_new, cost_new - nodes_[static_cast<std::size_t>(parent)].cost, {}});
      nodes_[static_cast<std::size_t>(parent)].children.push_back(new_index);

      // -- rewire the neighborhood through the new node (bound-gated)
      for (const auto& [dist, n] : near) {
        if (n == parent) continue;
        auto& node = nodes_[static_cast<std::size_t>(n)];
        if (cost_new + edge_cost_lower_bound(mode, q_new, node.q) + 1e-12 >= node.cost) continue;
        const double edge = edge_cost(mode, q_new, node.q);
        const double through = cost_new + edge;
        if (through + 1e-12 < node.cost &&
            collision_free_segment(scene_, *model_, q_new, node.q, config_.collision_resolution,
                                   collision_buf)) {
          reparent(n, new_index, edge);
        }
      }

      // -- try to attach goals within the neighborhood radius
      const double goal_radius = std::max(ball, config_.steer_step);
      for (std::size_t g = 0; g < query.goals.size(); ++g) {
        const VecX& goal = query.goals[g];
        const double dist = (goal - q_new).norm();
        if (dist < 1e-12) {
          goal_node[g] = new_index;
          continue;
        }
        if (dist > goal_radius) continue;
        if (goal_node[g] >= 0 &&
            cost_new + edge_cost_lower_bound(mode, q_new, goal) + 1e-12 >=
                nodes_[static_cast<std::size_t>(goal_node[g])].cost)
          continue;
        const double edge = edge_cost(mode, q_new, goal);
        const double through = cost_new + edge;
        if (goal_node[g] < 0) {
          if (collision_free_segment(scene_, *model_, q_new, goal, config_.collision_resolution,
                                     collision_buf)) {
            const int gi = static_cast<int>(nodes_.size());
            nodes_.push_back({goal, new_index, through, edge, {}});
            nodes_[static_cast<std::size_t>(new_index)].children.push_back(gi);
            goal_node[g] = gi;
          }
        } else if (through + 1e-12 < nodes_[static_cast<std::size_t>(goal_node[g])].cost &&
                   collision_free_segment(scene_, *model_, q_new, goal,
                                          config_.collision_resolution, collision_buf)) {
          reparent(goal_node[g], new_index, edge);
        }
      }

      // -- incumbent bookkeeping (rewiring may improve any goal's cost)
      double best = std::numeric_limits<double>::infinity();
      int best_goal = -1;
      for (std::size_t g = 0; g < query.goals.size(); ++g) {
        if (goal_node[g] < 0) continue;
        const double total = nodes_[static_cast<std::size_t>(goal_node[g])].cost + terminal[g];
        if (total < best) {
          best = total;
          best_goal = static_cast<int>(g);
        }
      }
      if (best_goal >= 0) {
        if (best > incumbent + 1e-9) result.cost_monotone = false;
        if (best < incumbent) {
          incumbent = best;
          result.incumbent_history.push_back({iter + 1, best});
          result.goal_index = best_goal;
        }
      }
    }

    result.iterations = iter;
    result.tree_size = nodes_.size();
    result.lambda_evaluations = evaluator_.lambda_evaluations();
    if (result.goal_index >= 0) {
      result.found = true;
      result.cost = incumbent;
      int n = goal_node[static_cast<std::size_t>(result.goal_index)];
      std::vector<VecX> reversed;
      while (n >= 0) {
        reversed.push_back(nodes_[static_cast<std::size_t>(n)].q);
        n = nodes_[static_cast<std::size_t>(n)].parent;
      }
      result.path.waypoints.assign(reversed.rbegin(), reversed.rend());
      // Time-cost paths are returned at the dilation sampling resolution so
      // an external path_cost pass reproduces the reported cost.
      if (mode == PlannerMode::Hamp || mode == PlannerMode::HampProbabilistic)
        result.path = discretize(result.path, config_.cost_resolution);
    }
    return result;
  }

  CostEvaluator& evaluator() { return evaluator_; }

 private:
  struct Node {
    VecX q;
    int parent;
    double cost;       // cost-to-come from the start
    double edge_cost;  // cost of the (parent -> this) edge
    std::vector<int> children;
  };

  void validate(const PlanningQuery& query) const {
    if (query.goals.empty()) throw std::invalid_argument("plan: at least one goal is required");
    if (query.max_iterations == 0 && query.max_seconds <= 0.0)
      throw std::invalid_argument("plan: an iteration or time budget is required");
    model_->check_dimension(query.start);
    if (!model_->within_limits(query.start))
      throw std::invalid_argument("plan: start configuration violates joint limits");
    if (!config_collision_free(scene_, *model_, query.start))
      throw std::invalid_argument("plan: start configuration is in collision");
    for (const auto& g : query.goals) {
      model_->check_dimension(g);
      if (!model_->within_limits(g))
        throw std::invalid_argument("plan: goal configuration violates joint limits");
      if (!config_collision_free(scene_, *model_, g))
        throw std::invalid_argument("plan: goal configuration is in collision");
    }
  }

  double edge_cost(PlannerMode mode, const VecX& qa, const VecX& qb) {
    if (mode == PlannerMode::Hamp || mode == PlannerMode::HampProbabilistic)
      return evaluator_.time_edge_cost(qa, qb, config_.cost_resolution);
    return (qb - qa).norm();
  }

  /// Admissible bound of edge_cost: exact for length objectives, and the
  /// undilated nominal time for expected-time objectives (lambda >= 1).
  double edge_cost_lower_bound(PlannerMode mode, const VecX& qa, const VecX& qb) const {
    const double len = (qb - qa).norm();
    if (mode == PlannerMode::Hamp || mode == PlannerMode::HampProbabilistic)
      return segment_min_time(*model_, qa, qb) + evaluator_.weights().nu * len;
    return len;
  }

  /// Moves `node` under `new_parent` and refreshes cost-to-come in its
  /// subtree, reusing the stored edge costs.
  void reparent(int node, int new_parent, double edge) {
    auto& n = nodes_[static_cast<std::size_t>(node)];
    auto& old_children = nodes_[static_cast<std::size_t>(n.parent)].children;
    old_children.erase(std::find(old_children.begin(), old_children.end(), node));
    n.parent = new_parent;
    n.edge_cost = edge;
    nodes_[static_cast<std::size_t>(new_parent)].children.push_back(node);
    propagation_stack_.clear();
    propagation_stack_.push_back(node);
    while (!propagation_stack_.empty()) {
      const int idx = propagation_stack_.back();
      propagation_stack_.pop_back();
      auto& cur = nodes_[static_cast<std::size_t>(idx)];
      cur.cost = nodes_[static_cast<std::size_t>(cur.parent)].cost + cur.edge_cost;
      for (int child : cur.children) propagation_stack_.push_back(child);
    }
  }

  Scene scene_;
  const RobotModel* model_;
  PlannerConfig config_;
  CostEvaluator evaluator_;
  std::vector<Node> nodes_;
  std::vector<int> propagation_stack_;
};

/// One-shot convenience wrapper.
inline PlanResult plan(const PlanningQuery& query, const Scene& scene, const RobotModel& model,
                       const SafetyParams& safety, const HumanState& human,
                       const CostWeights& weights, const PlannerConfig& config = {}) {
  RrtStarPlanner planner(scene, model, safety, human, weights, config);
  return planner.plan(query);
}

}  // namespace hamp

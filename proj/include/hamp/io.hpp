#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamp/core.hpp"
#include "hamp/costmap.hpp"
#include "hamp/exec_sim.hpp"
#include "hamp/human.hpp"
#include "hamp/path.hpp"
#include "hamp/planner.hpp"
#include "hamp/robot_model.hpp"
#include "hamp/safety.hpp"
#include "hamp/scene.hpp"

namespace hamp {

using json = nlohmann::json;

inline json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json vecx_to_json(const VecX& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

inline VecX vecx_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of numbers");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return v;
}

// ---- robot model ----------------------------------------------------------

inline json to_json(const RobotModel& model) {
  json joints = json::array();
  for (const auto& joint : model.joints())
    joints.push_back({{"axis", vec3_to_json(joint.axis)}, {"origin", vec3_to_json(joint.origin)}});
  json poi = json::array();
  for (const auto& p : model.poi())
    poi.push_back({{"link", p.link}, {"offset", vec3_to_json(p.offset)}});
  return json{{"joints", joints},
              {"q_min", vecx_to_json(model.q_min())},
              {"q_max", vecx_to_json(model.q_max())},
              {"qdot_max", vecx_to_json(model.qdot_max())},
              {"poi", poi}};
}

inline RobotModel robot_model_from_json(const json& j) {
  std::vector<Joint> joints;
  for (const auto& jj : j.at("joints"))
    joints.push_back({vec3_from_json(jj.at("axis")), vec3_from_json(jj.at("origin"))});
  std::vector<PoiAttachment> poi;
  for (const auto& jp : j.at("poi"))
    poi.push_back({jp.at("link").get<int>(), vec3_from_json(jp.at("offset"))});
  return RobotModel(std::move(joints), vecx_from_json(j.at("q_min")), vecx_from_json(j.at("q_max")),
                    vecx_from_json(j.at("qdot_max")), std::move(poi));
}

// ---- safety / weights ------------------------------------------------------

inline void to_json(json& j, const SafetyParams& p) {
  j = json{{"a_s", p.a_s}, {"T_r", p.t_r}, {"C", p.c}, {"v_h", p.v_h}};
}

inline void from_json(const json& j, SafetyParams& p) {
  p.a_s = j.value("a_s", p.a_s);
  p.t_r = j.value("T_r", p.t_r);
  p.c = j.value("C", p.c);
  p.v_h = j.value("v_h", p.v_h);
  p.validate();
}

inline void to_json(json& j, const CostWeights& w) {
  j = json{{"nu", w.nu}, {"b", w.b}, {"lambda_stop", w.lambda_stop}};
}

inline void from_json(const json& j, CostWeights& w) {
  w.nu = j.value("nu", w.nu);
  w.b = j.value("b", w.b);
  w.lambda_stop = j.value("lambda_stop", w.lambda_stop);
  w.validate();
}

// ---- scene -----------------------------------------------------------------

inline void to_json(json& j, const Scene& scene) {
  json spheres = json::array();
  for (const auto& s : scene.spheres)
    spheres.push_back({{"center", vec3_to_json(s.center)}, {"radius", s.radius}});
  json boxes = json::array();
  for (const auto& b : scene.boxes)
    boxes.push_back({{"min", vec3_to_json(b.min)}, {"max", vec3_to_json(b.max)}});
  j = json{{"spheres", spheres}, {"boxes", boxes}};
}

inline void from_json(const json& j, Scene& scene) {
  scene = Scene{};
  for (const auto& js : j.value("spheres", json::array()))
    scene.spheres.push_back({vec3_from_json(js.at("center")), js.at("radius").get<double>()});
  for (const auto& jb : j.value("boxes", json::array()))
    scene.boxes.push_back({vec3_from_json(jb.at("min")), vec3_from_json(jb.at("max"))});
}

// ---- human state -----------------------------------------------------------

inline void to_json(json& j, const OccupancyGrid& grid) {
  j = json{{"origin", vec3_to_json(grid.origin)},
           {"voxel_size", grid.voxel_size},
           {"dims", {grid.dims[0], grid.dims[1], grid.dims[2]}},
           {"pi", grid.pi}};
}

inline void from_json(const json& j, OccupancyGrid& grid) {
  grid = OccupancyGrid::make(
      vec3_from_json(j.at("origin")), j.at("voxel_size").get<double>(),
      {j.at("dims")[0].get<int>(), j.at("dims")[1].get<int>(), j.at("dims")[2].get<int>()});
  grid.pi = j.at("pi").get<std::vector<double>>();
  grid.validate();
}

inline void to_json(json& j, const DeterministicHuman& human) {
  json points = json::array(), velocities = json::array();
  for (const auto& p : human.points) points.push_back(vec3_to_json(p));
  for (const auto& v : human.velocities) velocities.push_back(vec3_to_json(v));
  j = json{{"points", points}, {"velocities", velocities}};
}

inline void from_json(const json& j, DeterministicHuman& human) {
  std::vector<Vec3> points, velocities;
  for (const auto& jp : j.at("points")) points.push_back(vec3_from_json(jp));
  for (const auto& jv : j.value("velocities", json::array())) velocities.push_back(vec3_from_json(jv));
  human = DeterministicHuman(std::move(points), std::move(velocities));
}

inline json human_state_to_json(const HumanState& state) {
  if (const auto* det = std::get_if<DeterministicHuman>(&state)) return json{{"points_set", *det}};
  return json{{"grid", std::get<OccupancyGrid>(state)}};
}

inline HumanState human_state_from_json(const json& j) {
  if (j.contains("points_set")) return j.at("points_set").get<DeterministicHuman>();
  if (j.contains("points")) return j.get<DeterministicHuman>();
  if (j.contains("grid")) return j.at("grid").get<OccupancyGrid>();
  throw std::invalid_argument("human state needs either \"points\" or \"grid\"");
}

inline void to_json(json& j, const HumanTimeline& timeline) {
  json frames = json::array();
  for (const auto& kf : timeline.keyframes) frames.push_back({{"t", kf.t}, {"human", kf.human}});
  j = json{{"keyframes", frames}};
}

inline void from_json(const json& j, HumanTimeline& timeline) {
  timeline.keyframes.clear();
  for (const auto& jf : j.at("keyframes"))
    timeline.keyframes.push_back({jf.at("t").get<double>(), jf.at("human").get<DeterministicHuman>()});
  timeline.validate();
}

// ---- path / planner --------------------------------------------------------

inline void to_json(json& j, const Path& path) {
  json wps = json::array();
  for (const auto& q : path.waypoints) wps.push_back(vecx_to_json(q));
  j = json{{"waypoints", wps}};
}

inline void from_json(const json& j, Path& path) {
  path.waypoints.clear();
  for (const auto& jw : j.at("waypoints")) path.waypoints.push_back(vecx_from_json(jw));
}

inline void to_json(json& j, const PlannerConfig& c) {
  j = json{{"steer_step", c.steer_step},
           {"goal_bias", c.goal_bias},
           {"collision_resolution", c.collision_resolution},
           {"max_near", c.max_near},
           {"rewire_gamma", c.rewire_gamma},
           {"informed", c.informed},
           {"human_as_obstacle", c.human_as_obstacle},
           {"human_obstacle_radius", c.human_obstacle_radius}};
}

inline void from_json(const json& j, PlannerConfig& c) {
  c.steer_step = j.value("steer_step", c.steer_step);
  c.goal_bias = j.value("goal_bias", c.goal_bias);
  c.collision_resolution = j.value("collision_resolution", c.collision_resolution);
  c.max_near = j.value("max_near", c.max_near);
  c.rewire_gamma = j.value("rewire_gamma", c.rewire_gamma);
  c.informed = j.value("informed", c.informed);
  c.human_as_obstacle = j.value("human_as_obstacle", c.human_as_obstacle);
  c.human_obstacle_radius = j.value("human_obstacle_radius", c.human_obstacle_radius);
}

inline void to_json(json& j, const ExecutionParams& p) {
  j = json{{"dt", p.dt},
           {"eps_stop", p.eps_stop},
           {"stop_timeout", p.stop_timeout},
           {"max_duration", p.max_duration},
           {"human_speed_from_timeline", p.human_speed_from_timeline}};
}

inline void from_json(const json& j, ExecutionParams& p) {
  p.dt = j.value("dt", p.dt);
  p.eps_stop = j.value("eps_stop", p.eps_stop);
  p.stop_timeout = j.value("stop_timeout", p.stop_timeout);
  p.max_duration = j.value("max_duration", p.max_duration);
  p.human_speed_from_timeline = j.value("human_speed_from_timeline", p.human_speed_from_timeline);
}

// ---- scenario file ---------------------------------------------------------

/// Everything a single planning/execution query needs besides the query
/// itself. Omitted sections fall back to the desk defaults.
struct Scenario {
  RobotModel robot = RobotModel::bench_3dof();
  SafetyParams safety{};
  CostWeights weights{};
  Scene scene{};
  HumanState human = DeterministicHuman({Vec3(0.6, 0.3, 0.6)});
};

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  if (j.contains("robot")) s.robot = robot_model_from_json(j.at("robot"));
  if (j.contains("safety")) s.safety = j.at("safety").get<SafetyParams>();
  if (j.contains("weights")) s.weights = j.at("weights").get<CostWeights>();
  if (j.contains("scene")) s.scene = j.at("scene").get<Scene>();
  if (j.contains("human")) {
    const json& jh = j.at("human");
    if (jh.contains("radial")) {
      const json& jr = jh.at("radial");
      auto shape = OccupancyGrid::make(
          vec3_from_json(jr.at("origin")), jr.at("voxel_size").get<double>(),
          {jr.at("dims")[0].get<int>(), jr.at("dims")[1].get<int>(), jr.at("dims")[2].get<int>()});
      const auto falloff = jr.value("falloff", std::string("radius")) == "inverse-rate"
                               ? OccupancyFalloff::InverseRate
                               : OccupancyFalloff::Radius;
      s.human = radial_occupancy(shape, vec3_from_json(jr.at("mu")), jr.at("radius").get<double>(),
                                 falloff);
    } else {
      s.human = human_state_from_json(jh);
    }
  }
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  return json{{"robot", to_json(s.robot)},
              {"safety", s.safety},
              {"weights", s.weights},
              {"scene", s.scene},
              {"human", human_state_to_json(s.human)}};
}

// ---- file helpers ----------------------------------------------------------

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const json& j, int indent = 2) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(indent) << "\n";
}

}  // namespace hamp

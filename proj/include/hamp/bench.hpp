#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hamp/core.hpp"
#include "hamp/costmap.hpp"
#include "hamp/exec_sim.hpp"
#include "hamp/human.hpp"
#include "hamp/io.hpp"
#include "hamp/planner.hpp"

namespace hamp {

enum class ExperimentKind { A, B, C };

inline std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::A: return "A";
    case ExperimentKind::B: return "B";
    case ExperimentKind::C: return "C";
  }
  return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "A" || s == "a") return ExperimentKind::A;
  if (s == "B" || s == "b") return ExperimentKind::B;
  if (s == "C" || s == "c") return ExperimentKind::C;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

/// Benchmark configuration. Experiment kinds:
///  A: static human at a random workspace point, MIN-PATH vs HAMP.
///  B: human relocates mid-execution by sampling the occupancy grid;
///     adds HAMP-Probabilistic, which plans against the grid.
///  C: multiple equivalent goals with a static human; adds HAMP-Approximated.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::A;
  int num_queries = 50;
  int repetitions = 3;
  std::uint64_t master_seed = 1;
  std::vector<PlannerMode> planners;  // empty: defaults for the kind

  RobotModel robot = RobotModel::bench_3dof();
  // Desk-scale braking/reaction constants: a gentler deceleration and longer
  // reaction time widen the survivable slowdown shell so execution-time
  // differences are measurable (binary stop-or-clean outcomes carry no
  // signal at this workspace size).
  SafetyParams safety{1.0, 0.25, 0.2, 0.0};
  CostWeights weights{};
  Scene scene{};

  // Occupancy model: the grid covers the arm's reachable box; human centers
  // are drawn from the central interaction zone, where a collaborating
  // human actually stands in the cell.
  Aabb workspace{Vec3(-1.0, -1.0, -0.5), Vec3(1.0, 1.0, 1.5)};
  Aabb mu_box{Vec3(-0.85, -0.85, 0.05), Vec3(0.85, 0.85, 0.95)};
  double occupancy_radius = 0.5;
  double voxel_size = 0.1;
  OccupancyFalloff falloff = OccupancyFalloff::Radius;
  double human_extent = 0.2;  // body half-extent around the sampled center

  int goals_per_query = 0;  // 0: 1 for kinds A/B, 20 for kind C
  std::size_t plan_iterations = 2200;
  PlannerConfig planner_config{};
  ExecutionParams execution{};
  double relocation_fraction = 0.5;  // kind B: human moves at this fraction of t_nom
  int relocation_count = 1;
  int threads = 0;  // 0: hardware concurrency

  std::vector<PlannerMode> resolved_planners() const {
    if (!planners.empty()) return planners;
    switch (kind) {
      case ExperimentKind::A: return {PlannerMode::MinPath, PlannerMode::Hamp};
      case ExperimentKind::B:
        return {PlannerMode::MinPath, PlannerMode::Hamp, PlannerMode::HampProbabilistic};
      case ExperimentKind::C:
        return {PlannerMode::MinPath, PlannerMode::Hamp, PlannerMode::HampApproximated};
    }
    return {};
  }

  int resolved_goals() const {
    if (goals_per_query > 0) return goals_per_query;
    return kind == ExperimentKind::C ? 20 : 1;
  }

  void validate() const {
    if (num_queries < 1 || repetitions < 1)
      throw std::invalid_argument("experiment needs at least one query and one repetition");
    if (!(occupancy_radius > 0.0) || !(voxel_size > 0.0))
      throw std::invalid_argument("occupancy radius and voxel size must be positive");
  }
};

/// One planner run on one query repetition. Everything the aggregation needs
/// is kept here so reports can be recomputed from the raw records alone.
struct RunRecord {
  std::string experiment;
  int query = 0;
  int rep = 0;
  std::string planner;
  std::uint64_t seed = 0;

  bool plan_found = false;
  double cost_reported = 0.0;
  double cost_recomputed = 0.0;
  bool cost_monotone = true;
  std::uint64_t iterations = 0;
  std::uint64_t tree_size = 0;
  std::uint64_t lambda_evals = 0;
  int waypoints = 0;
  double path_length = 0.0;
  double t_nom = 0.0;

  bool success = false;
  double t_ex = 0.0;
  double delay_ratio = 0.0;
  double avg_override = 0.0;
  double min_distance = 0.0;
};

inline void to_json(json& j, const RunRecord& r) {
  j = json{{"experiment", r.experiment},
           {"query", r.query},
           {"rep", r.rep},
           {"planner", r.planner},
           {"seed", r.seed},
           {"plan_found", r.plan_found},
           {"cost_reported", r.cost_reported},
           {"cost_recomputed", r.cost_recomputed},
           {"cost_monotone", r.cost_monotone},
           {"iterations", r.iterations},
           {"tree_size", r.tree_size},
           {"lambda_evals", r.lambda_evals},
           {"waypoints", r.waypoints},
           {"path_length", r.path_length},
           {"t_nom", r.t_nom},
           {"success", r.success},
           {"t_ex", r.t_ex},
           {"delay_ratio", r.delay_ratio},
           {"avg_override", r.avg_override},
           {"min_distance", r.min_distance}};
}

inline void from_json(const json& j, RunRecord& r) {
  r.experiment = j.at("experiment").get<std::string>();
  r.query = j.at("query").get<int>();
  r.rep = j.at("rep").get<int>();
  r.planner = j.at("planner").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.plan_found = j.at("plan_found").get<bool>();
  r.cost_reported = j.at("cost_reported").get<double>();
  r.cost_recomputed = j.at("cost_recomputed").get<double>();
  r.cost_monotone = j.at("cost_monotone").get<bool>();
  r.iterations = j.at("iterations").get<std::uint64_t>();
  r.tree_size = j.at("tree_size").get<std::uint64_t>();
  r.lambda_evals = j.at("lambda_evals").get<std::uint64_t>();
  r.waypoints = j.at("waypoints").get<int>();
  r.path_length = j.at("path_length").get<double>();
  r.t_nom = j.at("t_nom").get<double>();
  r.success = j.at("success").get<bool>();
  r.t_ex = j.at("t_ex").get<double>();
  r.delay_ratio = j.at("delay_ratio").get<double>();
  r.avg_override = j.at("avg_override").get<double>();
  r.min_distance = j.at("min_distance").get<double>();
}

/// Per-query metric ratios against the baseline planner's median. NaN marks
/// a value that could not be normalized (failed run or missing baseline).
struct NormalizedRecord {
  int query = 0;
  int rep = 0;
  std::string planner;
  double norm_length = std::numeric_limits<double>::quiet_NaN();
  double norm_time = std::numeric_limits<double>::quiet_NaN();
  double norm_delay = std::numeric_limits<double>::quiet_NaN();
};

struct MetricStats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

struct PlannerAggregate {
  std::string planner;
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t planning_failures = 0;
  double success_rate = 0.0;
  MetricStats norm_length, norm_time, norm_delay;
  double mean_lambda_evals = 0.0;
};

struct AggregateReport {
  int schema_version = 1;
  std::string experiment;
  std::string baseline;
  std::vector<PlannerAggregate> planners;
  std::vector<int> queries_without_baseline_length;
  std::vector<int> queries_without_baseline_time;

  const PlannerAggregate* find(const std::string& planner) const {
    for (const auto& p : planners)
      if (p.planner == planner) return &p;
    return nullptr;
  }
};

namespace detail {

inline double median_of(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
  } else {
    s.stddev = 0.0;
  }
  s.median = median_of(values);
  return s;
}

}  // namespace detail

/// Divides every run's metrics by the baseline planner's per-query median:
/// lengths by the median over runs that found a path, execution time and
/// delay by the median over successful runs. Queries whose baseline never
/// produced the respective value yield NaN and are excluded from aggregates.
inline std::vector<NormalizedRecord> normalize_records(const std::vector<RunRecord>& records,
                                                       const std::string& baseline) {
  std::map<int, std::vector<double>> base_lengths, base_times, base_delays;
  for (const auto& r : records) {
    if (r.planner != baseline) continue;
    if (r.plan_found) base_lengths[r.query].push_back(r.path_length);
    if (r.success) {
      base_times[r.query].push_back(r.t_ex);
      base_delays[r.query].push_back(r.delay_ratio);
    }
  }
  std::map<int, double> med_length, med_time, med_delay;
  for (auto& [q, v] : base_lengths) med_length[q] = detail::median_of(v);
  for (auto& [q, v] : base_times) med_time[q] = detail::median_of(v);
  for (auto& [q, v] : base_delays) med_delay[q] = detail::median_of(v);

  std::vector<NormalizedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    NormalizedRecord n;
    n.query = r.query;
    n.rep = r.rep;
    n.planner = r.planner;
    if (r.plan_found && med_length.count(r.query) && med_length[r.query] > 0.0)
      n.norm_length = r.path_length / med_length[r.query];
    if (r.success && med_time.count(r.query) && med_time[r.query] > 0.0)
      n.norm_time = r.t_ex / med_time[r.query];
    if (r.success && med_delay.count(r.query) && med_delay[r.query] > 0.0)
      n.norm_delay = r.delay_ratio / med_delay[r.query];
    out.push_back(std::move(n));
  }
  return out;
}

inline AggregateReport aggregate(const std::vector<RunRecord>& records,
                                 const std::string& baseline = "min-path") {
  AggregateReport report;
  report.baseline = baseline;
  if (!records.empty()) report.experiment = records.front().experiment;

  const auto normalized = normalize_records(records, baseline);

  std::vector<std::string> order;
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.planner) == order.end()) order.push_back(r.planner);

  std::map<int, bool> has_base_len, has_base_time;
  for (const auto& r : records) {
    if (r.planner != baseline) continue;
    has_base_len[r.query] = has_base_len[r.query] || r.plan_found;
    has_base_time[r.query] = has_base_time[r.query] || r.success;
  }
  for (const auto& [q, ok] : has_base_len)
    if (!ok) report.queries_without_baseline_length.push_back(q);
  for (const auto& [q, ok] : has_base_time)
    if (!ok) report.queries_without_baseline_time.push_back(q);

  for (const auto& name : order) {
    PlannerAggregate agg;
    agg.planner = name;
    std::vector<double> lens, times, delays;
    double eval_sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.planner != name) continue;
      ++agg.runs;
      if (r.success) ++agg.successes;
      if (!r.plan_found) ++agg.planning_failures;
      eval_sum += static_cast<double>(r.lambda_evals);
      const auto& n = normalized[i];
      if (std::isfinite(n.norm_length)) lens.push_back(n.norm_length);
      if (std::isfinite(n.norm_time)) times.push_back(n.norm_time);
      if (std::isfinite(n.norm_delay)) delays.push_back(n.norm_delay);
    }
    agg.success_rate = agg.runs ? static_cast<double>(agg.successes) / static_cast<double>(agg.runs) : 0.0;
    agg.mean_lambda_evals = agg.runs ? eval_sum / static_cast<double>(agg.runs) : 0.0;
    agg.norm_length = detail::stats_of(lens);
    agg.norm_time = detail::stats_of(times);
    agg.norm_delay = detail::stats_of(delays);
    report.planners.push_back(std::move(agg));
  }
  return report;
}

inline void to_json(json& j, const MetricStats& s) {
  j = json{{"mean", s.mean}, {"stddev", s.stddev}, {"median", s.median}, {"count", s.count}};
}

inline void to_json(json& j, const PlannerAggregate& a) {
  j = json{{"planner", a.planner},
           {"runs", a.runs},
           {"successes", a.successes},
           {"planning_failures", a.planning_failures},
           {"success_rate", a.success_rate},
           {"normalized_path_length", a.norm_length},
           {"normalized_execution_time", a.norm_time},
           {"normalized_safety_delay", a.norm_delay},
           {"mean_lambda_evaluations", a.mean_lambda_evals}};
}

inline void to_json(json& j, const AggregateReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"experiment", r.experiment},
           {"baseline", r.baseline},
           {"planners", r.planners},
           {"queries_without_baseline_length", r.queries_without_baseline_length},
           {"queries_without_baseline_time", r.queries_without_baseline_time}};
}

struct ExperimentResult {
  std::vector<RunRecord> records;
  AggregateReport report;
  std::vector<std::string> events;  // resampling and other noteworthy incidents
};

namespace detail {

struct QueryCase {
  VecX start;
  std::vector<VecX> goals;
  Vec3 mu;
  OccupancyGrid grid;
};

/// Uniform collision-free configuration; resampling events are appended to
/// `events` after repeated rejections.
inline VecX sample_free_config(const RobotModel& model, const Scene& scene, Rng& rng,
                               std::vector<std::string>* events, int query_index) {
  FkBuffer buf;
  for (int outer = 0; outer < 10; ++outer) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      VecX q = rng.uniform_vector(model.q_min(), model.q_max());
      if (config_collision_free(scene, model, q, buf)) return q;
    }
    if (events)
      events->push_back("query " + std::to_string(query_index) +
                        ": configuration sampling exceeded 200 rejections, resampling");
  }
  throw std::runtime_error("could not sample a collision-free configuration");
}

inline QueryCase build_query_case(const ExperimentSpec& spec, int qi,
                                  std::vector<std::string>* events) {
  QueryCase qc;
  Rng rng_cfg(mix_seed({spec.master_seed, 1, static_cast<std::uint64_t>(qi)}));
  qc.start = sample_free_config(spec.robot, spec.scene, rng_cfg, events, qi);
  const int n_goals = spec.resolved_goals();
  for (int g = 0; g < n_goals; ++g)
    qc.goals.push_back(sample_free_config(spec.robot, spec.scene, rng_cfg, events, qi));

  Rng rng_mu(mix_seed({spec.master_seed, 2, static_cast<std::uint64_t>(qi)}));
  qc.mu = Vec3(rng_mu.uniform(spec.mu_box.min.x(), spec.mu_box.max.x()),
               rng_mu.uniform(spec.mu_box.min.y(), spec.mu_box.max.y()),
               rng_mu.uniform(spec.mu_box.min.z(), spec.mu_box.max.z()));

  const Vec3 span = spec.workspace.max - spec.workspace.min;
  const std::array<int, 3> dims = {
      std::max(1, static_cast<int>(std::ceil(span.x() / spec.voxel_size))),
      std::max(1, static_cast<int>(std::ceil(span.y() / spec.voxel_size))),
      std::max(1, static_cast<int>(std::ceil(span.z() / spec.voxel_size)))};
  auto shape = OccupancyGrid::make(spec.workspace.min, spec.voxel_size, dims);
  qc.grid = radial_occupancy(shape, qc.mu, spec.occupancy_radius, spec.falloff);
  return qc;
}

inline HumanState plan_human_for(PlannerMode mode, const ExperimentSpec& spec, const QueryCase& qc,
                                 const DeterministicHuman& initial) {
  switch (mode) {
    case PlannerMode::MinPath: return DeterministicHuman{};  // ignored
    case PlannerMode::HampProbabilistic: return qc.grid;
    case PlannerMode::Hamp:
    case PlannerMode::HampApproximated:
      return spec.kind == ExperimentKind::B ? initial : extent_human(qc.mu, spec.human_extent);
  }
  return DeterministicHuman{};
}

inline double recompute_cost(PlannerMode mode, const ExperimentSpec& spec, const HumanState& human,
                             const Path& path) {
  switch (mode) {
    case PlannerMode::MinPath: return path_length(path);
    case PlannerMode::Hamp:
    case PlannerMode::HampProbabilistic:
      return path_cost(spec.robot, spec.safety, spec.weights, human, path);
    case PlannerMode::HampApproximated:
      return multi_goal_cost(spec.robot, spec.safety, spec.weights, human, path);
  }
  return 0.0;
}

}  // namespace detail

/// Runs every (query, repetition, planner) combination, executes the planned
/// paths against the scripted human, and aggregates metrics normalized by the
/// MIN-PATH per-query medians. Fully reproducible from the master seed; the
/// work pool only affects wall-clock time, not results.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto planners = spec.resolved_planners();
  const int n_queries = spec.num_queries;

  std::vector<std::vector<RunRecord>> per_query(static_cast<std::size_t>(n_queries));
  std::vector<std::vector<std::string>> per_query_events(static_cast<std::size_t>(n_queries));

  ExecutionParams exec = spec.execution;
  exec.record_trace = false;

  auto run_query = [&](int qi) {
    auto& records = per_query[static_cast<std::size_t>(qi)];
    auto& events = per_query_events[static_cast<std::size_t>(qi)];
    const auto qc = detail::build_query_case(spec, qi, &events);

    for (int rep = 0; rep < spec.repetitions; ++rep) {
      // Human realizations shared by all planners of this repetition. The
      // sampled centers stand in for a body spanning `human_extent`.
      DeterministicHuman initial = extent_human(qc.mu, spec.human_extent);
      std::vector<DeterministicHuman> relocations;
      if (spec.kind == ExperimentKind::B) {
        auto center_at = [&](int m) {
          return sample_realization(
                     qc.grid, mix_seed({spec.master_seed, 3, static_cast<std::uint64_t>(qi),
                                        static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(m)}))
              .points.front();
        };
        initial = extent_human(center_at(0), spec.human_extent);
        for (int m = 0; m < spec.relocation_count; ++m)
          relocations.push_back(extent_human(center_at(m + 1), spec.human_extent));
      }

      for (const auto mode : planners) {
        RunRecord rec;
        rec.experiment = to_string(spec.kind);
        rec.query = qi;
        rec.rep = rep;
        rec.planner = to_string(mode);
        rec.seed = mix_seed({spec.master_seed, 4, static_cast<std::uint64_t>(qi),
                             static_cast<std::uint64_t>(rep),
                             static_cast<std::uint64_t>(static_cast<int>(mode))});

        const HumanState plan_human = detail::plan_human_for(mode, spec, qc, initial);

        PlanningQuery query;
        query.start = qc.start;
        query.goals = qc.goals;
        query.mode = mode;
        query.max_iterations = spec.plan_iterations;
        query.max_seconds = 0.0;
        query.seed = rec.seed;

        RrtStarPlanner planner(spec.scene, spec.robot, spec.safety, plan_human, spec.weights,
                               spec.planner_config);
        const PlanResult plan = planner.plan(query);

        rec.plan_found = plan.found;
        rec.cost_monotone = plan.cost_monotone;
        rec.iterations = plan.iterations;
        rec.tree_size = plan.tree_size;
        rec.lambda_evals = plan.lambda_evaluations;

        if (plan.found) {
          rec.cost_reported = plan.cost;
          rec.cost_recomputed = detail::recompute_cost(mode, spec, plan_human, plan.path);
          rec.waypoints = static_cast<int>(plan.path.waypoints.size());
          rec.path_length = path_length(plan.path);

          const Trajectory traj = parametrize(spec.robot, plan.path);
          rec.t_nom = traj.total_duration;

          HumanTimeline timeline = HumanTimeline::constant(initial);
          if (spec.kind == ExperimentKind::B && traj.total_duration > 0.0) {
            for (std::size_t m = 0; m < relocations.size(); ++m) {
              const double t = traj.total_duration * spec.relocation_fraction *
                               (static_cast<double>(m + 1));
              timeline.keyframes.push_back({std::max(t, 1e-6), relocations[m]});
            }
          }

          const ExecutionResult ex = execute(traj, spec.robot, spec.safety, timeline, exec);
          rec.success = ex.metrics.success;
          rec.t_ex = ex.metrics.t_ex;
          rec.delay_ratio = ex.metrics.delay_ratio;
          rec.avg_override = ex.metrics.avg_override;
          rec.min_distance = ex.metrics.min_distance;
        }
        records.push_back(std::move(rec));
      }
    }
  };

  int n_threads = spec.threads > 0 ? spec.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, n_queries);
  if (n_threads <= 1) {
    for (int qi = 0; qi < n_queries; ++qi) run_query(qi);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&]() {
        while (true) {
          const int qi = next.fetch_add(1);
          if (qi >= n_queries) return;
          run_query(qi);
        }
      });
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  for (int qi = 0; qi < n_queries; ++qi) {
    for (auto& r : per_query[static_cast<std::size_t>(qi)]) result.records.push_back(std::move(r));
    for (auto& e : per_query_events[static_cast<std::size_t>(qi)]) result.events.push_back(std::move(e));
  }
  result.report = aggregate(result.records, to_string(PlannerMode::MinPath));
  return result;
}

// ---- record serialization ---------------------------------------------------

inline std::string records_to_jsonl(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records) os << json(r).dump() << "\n";
  return os.str();
}

inline std::vector<RunRecord> records_from_jsonl(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(json::parse(line).get<RunRecord>());
  }
  return records;
}

/// Per-run tuples for length-vs-time scatter plots.
inline void write_plotdata_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "planner,query,rep,path_length,t_nom,t_ex,success\n";
  for (const auto& r : records) {
    os << r.planner << "," << r.query << "," << r.rep << "," << r.path_length << "," << r.t_nom
       << "," << r.t_ex << "," << (r.success ? 1 : 0) << "\n";
  }
}

// ---- experiment spec serialization ------------------------------------------

inline void to_json(json& j, const ExperimentSpec& spec) {
  json planners = json::array();
  for (const auto m : spec.planners) planners.push_back(to_string(m));
  j = json{{"kind", to_string(spec.kind)},
           {"num_queries", spec.num_queries},
           {"repetitions", spec.repetitions},
           {"master_seed", spec.master_seed},
           {"planners", planners},
           {"robot", to_json(spec.robot)},
           {"safety", spec.safety},
           {"weights", spec.weights},
           {"scene", spec.scene},
           {"workspace", {{"min", vec3_to_json(spec.workspace.min)}, {"max", vec3_to_json(spec.workspace.max)}}},
           {"mu_box", {{"min", vec3_to_json(spec.mu_box.min)}, {"max", vec3_to_json(spec.mu_box.max)}}},
           {"occupancy_radius", spec.occupancy_radius},
           {"voxel_size", spec.voxel_size},
           {"falloff", spec.falloff == OccupancyFalloff::Radius ? "radius" : "inverse-rate"},
           {"human_extent", spec.human_extent},
           {"goals_per_query", spec.goals_per_query},
           {"plan_iterations", spec.plan_iterations},
           {"planner_config", spec.planner_config},
           {"execution", spec.execution},
           {"relocation_fraction", spec.relocation_fraction},
           {"relocation_count", spec.relocation_count},
           {"threads", spec.threads}};
}

inline void from_json(const json& j, ExperimentSpec& spec) {
  spec = ExperimentSpec{};
  spec.kind = experiment_kind_from_string(j.value("kind", std::string("A")));
  spec.num_queries = j.value("num_queries", spec.num_queries);
  spec.repetitions = j.value("repetitions", spec.repetitions);
  spec.master_seed = j.value("master_seed", spec.master_seed);
  if (j.contains("planners"))
    for (const auto& jp : j.at("planners"))
      spec.planners.push_back(planner_mode_from_string(jp.get<std::string>()));
  if (j.contains("robot")) spec.robot = robot_model_from_json(j.at("robot"));
  if (j.contains("safety")) spec.safety = j.at("safety").get<SafetyParams>();
  if (j.contains("weights")) spec.weights = j.at("weights").get<CostWeights>();
  if (j.contains("scene")) spec.scene = j.at("scene").get<Scene>();
  if (j.contains("workspace")) {
    spec.workspace.min = vec3_from_json(j.at("workspace").at("min"));
    spec.workspace.max = vec3_from_json(j.at("workspace").at("max"));
  }
  if (j.contains("mu_box")) {
    spec.mu_box.min = vec3_from_json(j.at("mu_box").at("min"));
    spec.mu_box.max = vec3_from_json(j.at("mu_box").at("max"));
  }
  spec.occupancy_radius = j.value("occupancy_radius", spec.occupancy_radius);
  spec.voxel_size = j.value("voxel_size", spec.voxel_size);
  if (j.value("falloff", std::string("radius")) == "inverse-rate")
    spec.falloff = OccupancyFalloff::InverseRate;
  spec.human_extent = j.value("human_extent", spec.human_extent);
  spec.goals_per_query = j.value("goals_per_query", spec.goals_per_query);
  spec.plan_iterations = j.value("plan_iterations", spec.plan_iterations);
  if (j.contains("planner_config")) spec.planner_config = j.at("planner_config").get<PlannerConfig>();
  if (j.contains("execution")) spec.execution = j.at("execution").get<ExecutionParams>();
  spec.relocation_fraction = j.value("relocation_fraction", spec.relocation_fraction);
  spec.relocation_count = j.value("relocation_count", spec.relocation_count);
  spec.threads = j.value("threads", spec.threads);
  spec.validate();
}

// ---- acceptance-style threshold checks --------------------------------------

/// Directional expectations per experiment kind, evaluated on an aggregated
/// report (and raw records where per-run comparisons are needed). Returns
/// human-readable violations; empty means the run met every expectation.
inline std::vector<std::string> check_report(const ExperimentSpec& spec,
                                             const AggregateReport& report,
                                             const std::vector<RunRecord>& records) {
  std::vector<std::string> violations;
  const auto* base = report.find("min-path");
  const auto* hamp = report.find("hamp");
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) violations.push_back(what);
  };

  switch (spec.kind) {
    case ExperimentKind::A: {
      if (!base || !hamp) {
        violations.push_back("experiment A needs min-path and hamp planners");
        break;
      }
      require(hamp->norm_time.mean <= 0.95,
              "hamp mean normalized execution time " + std::to_string(hamp->norm_time.mean) +
                  " exceeds 0.95");
      require(hamp->norm_length.mean >= 1.05,
              "hamp mean normalized path length " + std::to_string(hamp->norm_length.mean) +
                  " below 1.05");
      require(hamp->success_rate >= base->success_rate,
              "hamp success rate below min-path baseline");
      break;
    }
    case ExperimentKind::B: {
      const auto* prob = report.find("hamp-probabilistic");
      if (!base || !hamp || !prob) {
        violations.push_back("experiment B needs min-path, hamp, hamp-probabilistic planners");
        break;
      }
      require(prob->success_rate >= hamp->success_rate,
              "hamp-probabilistic success rate below hamp");
      require(hamp->success_rate >= base->success_rate, "hamp success rate below min-path");
      require(prob->success_rate >= base->success_rate,
              "hamp-probabilistic success rate below min-path");
      require(prob->norm_time.mean < 1.0,
              "hamp-probabilistic mean normalized execution time not below 1.0");
      break;
    }
    case ExperimentKind::C: {
      const auto* approx = report.find("hamp-approximated");
      if (!base || !hamp || !approx) {
        violations.push_back("experiment C needs min-path, hamp, hamp-approximated planners");
        break;
      }
      require(std::abs(approx->norm_time.mean - hamp->norm_time.mean) <= 0.15,
              "approximated vs full expected-time planner differ by more than 0.15");
      require(hamp->norm_time.mean <= 0.8, "hamp mean normalized execution time above 0.8");
      require(approx->norm_time.mean <= 0.8,
              "hamp-approximated mean normalized execution time above 0.8");

      const std::size_t dirs = [&spec]() {
        std::size_t p = 1;
        for (int k = 0; k < spec.robot.dof(); ++k) p *= 3;
        return p - 1;
      }();
      const std::size_t budget = static_cast<std::size_t>(spec.resolved_goals()) * dirs;
      std::map<std::pair<int, int>, std::uint64_t> hamp_evals, approx_evals;
      for (const auto& r : records) {
        if (r.planner == "hamp") hamp_evals[{r.query, r.rep}] = r.lambda_evals;
        if (r.planner == "hamp-approximated") approx_evals[{r.query, r.rep}] = r.lambda_evals;
      }
      for (const auto& [key, evals] : approx_evals) {
        if (evals > budget) {
          violations.push_back("approximated planner exceeded the terminal evaluation budget");
          break;
        }
        if (hamp_evals.count(key) && evals >= hamp_evals[key]) {
          violations.push_back("approximated planner did not evaluate strictly fewer dilations");
          break;
        }
      }
      break;
    }
  }
  return violations;
}

}  // namespace hamp

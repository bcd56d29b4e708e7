// Command-line frontend: single planning queries, trajectory execution
// against a scripted human, benchmark experiments, and report aggregation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hamp/bench.hpp"
#include "hamp/costmap.hpp"
#include "hamp/exec_sim.hpp"
#include "hamp/io.hpp"
#include "hamp/planner.hpp"

namespace {

hamp::VecX parse_config(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) values.push_back(std::stod(token));
  hamp::VecX q(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) q[static_cast<Eigen::Index>(k)] = values[k];
  return q;
}

void print_report(const hamp::AggregateReport& report) {
  std::cout << "experiment " << report.experiment << " (normalized by " << report.baseline
            << " per-query medians)\n";
  std::cout << std::left << std::setw(22) << "planner" << std::setw(10) << "success"
            << std::setw(16) << "norm length" << std::setw(16) << "norm time" << std::setw(16)
            << "norm delay" << std::setw(14) << "lambda evals" << "\n";
  for (const auto& p : report.planners) {
    auto cell = [](const hamp::MetricStats& s) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(3) << s.mean << " (" << s.stddev << ")";
      return os.str();
    };
    std::cout << std::left << std::setw(22) << p.planner << std::setw(10) << std::fixed
              << std::setprecision(3) << p.success_rate << std::setw(16) << cell(p.norm_length)
              << std::setw(16) << cell(p.norm_time) << std::setw(16) << cell(p.norm_delay)
              << std::setw(14) << std::setprecision(0) << p.mean_lambda_evals << "\n";
  }
  if (!report.queries_without_baseline_time.empty()) {
    std::cout << "queries without a successful baseline run (excluded from time ratios):";
    for (int q : report.queries_without_baseline_time) std::cout << " " << q;
    std::cout << "\n";
  }
}

hamp::Scenario load_scenario(const std::string& path) {
  if (path.empty()) return hamp::Scenario{};
  return hamp::scenario_from_json(hamp::load_json_file(path));
}

int run_plan(const std::string& scenario_path, const std::string& start_text,
             const std::vector<std::string>& goal_texts, const std::string& mode_name,
             std::size_t iterations, double seconds, std::uint64_t seed, const std::string& out,
             double discretize_step) {
  const hamp::Scenario scenario = load_scenario(scenario_path);
  hamp::PlanningQuery query;
  query.start = parse_config(start_text);
  for (const auto& g : goal_texts) query.goals.push_back(parse_config(g));
  query.mode = hamp::planner_mode_from_string(mode_name);
  query.max_iterations = iterations;
  query.max_seconds = seconds;
  query.seed = seed;

  const hamp::PlanResult result = hamp::plan(query, scenario.scene, scenario.robot,
                                             scenario.safety, scenario.human, scenario.weights);
  if (!result.found) {
    std::cout << "no path found within the budget (" << result.iterations << " iterations)\n";
    return 2;
  }
  hamp::Path path = result.path;
  if (discretize_step > 0.0) path = hamp::discretize(path, discretize_step);

  std::cout << "cost " << std::setprecision(9) << result.cost << " after " << result.iterations
            << " iterations, " << result.tree_size << " nodes, " << result.lambda_evaluations
            << " lambda evaluations\n";
  std::cout << "path: " << path.waypoints.size() << " waypoints, length "
            << hamp::path_length(path) << " rad, nominal time "
            << hamp::nominal_time(scenario.robot, path) << " s\n";
  if (!out.empty()) {
    hamp::json j{{"mode", hamp::to_string(query.mode)},
                 {"cost", result.cost},
                 {"goal_index", result.goal_index},
                 {"path", path}};
    hamp::save_json_file(out, j);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int run_exec(const std::string& scenario_path, const std::string& path_file,
             const std::string& timeline_file, double dt, std::uint64_t seed,
             const std::string& trace_file) {
  const hamp::Scenario scenario = load_scenario(scenario_path);
  const hamp::json jp = hamp::load_json_file(path_file);
  const hamp::Path path = jp.contains("path") ? jp.at("path").get<hamp::Path>() : jp.get<hamp::Path>();

  hamp::HumanTimeline timeline;
  if (!timeline_file.empty()) {
    timeline = hamp::load_json_file(timeline_file).get<hamp::HumanTimeline>();
  } else if (const auto* det = std::get_if<hamp::DeterministicHuman>(&scenario.human)) {
    timeline = hamp::HumanTimeline::constant(*det);
  } else {
    timeline = hamp::HumanTimeline::constant(
        hamp::sample_realization(std::get<hamp::OccupancyGrid>(scenario.human), seed));
  }

  hamp::ExecutionParams params;
  params.dt = dt;
  params.record_trace = !trace_file.empty();
  const hamp::Trajectory traj = hamp::parametrize(scenario.robot, path);
  const hamp::ExecutionResult result =
      hamp::execute(traj, scenario.robot, scenario.safety, timeline, params);

  std::cout << "outcome: " << (result.metrics.success ? "completed" : "safety-stop") << "\n";
  std::cout << "t_nom " << result.metrics.t_nom << " s, t_ex " << result.metrics.t_ex
            << " s, delay ratio " << result.metrics.delay_ratio << ", avg override "
            << result.metrics.avg_override << ", min distance " << result.metrics.min_distance
            << " m\n";
  if (!trace_file.empty()) {
    std::ofstream out(trace_file);
    hamp::write_trace_csv(out, result.trace, scenario.robot.dof());
    std::cout << "wrote " << trace_file << "\n";
  }
  return result.metrics.success ? 0 : 3;
}

int run_bench(const std::string& spec_file, const std::string& out_dir, int threads, bool check,
              std::uint64_t seed_override, int queries_override) {
  hamp::ExperimentSpec spec;
  if (!spec_file.empty()) spec = hamp::load_json_file(spec_file).get<hamp::ExperimentSpec>();
  if (seed_override != 0) spec.master_seed = seed_override;
  if (queries_override > 0) spec.num_queries = queries_override;
  if (threads > 0) spec.threads = threads;

  const hamp::ExperimentResult result = hamp::run_experiment(spec);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream records(out_dir + "/records.jsonl");
    records << hamp::records_to_jsonl(result.records);
  }
  hamp::save_json_file(out_dir + "/summary.json", hamp::json(result.report));
  hamp::save_json_file(out_dir + "/spec.json", hamp::json(spec));
  {
    std::ofstream plot(out_dir + "/plotdata.csv");
    hamp::write_plotdata_csv(plot, result.records);
  }
  if (!result.events.empty()) {
    std::ofstream events(out_dir + "/events.log");
    for (const auto& e : result.events) events << e << "\n";
  }

  print_report(result.report);
  std::cout << "wrote " << out_dir << "/records.jsonl, summary.json, plotdata.csv\n";

  if (check) {
    const auto violations = hamp::check_report(spec, result.report, result.records);
    for (const auto& v : violations) std::cerr << "check failed: " << v << "\n";
    if (!violations.empty()) return 4;
    std::cout << "all experiment " << hamp::to_string(spec.kind) << " checks passed\n";
  }
  return 0;
}

int run_report(const std::string& records_file, const std::string& out_file,
               const std::string& baseline) {
  std::ifstream in(records_file);
  if (!in) {
    std::cerr << "cannot open " << records_file << "\n";
    return 1;
  }
  const auto records = hamp::records_from_jsonl(in);
  const auto report = hamp::aggregate(records, baseline);
  print_report(report);
  if (!out_file.empty()) {
    hamp::save_json_file(out_file, hamp::json(report));
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-aware expected-execution-time motion planning toolkit"};
  app.require_subcommand(1);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "solve one planning query");
  std::string scenario_path, start_text, mode_name = "hamp", out_file;
  std::vector<std::string> goal_texts;
  std::size_t iterations = 3000;
  double seconds = 0.0, discretize_step = 0.0;
  std::uint64_t seed = 1;
  plan_cmd->add_option("--scenario", scenario_path, "scenario JSON (defaults to the desk setup)");
  plan_cmd->add_option("--start", start_text, "start configuration, comma separated")->required();
  plan_cmd->add_option("--goal", goal_texts, "goal configuration (repeatable)")->required();
  plan_cmd->add_option("--mode", mode_name,
                       "min-path | hamp | hamp-probabilistic | hamp-approximated");
  plan_cmd->add_option("--iterations", iterations, "iteration budget");
  plan_cmd->add_option("--seconds", seconds, "wall-clock budget (0 = none)");
  plan_cmd->add_option("--seed", seed, "rng seed");
  plan_cmd->add_option("--out", out_file, "write the path as JSON");
  plan_cmd->add_option("--discretize", discretize_step, "resample the path at this max step");

  // exec
  auto* exec_cmd = app.add_subcommand("exec", "simulate the execution of a planned path");
  std::string exec_scenario, path_file, timeline_file, trace_file;
  double dt = 0.01;
  std::uint64_t exec_seed = 1;
  exec_cmd->add_option("--scenario", exec_scenario, "scenario JSON");
  exec_cmd->add_option("--path", path_file, "path JSON produced by `plan`")->required();
  exec_cmd->add_option("--timeline", timeline_file, "human timeline JSON (default: scenario human)");
  exec_cmd->add_option("--dt", dt, "control step (s)");
  exec_cmd->add_option("--seed", exec_seed, "seed for sampling a grid realization");
  exec_cmd->add_option("--trace", trace_file, "write the execution trace CSV");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark experiment");
  std::string spec_file, out_dir = "bench-out";
  int threads = 0, queries_override = 0;
  std::uint64_t bench_seed = 0;
  bool check = false;
  bench_cmd->add_option("--spec", spec_file, "experiment spec JSON (default: experiment A)");
  bench_cmd->add_option("--out", out_dir, "output directory");
  bench_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  bench_cmd->add_option("--seed", bench_seed, "override the master seed");
  bench_cmd->add_option("--queries", queries_override, "override the query count");
  bench_cmd->add_flag("--check", check, "exit nonzero when directional expectations fail");

  // report
  auto* report_cmd = app.add_subcommand("report", "re-aggregate raw records");
  std::string records_file, report_out, baseline = "min-path";
  report_cmd->add_option("--records", records_file, "records.jsonl from `bench`")->required();
  report_cmd->add_option("--out", report_out, "write the summary JSON");
  report_cmd->add_option("--baseline", baseline, "baseline planner for normalization");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed())
      return run_plan(scenario_path, start_text, goal_texts, mode_name, iterations, seconds, seed,
                      out_file, discretize_step);
    if (exec_cmd->parsed())
      return run_exec(exec_scenario, path_file, timeline_file, dt, exec_seed, trace_file);
    if (bench_cmd->parsed())
      return run_bench(spec_file, out_dir, threads, check, bench_seed, queries_override);
    if (report_cmd->parsed()) return run_report(records_file, report_out, baseline);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "safecorridor_tools/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "safecorridor/error.hpp"
#include "safecorridor/models.hpp"
#include "safecorridor/training.hpp"
#include "safecorridor_tools/bench.hpp"
#include "safecorridor_tools/plot.hpp"
#include "safecorridor_tools/svg.hpp"

namespace safecorridor::tools {

namespace fs = std::filesystem;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kParse, "cannot write " + path.string());
  file << text;
}

struct LearnArgs {
  std::string scenario;
  std::size_t samples = 10000;
  std::string mode = "rrt-trace";
  std::optional<double> bandwidth;
  std::optional<double> bandwidth_deg;
  std::optional<double> workspace_bandwidth;
  double kappa = 0.9;
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  std::string samples_in;
  std::string samples_out;
  std::string out;
};

int cmd_learn(const LearnArgs& a, std::ostream& out) {
  const Scenario scenario = load_scenario(a.scenario);
  LearnOptions options;
  options.samples = a.samples;
  options.mode = parse_sampling_mode(a.mode);
  if (a.bandwidth) options.bandwidth = *a.bandwidth;
  if (a.bandwidth_deg) options.bandwidth = *a.bandwidth_deg * kDegToRad;
  if (a.workspace_bandwidth) options.workspace_bandwidth = *a.workspace_bandwidth;
  options.kappa = a.kappa;
  options.epsilon = a.epsilon;
  options.seed = a.seed;
  LabeledSampleSet samples;
  if (!a.samples_in.empty()) {
    std::ifstream in(a.samples_in);
    if (!in) throw Error(ErrorCode::kParse, "cannot read " + a.samples_in);
    samples = read_samples_csv(in);
  } else {
    samples = generate_training_samples(scenario, options.samples, options.mode, options.seed);
  }
  if (!a.samples_out.empty()) {
    std::ostringstream csv;
    write_samples_csv(samples, csv);
    write_text(a.samples_out, csv.str());
  }
  LearnReport report;
  const LearnedModels models = learn_models_from_samples(scenario, samples, options, &report);
  save_models(models, a.out);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", report.fit_time_ms);
  out << "samples: " << samples.size() << " (collision " << report.collision_samples << ", free " << report.free_samples
      << ")\n"
      << "clusters: collision " << report.collision_clusters << ", free " << report.free_clusters << ", workspace "
      << report.workspace_clusters << "\n"
      << "fit time: " << buf << " ms\n"
      << "wrote " << a.out << "\n";
  return kExitOk;
}

struct PlanArgs {
  std::string scenario;
  std::string model;
  std::string variant;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<std::size_t> budget;
  std::string out;
  std::string svg;
  std::string dump_corridor;
  bool trees = false;
  bool timing = false;
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const Scenario scenario = load_scenario(a.scenario);
  PlannerConfig config = scenario.planner;
  if (!a.variant.empty()) config.variant = parse_variant(a.variant);
  std::optional<LearnedModels> models;
  if (!a.model.empty()) {
    models = load_models(a.model);
    config.epsilon = models->epsilon;
  }
  if (a.epsilon) config.epsilon = *a.epsilon;
  if (a.budget) config.budget = *a.budget;
  config.validate();
  const std::uint64_t seed = a.seed.value_or(config.seed);

  if (!a.dump_corridor.empty()) {
    // Corridor of the variant's steering model, anchored at the start.
    const bool task = config.uses_task_corridor();
    const std::optional<MixtureModel>* entry =
        models ? (task ? &models->workspace : &models->collision) : nullptr;
    if (entry == nullptr || !entry->has_value()) {
      throw Error(ErrorCode::kInvalidArgument, "--dump-corridor needs a model with a matching mixture");
    }
    const Eigen::VectorXd anchor = task ? scenario.robot.end_effector(scenario.start) : scenario.start;
    const SafeCorridor corridor = build_corridor(anchor, (*entry)->gmm, (*entry)->levels, config.epsilon);
    write_text(a.dump_corridor, corridor_to_json(corridor).dump(2) + "\n");
  }

  const PlanResult result = plan(scenario, config, models ? &*models : nullptr, seed);
  nlohmann::json doc = plan_result_to_json(result, a.trees);
  if (a.timing) doc["stats"]["wall_time_ms"] = result.stats.wall_time_ms;
  if (a.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_text(a.out, doc.dump(2) + "\n");
  }
  if (!a.svg.empty()) write_text(a.svg, render_plan_svg(scenario, result));

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", result.stats.wall_time_ms);
  out << (result.found() ? "path found" : "no path") << ": " << result.stats.extensions << " extensions, "
      << result.stats.collision_checks << " collision checks, " << buf << " ms\n";
  return result.found() ? kExitOk : kExitNotFound;
}

struct BenchArgs {
  std::string spec;
  std::string out_dir;
  unsigned threads = 0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  BenchSpec spec = load_bench_spec(a.spec);
  if (!a.out_dir.empty()) spec.output_dir = a.out_dir;
  const std::vector<TrialRow> rows = run_bench(spec, resolve_threads(a.threads), &out);
  std::ostringstream csv;
  write_csv(rows, csv);
  write_text(spec.output_dir / "results.csv", csv.str());
  const std::string summary = summary_markdown(summarize(rows));
  write_text(spec.output_dir / "summary.md", summary);
  out << summary << "wrote " << (spec.output_dir / "results.csv").string() << "\n";
  return kExitOk;
}

struct PlotArgs {
  std::string csv;
  std::string kind = "bars";
  std::string metric;
  std::string out;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  std::ifstream in(a.csv);
  if (!in) throw Error(ErrorCode::kParse, "cannot read " + a.csv);
  const std::vector<TrialRow> rows = read_csv(in);
  const PlotKind kind = parse_plot_kind(a.kind);
  const std::string metric = !a.metric.empty() ? a.metric : kind == PlotKind::kBars ? "collision_checks" : "iterations";
  write_text(a.out, kind == PlotKind::kBars ? render_bars(rows, metric) : render_curve(rows, metric));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

}  // namespace

std::string render_plan_svg(const Scenario& scenario, const PlanResult& result) {
  const Robot& robot = scenario.robot;
  const bool config_view = robot.dof() == 2;
  const JointLimits box = config_view ? robot.limits() : robot.workspace_bounds();
  if (box.dim() != 2) throw Error(ErrorCode::kInvalidArgument, "SVG rendering needs a 2D view");
  SvgCanvas svg(600.0, 600.0, box.lower.head<2>(), box.upper.head<2>(), 30.0);

  if (config_view) {
    constexpr int kGrid = 120;
    const Eigen::Vector2d cell = (box.upper - box.lower) / kGrid;
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        const Eigen::Vector2d lo = box.lower + Eigen::Vector2d(i * cell.x(), j * cell.y());
        if (robot.in_collision(lo + cell / 2, scenario.obstacles)) svg.rect(lo, lo + cell, "#bbbbbb");
      }
    }
  } else {
    for (const auto& c : scenario.obstacles.circles) svg.circle(c.center.head<2>(), c.radius, "#bbbbbb");
    for (const auto& b : scenario.obstacles.boxes) svg.rect(b.min.head<2>(), b.max.head<2>(), "#bbbbbb");
  }
  svg.frame();

  auto view = [&](const Eigen::VectorXd& q) -> Eigen::Vector2d {
    return config_view ? Eigen::Vector2d(q.head<2>()) : Eigen::Vector2d(robot.end_effector(q).head<2>());
  };
  auto draw_tree = [&](const std::vector<Eigen::VectorXd>& nodes, const std::vector<int>& parent, const char* color) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (parent[i] >= 0) svg.line(view(nodes[static_cast<std::size_t>(parent[i])]), view(nodes[i]), color, 0.6);
    }
  };
  draw_tree(result.start_tree_nodes, result.start_tree_parent, "#6fa8dc");
  draw_tree(result.goal_tree_nodes, result.goal_tree_parent, "#93c47d");

  if (result.path) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& q : *result.path) pts.push_back(view(q));
    svg.polyline(pts, "#cc0000", 2.0);
    if (!config_view && robot.is_arm()) {
      for (const auto& q : *result.path) {
        const ArmPose pose = forward_kinematics(robot.arm(), q);
        std::vector<Eigen::Vector2d> joints(pose.joints.begin(), pose.joints.end());
        svg.polyline(joints, "#99999955", 1.0);
      }
    }
  }
  svg.dot(view(scenario.start), 5.0, "#0000cc");
  svg.dot(view(scenario.goal), 5.0, "#00aa00");
  return svg.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned-corridor sampling-based motion planning"};
  app.require_subcommand(1);

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn collision, free and workspace mixtures for a scenario");
  learn_cmd->add_option("scenario", learn.scenario, "Scenario JSON")->required();
  learn_cmd->add_option("--samples", learn.samples, "Number of labeled training samples");
  learn_cmd->add_option("--mode", learn.mode, "uniform or rrt-trace");
  auto* bw = learn_cmd->add_option("--bandwidth", learn.bandwidth, "Meanshift bandwidth (radians or length)");
  learn_cmd->add_option("--bandwidth-deg", learn.bandwidth_deg, "Meanshift bandwidth in degrees")->excludes(bw);
  learn_cmd->add_option("--workspace-bandwidth", learn.workspace_bandwidth, "Bandwidth of the workspace mixture");
  learn_cmd->add_option("--kappa", learn.kappa, "Confidence level");
  learn_cmd->add_option("--epsilon", learn.epsilon, "Corridor tolerance stored with the model");
  learn_cmd->add_option("--seed", learn.seed, "Sampling seed");
  auto* samples_in = learn_cmd->add_option("--samples-in", learn.samples_in, "Fit from a labeled sample CSV");
  learn_cmd->add_option("--samples-out", learn.samples_out, "Write the training samples as CSV")->excludes(samples_in);
  learn_cmd->add_option("--out", learn.out, "Model JSON output")->required();

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Run one planner and write its result");
  plan_cmd->add_option("scenario", plan_args.scenario, "Scenario JSON")->required();
  plan_cmd->add_option("--model", plan_args.model, "Model JSON from `learn`");
  plan_cmd->add_option("--variant", plan_args.variant, "Planner variant (defaults to the scenario's)");
  plan_cmd->add_option("--seed", plan_args.seed, "Planner seed (defaults to the scenario's)");
  plan_cmd->add_option("--epsilon", plan_args.epsilon, "Corridor tolerance override");
  plan_cmd->add_option("--budget", plan_args.budget, "Extension budget override");
  plan_cmd->add_option("--out", plan_args.out, "Result JSON (stdout when omitted)");
  plan_cmd->add_option("--svg", plan_args.svg, "Render the trees and path to SVG");
  plan_cmd->add_option("--dump-corridor", plan_args.dump_corridor, "Write the corridor at the start as JSON");
  plan_cmd->add_flag("--trees", plan_args.trees, "Include the trees in the result JSON");
  plan_cmd->add_flag("--timing", plan_args.timing, "Include wall time in the result JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep from a spec file");
  bench_cmd->add_option("spec", bench.spec, "Bench spec JSON")->required();
  bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory override");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores, capped by SAFECORRIDOR_THREADS)");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a bench CSV to SVG");
  plot_cmd->add_option("csv", plot.csv, "Bench CSV")->required();
  plot_cmd->add_option("--kind", plot.kind, "bars or curve");
  plot_cmd->add_option("--metric", plot.metric, "collision_checks, iterations, extensions, colliding_fraction or wall_time_ms");
  plot_cmd->add_option("--out", plot.out, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (learn_cmd->parsed()) return cmd_learn(learn, out);
    if (plan_cmd->parsed()) return cmd_plan(plan_args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
    return cmd_plot(plot, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace safecorridor::tools

#include "safecorridor/training.hpp"

#include <cctype>
#include <chrono>

#include "safecorridor/confidence.hpp"
#include "safecorridor/error.hpp"
#include "safecorridor/planners.hpp"

namespace safecorridor {

namespace {

struct TraceFull {};  // unwinds a tracing trial once enough samples are recorded

}  // namespace

SamplingMode parse_sampling_mode(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "uniform") return SamplingMode::kUniform;
  if (key == "rrt-trace") return SamplingMode::kRrtTrace;
  throw Error(ErrorCode::kInvalidArgument, "unknown sampling mode '" + name + "'");
}

std::string to_string(SamplingMode mode) { return mode == SamplingMode::kUniform ? "uniform" : "rrt-trace"; }

LabeledSampleSet generate_training_samples(const Scenario& scenario, std::size_t n, SamplingMode mode,
                                           std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kNoSamples, "no samples");
  LabeledSampleSet set;
  if (mode == SamplingMode::kUniform) {
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::VectorXd q = uniform_sample(scenario.robot.limits(), rng);
      const bool colliding = scenario.robot.in_collision(q, scenario.obstacles);
      set.add(q, colliding);
    }
    return set;
  }

  PlannerConfig config = scenario.planner;
  config.variant = Variant::kRrt;
  config.bias_goal = false;
  config.bidirectional = false;
  PlanHooks hooks;
  hooks.on_collision_check = [&](const Eigen::VectorXd& q, bool colliding) {
    set.add(q, colliding);
    if (set.size() >= n) throw TraceFull{};
  };
  for (std::uint64_t trial = 0; set.size() < n; ++trial) {
    const std::size_t before = set.size();
    try {
      plan(scenario, config, nullptr, seed + trial, &hooks);
    } catch (const TraceFull&) {
      break;
    }
    if (set.size() == before) throw Error(ErrorCode::kNoSamples, "no samples");
  }
  return set;
}

LabeledSampleSet generate_workspace_samples(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kNoSamples, "no samples");
  const JointLimits bounds = scenario.robot.workspace_bounds();
  Rng rng(seed);
  LabeledSampleSet set;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x = uniform_sample(bounds, rng);
    const bool colliding = scenario.obstacles.contains_point(x);
    set.add(x, colliding);
  }
  return set;
}

MixtureModel fit_model(const LabeledSampleSet& samples, bool in_collision, double bandwidth, double kappa) {
  const std::vector<Eigen::VectorXd> points = samples.select(in_collision);
  MixtureModel model{fit_mixture(points, bandwidth), {}};
  model.levels = shared_level_search(model.gmm, kappa);
  return model;
}

LearnedModels learn_models(const Scenario& scenario, const LearnOptions& options, LearnReport* report) {
  const LabeledSampleSet samples = generate_training_samples(scenario, options.samples, options.mode, options.seed);
  return learn_models_from_samples(scenario, samples, options, report);
}

LearnedModels learn_models_from_samples(const Scenario& scenario, const LabeledSampleSet& samples,
                                        const LearnOptions& options, LearnReport* report) {
  if (samples.size() == 0) throw Error(ErrorCode::kNoSamples, "no samples");
  if (samples.dim != scenario.robot.dof()) {
    throw Error(ErrorCode::kDimensionMismatch, "sample dimension does not match the robot");
  }
  LearnReport local;
  LearnReport& r = report != nullptr ? *report : local;
  r = LearnReport{};

  LearnedModels models;
  models.kappa = options.kappa;
  models.epsilon = options.epsilon;
  models.seed = options.seed;
  models.sample_count = samples.size();
  models.sampling_mode = to_string(options.mode);
  r.collision_samples = samples.count(true);
  r.free_samples = samples.count(false);

  const auto t0 = std::chrono::steady_clock::now();
  if (r.collision_samples > 0) {
    models.collision = fit_model(samples, true, options.bandwidth, options.kappa);
    r.collision_clusters = models.collision->gmm.size();
  }
  if (options.learn_free && r.free_samples > 0) {
    models.free = fit_model(samples, false, options.bandwidth, options.kappa);
    r.free_clusters = models.free->gmm.size();
  }
  if (options.learn_workspace) {
    const std::size_t n_ws = options.workspace_samples > 0 ? options.workspace_samples : samples.size();
    const double b_ws = options.workspace_bandwidth > 0.0 ? options.workspace_bandwidth : options.bandwidth;
    const LabeledSampleSet ws = generate_workspace_samples(scenario, n_ws, options.seed);
    if (ws.count(true) > 0) {
      models.workspace = fit_model(ws, true, b_ws, options.kappa);
      r.workspace_clusters = models.workspace->gmm.size();
    }
  }
  r.fit_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return models;
}

}  // namespace safecorridor

#include "safecorridor/planners.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "safecorridor/error.hpp"

namespace safecorridor {

Tree::Tree(const Eigen::VectorXd& root, const Robot* robot) { add(root, -1, robot); }

int Tree::add(const Eigen::VectorXd& q, int parent_index, const Robot* robot) {
  nodes.push_back(q);
  parent.push_back(parent_index);
  if (robot != nullptr) end_effector.push_back(robot->end_effector(q));
  return static_cast<int>(nodes.size()) - 1;
}

std::vector<Eigen::VectorXd> Tree::path_from_root(int index) const {
  std::vector<Eigen::VectorXd> path;
  for (int i = index; i >= 0; i = parent[static_cast<std::size_t>(i)]) path.push_back(nodes[static_cast<std::size_t>(i)]);
  std::reverse(path.begin(), path.end());
  return path;
}

Eigen::VectorXd straight_line_steer(const Eigen::VectorXd& q_near, const Eigen::VectorXd& q_target, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  const Eigen::VectorXd d = q_target - q_near;
  const double len = d.norm();
  if (len <= delta) return q_target;
  return q_near + (delta / len) * d;
}

int nearest_neighbor(const Tree& tree, const Eigen::VectorXd& q) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const double d2 = (tree.nodes[i] - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Eigen::VectorXd uniform_sample(const JointLimits& limits, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd q(limits.dim());
  for (int i = 0; i < limits.dim(); ++i) {
    q[i] = limits.lower[i] + unit(rng) * (limits.upper[i] - limits.lower[i]);
  }
  return q;
}

Eigen::VectorXd gmm_biased_sample(const GaussianMixture& gmm_free, const JointLimits& limits, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd q = sample_mixture(gmm_free, rng);
    if (limits.contains(q)) return q;
  }
  return uniform_sample(limits, rng);
}

bool ExtensionContext::segment_free_from_node(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const {
  const std::size_t count = segment_check_count(from, to, config.resolution);
  if (count == 1) return true;  // zero-length: `from` is already a free tree node
  const double m = static_cast<double>(count - 1);
  for (std::size_t i = 1; i < count; ++i) {
    const double k = static_cast<double>(i);
    const Eigen::VectorXd q = ((m - k) * from + k * to) / m;
    ++stats.collision_checks;
    const bool colliding = robot.in_collision(q, obstacles);
    if (hooks != nullptr && hooks->on_collision_check) hooks->on_collision_check(q, colliding);
    if (colliding) return false;
  }
  return true;
}

namespace {

ExtendOutcome extend_config_space(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx,
                                  bool use_corridor) {
  ExtendOutcome out;
  for (int iter = 0; iter < ctx.config.max_iter && !ctx.budget_exhausted();) {
    const int near = nearest_neighbor(tree, q_rand);
    const Eigen::VectorXd q_near = tree.nodes[static_cast<std::size_t>(near)];

    Eigen::VectorXd q_proj = q_rand;
    if (use_corridor) {
      const MixtureModel& model = *ctx.collision_model;
      try {
        const SafeCorridor corridor = build_corridor(q_near, model.gmm, model.levels, ctx.config.epsilon);
        ++ctx.stats.corridor_builds;
        const ProjectionResult projection = project_onto_corridor(corridor, q_rand, ctx.cache);
        ctx.stats.projection_iterations += static_cast<std::size_t>(projection.iterations);
        q_proj = projection.point;
      } catch (const Error&) {
        ++ctx.stats.skipped_extensions;
        ctx.cache.invalidate();
        break;
      }
    }

    const Eigen::VectorXd q_adj = straight_line_steer(q_near, q_proj, ctx.config.step);
    if (q_adj == q_near) break;  // no progress possible toward this sample

    ++ctx.stats.extensions;
    if (!ctx.segment_free_from_node(q_near, q_adj)) {
      ++ctx.stats.colliding_extensions;
      out.collided = true;
      break;
    }
    out.added.push_back(tree.add(q_adj, near, tree.end_effector.empty() ? nullptr : &ctx.robot));
    ++iter;
  }
  return out;
}

}  // namespace

ExtendOutcome extend_straight(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx) {
  return extend_config_space(tree, q_rand, ctx, false);
}

ExtendOutcome sg_extend_config(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx) {
  if (ctx.collision_model == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "configuration-space steering requires a collision model");
  }
  return extend_config_space(tree, q_rand, ctx, true);
}

ExtendOutcome sg_extend_task(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx) {
  if (ctx.workspace_model == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "task-space steering requires a workspace model");
  }
  ExtendOutcome out;
  if (ctx.budget_exhausted()) return out;
  const int near = nearest_neighbor(tree, q_rand);
  const Eigen::VectorXd q_near = tree.nodes[static_cast<std::size_t>(near)];
  const Eigen::VectorXd q_new = straight_line_steer(q_near, q_rand, ctx.config.step);

  const Eigen::VectorXd x_rand = ctx.robot.end_effector(q_rand);
  const Eigen::VectorXd x_near = tree.end_effector.empty() ? ctx.robot.end_effector(q_near)
                                                           : tree.end_effector[static_cast<std::size_t>(near)];
  const Eigen::VectorXd x_new = ctx.robot.end_effector(q_new);

  const MixtureModel& model = *ctx.workspace_model;
  Eigen::VectorXd x_proj;
  try {
    const SafeCorridor corridor = build_corridor(x_near, model.gmm, model.levels, ctx.config.epsilon);
    ++ctx.stats.corridor_builds;
    const ProjectionResult projection = project_onto_corridor(corridor, x_rand, ctx.cache);
    ctx.stats.projection_iterations += static_cast<std::size_t>(projection.iterations);
    x_proj = projection.point;
  } catch (const Error&) {
    ++ctx.stats.skipped_extensions;
    ctx.cache.invalidate();
    return out;
  }

  const Eigen::VectorXd direction = x_proj - x_near;
  const double direction_norm = direction.norm();
  const double step_norm = (x_new - x_near).norm();
  if (direction_norm == 0.0 || step_norm == 0.0) {
    ++ctx.stats.skipped_extensions;
    return out;
  }
  const Eigen::VectorXd delta_adj = direction / direction_norm * step_norm;

  const Eigen::MatrixXd jac = ctx.robot.jacobian(q_near);
  Eigen::MatrixXd jac_pinv;
  try {
    jac_pinv = jacobian_pinv(jac);
  } catch (const Error&) {
    ++ctx.stats.skipped_extensions;
    return out;
  }
  if (ctx.hooks != nullptr && ctx.hooks->on_task_step) {
    ctx.hooks->on_task_step({delta_adj, x_new - x_near, jac, jac_pinv});
  }

  const Eigen::VectorXd q_adj = q_near + jac_pinv * delta_adj;
  ++ctx.stats.extensions;
  if (!ctx.segment_free_from_node(q_near, q_adj)) {
    ++ctx.stats.colliding_extensions;
    out.collided = true;
    return out;
  }
  out.added.push_back(tree.add(q_adj, near, tree.end_effector.empty() ? nullptr : &ctx.robot));
  return out;
}

ExtendOutcome extend(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx) {
  if (ctx.config.uses_task_corridor()) return sg_extend_task(tree, q_rand, ctx);
  if (ctx.config.uses_config_corridor()) return sg_extend_config(tree, q_rand, ctx);
  return extend_straight(tree, q_rand, ctx);
}

namespace {

const MixtureModel* require(const std::optional<MixtureModel>* entry, const char* what, Variant v) {
  if (entry == nullptr || !entry->has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "variant " + to_string(v) + " requires a " + std::string(what) + " model");
  }
  return &entry->value();
}

class PlannerRun {
 public:
  PlannerRun(const Scenario& scenario, const PlannerConfig& config, const LearnedModels* models,
             std::uint64_t seed, const PlanHooks* hooks)
      : scenario_(scenario), config_(config), rng_(seed),
        ctx_{scenario.robot, scenario.obstacles, config_, nullptr, nullptr, cache_, result_.stats, hooks} {
    config_.validate();
    if (config_.uses_config_corridor()) {
      ctx_.collision_model = require(models ? &models->collision : nullptr, "collision", config_.variant);
    }
    if (config_.uses_task_corridor()) {
      ctx_.workspace_model = require(models ? &models->workspace : nullptr, "workspace", config_.variant);
    }
    if (config_.uses_free_model()) {
      free_model_ = require(models ? &models->free : nullptr, "free-space", config_.variant);
    }
  }

  PlanResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    const Robot& robot = scenario_.robot;
    if (scenario_.start.size() != robot.dof() || scenario_.goal.size() != robot.dof() ||
        robot.in_collision(scenario_.start, scenario_.obstacles) ||
        robot.in_collision(scenario_.goal, scenario_.obstacles)) {
      throw Error(ErrorCode::kInvalidEndpoints, "invalid endpoints");
    }
    if (config_.uses_bidirectional()) run_bidirectional();
    else run_unidirectional();
    result_.stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return std::move(result_);
  }

 private:
  const Robot* ee_robot() const { return config_.uses_task_corridor() ? &scenario_.robot : nullptr; }

  Eigen::VectorXd sample(const Eigen::VectorXd& bias_target) {
    if (config_.uses_goal_bias()) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng_) < config_.goal_bias) return bias_target;
    }
    if (free_model_ != nullptr) return gmm_biased_sample(free_model_->gmm, scenario_.robot.limits(), rng_);
    return uniform_sample(scenario_.robot.limits(), rng_);
  }

  std::size_t sample_cap() const { return config_.budget * 20 + 100; }

  void record_tree(const Tree& tree, bool is_start) {
    if (is_start) {
      result_.start_tree_nodes = tree.nodes;
      result_.start_tree_parent = tree.parent;
    } else {
      result_.goal_tree_nodes = tree.nodes;
      result_.goal_tree_parent = tree.parent;
    }
  }

  // Goal region reached from `node`; succeeds when the final segment is free.
  bool try_goal(Tree& tree, int node) {
    const Eigen::VectorXd& q = tree.nodes[static_cast<std::size_t>(node)];
    if ((q - scenario_.goal).norm() > config_.goal_threshold) return false;
    if (!ctx_.segment_free_from_node(q, scenario_.goal)) return false;
    std::vector<Eigen::VectorXd> path = tree.path_from_root(node);
    if (path.back() != scenario_.goal) path.push_back(scenario_.goal);
    result_.path = std::move(path);
    return true;
  }

  void run_unidirectional() {
    Tree tree(scenario_.start, ee_robot());
    if (!try_goal(tree, 0)) {
      for (std::size_t samples = 0; samples < sample_cap() && !ctx_.budget_exhausted(); ++samples) {
        const Eigen::VectorXd q_rand = sample(scenario_.goal);
        ++result_.stats.iterations;
        cache_.invalidate();
        const ExtendOutcome out = extend(tree, q_rand, ctx_);
        const bool done = std::any_of(out.added.begin(), out.added.end(), [&](int i) { return try_goal(tree, i); });
        if (done) break;
      }
    }
    record_tree(tree, true);
  }

  ExtendOutcome connect(Tree& tree, const Eigen::VectorXd& target) {
    cache_.invalidate();
    if (!config_.uses_task_corridor()) return extend(tree, target, ctx_);
    ExtendOutcome total;
    for (int i = 0; i < config_.max_iter; ++i) {
      const ExtendOutcome step = extend(tree, target, ctx_);
      total.added.insert(total.added.end(), step.added.begin(), step.added.end());
      total.collided = step.collided;
      if (step.added.empty()) break;
    }
    return total;
  }

  void run_bidirectional() {
    Tree start_tree(scenario_.start, ee_robot());
    Tree goal_tree(scenario_.goal, ee_robot());
    Tree* a = &start_tree;
    Tree* b = &goal_tree;
    bool a_is_start = true;

    if ((scenario_.start - scenario_.goal).norm() <= config_.goal_threshold &&
        ctx_.segment_free_from_node(scenario_.start, scenario_.goal)) {
      result_.path = std::vector<Eigen::VectorXd>{scenario_.start};
      if (scenario_.start != scenario_.goal) result_.path->push_back(scenario_.goal);
    }

    for (std::size_t samples = 0; !result_.path && samples < sample_cap() && !ctx_.budget_exhausted(); ++samples) {
      const Eigen::VectorXd q_rand = sample(b->nodes.front());
      ++result_.stats.iterations;
      cache_.invalidate();
      const ExtendOutcome grown = extend(*a, q_rand, ctx_);
      if (!grown.added.empty()) {
        const int ia = grown.added.back();
        const Eigen::VectorXd target = a->nodes[static_cast<std::size_t>(ia)];
        const ExtendOutcome reached = connect(*b, target);
        if (!reached.added.empty()) {
          const int ib = reached.added.back();
          const Eigen::VectorXd& qb = b->nodes[static_cast<std::size_t>(ib)];
          if ((qb - target).norm() <= config_.goal_threshold && ctx_.segment_free_from_node(qb, target)) {
            join(*a, ia, *b, ib, a_is_start);
          }
        }
      }
      std::swap(a, b);
      a_is_start = !a_is_start;
    }
    record_tree(start_tree, true);
    record_tree(goal_tree, false);
  }

  void join(const Tree& a, int ia, const Tree& b, int ib, bool a_is_start) {
    std::vector<Eigen::VectorXd> from_a = a.path_from_root(ia);
    std::vector<Eigen::VectorXd> from_b = b.path_from_root(ib);
    std::vector<Eigen::VectorXd>& head = a_is_start ? from_a : from_b;
    std::vector<Eigen::VectorXd>& tail = a_is_start ? from_b : from_a;
    std::reverse(tail.begin(), tail.end());
    if (!tail.empty() && tail.front() == head.back()) tail.erase(tail.begin());
    head.insert(head.end(), tail.begin(), tail.end());
    result_.path = std::move(head);
  }

  const Scenario& scenario_;
  PlannerConfig config_;
  Rng rng_;
  ActiveSetCache cache_;
  PlanResult result_;
  const MixtureModel* free_model_ = nullptr;
  ExtensionContext ctx_;
};

}  // namespace

PlanResult plan(const Scenario& scenario, const PlannerConfig& config, const LearnedModels* models,
                std::uint64_t seed, const PlanHooks* hooks) {
  PlannerRun run(scenario, config, models, seed, hooks);
  return run.run();
}

nlohmann::json plan_result_to_json(const PlanResult& result, bool include_trees) {
  using nlohmann::json;
  json out;
  out["found"] = result.found();
  if (result.path) {
    json path = json::array();
    for (const auto& q : *result.path) path.push_back(vector_to_json(q));
    out["path"] = path;
  } else {
    out["path"] = nullptr;
  }
  const PlanStats& s = result.stats;
  out["stats"] = {{"iterations", s.iterations},
                  {"extensions", s.extensions},
                  {"collision_checks", s.collision_checks},
                  {"colliding_extensions", s.colliding_extensions},
                  {"corridor_builds", s.corridor_builds},
                  {"projection_iterations", s.projection_iterations},
                  {"skipped_extensions", s.skipped_extensions}};
  if (include_trees) {
    auto tree_json = [](const std::vector<Eigen::VectorXd>& nodes, const std::vector<int>& parent) {
      json t = json::array();
      for (std::size_t i = 0; i < nodes.size(); ++i) t.push_back({{"q", vector_to_json(nodes[i])}, {"parent", parent[i]}});
      return t;
    };
    out["start_tree"] = tree_json(result.start_tree_nodes, result.start_tree_parent);
    out["goal_tree"] = tree_json(result.goal_tree_nodes, result.goal_tree_parent);
  }
  return out;
}

}  // namespace safecorridor

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "safecorridor/corridor.hpp"
#include "safecorridor/gmm.hpp"
#include "safecorridor/models.hpp"
#include "safecorridor/planner_config.hpp"
#include "safecorridor/robots.hpp"
#include "safecorridor/scenario.hpp"

namespace safecorridor {

/// Planner graph rooted at nodes[0]. Task-space variants also cache the
/// end-effector position of every node.
struct Tree {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<int> parent;  // -1 for the root
  std::vector<Eigen::VectorXd> end_effector;

  explicit Tree(const Eigen::VectorXd& root, const Robot* robot = nullptr);

  std::size_t size() const { return nodes.size(); }
  int add(const Eigen::VectorXd& q, int parent_index, const Robot* robot = nullptr);
  /// Root-to-node configurations.
  std::vector<Eigen::VectorXd> path_from_root(int index) const;
};

struct PlanStats {
  std::size_t iterations = 0;            // random samples drawn (outer-loop passes)
  std::size_t extensions = 0;            // extension attempts that produced a candidate segment
  std::size_t collision_checks = 0;      // configuration predicate evaluations
  std::size_t colliding_extensions = 0;  // candidate segments rejected by collision
  std::size_t corridor_builds = 0;
  std::size_t projection_iterations = 0;
  std::size_t skipped_extensions = 0;    // projection failure, zero direction or singular Jacobian
  double wall_time_ms = 0.0;

  double colliding_fraction() const {
    return extensions == 0 ? 0.0 : static_cast<double>(colliding_extensions) / static_cast<double>(extensions);
  }
};

struct PlanResult {
  std::optional<std::vector<Eigen::VectorXd>> path;
  PlanStats stats;
  std::vector<Eigen::VectorXd> start_tree_nodes;  // insertion order
  std::vector<int> start_tree_parent;
  std::vector<Eigen::VectorXd> goal_tree_nodes;   // bidirectional runs only
  std::vector<int> goal_tree_parent;

  bool found() const { return path.has_value(); }
};

/// One task-space extension, reported for instrumentation.
struct TaskStepRecord {
  Eigen::VectorXd delta_adjusted;  // Delta X_adj
  Eigen::VectorXd delta_new;       // X_new - X_near
  Eigen::MatrixXd jac;
  Eigen::MatrixXd jac_pinv;
};

struct PlanHooks {
  std::function<void(const Eigen::VectorXd& q, bool colliding)> on_collision_check;
  std::function<void(const TaskStepRecord&)> on_task_step;
};

/// Returns q_target when it is within delta of q_near, otherwise the point
/// delta along the segment.
Eigen::VectorXd straight_line_steer(const Eigen::VectorXd& q_near, const Eigen::VectorXd& q_target, double delta);

/// Euclidean nearest node, ties broken by lowest index.
int nearest_neighbor(const Tree& tree, const Eigen::VectorXd& q);

/// Uniform configuration inside the limits.
Eigen::VectorXd uniform_sample(const JointLimits& limits, Rng& rng);

/// Draw from the free-space mixture, redrawing up to 100 times when outside
/// the limits and then falling back to a uniform sample.
Eigen::VectorXd gmm_biased_sample(const GaussianMixture& gmm_free, const JointLimits& limits, Rng& rng);

/// Shared state of the extension primitives. The cache and stats are owned
/// by one planner instance.
struct ExtensionContext {
  const Robot& robot;
  const ObstacleSet& obstacles;
  const PlannerConfig& config;
  const MixtureModel* collision_model = nullptr;  // configuration-space corridor source
  const MixtureModel* workspace_model = nullptr;  // task-space corridor source
  ActiveSetCache& cache;
  PlanStats& stats;
  const PlanHooks* hooks = nullptr;

  /// Segment check from a tree node (known free) to q, with accounting.
  bool segment_free_from_node(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const;
  bool budget_exhausted() const { return stats.extensions >= config.budget; }
};

struct ExtendOutcome {
  std::vector<int> added;   // new node indices in insertion order
  bool collided = false;
};

/// Repeated straight-line extension toward q_rand (up to max_iter nodes),
/// the baseline that the configuration-space corridor steering reduces to
/// when every corridor is unbounded.
ExtendOutcome extend_straight(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx);

/// Tree extension in configuration space: steer toward the projection of
/// q_rand onto the corridor of the nearest node, reusing q_rand up to
/// max_iter times while extensions stay collision-free.
ExtendOutcome sg_extend_config(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx);

/// Tree extension in task space: project the sampled end-effector position
/// onto the workspace corridor, keep the straight-line step length, and map
/// the step back through the Jacobian pseudoinverse.
ExtendOutcome sg_extend_task(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx);

/// Dispatch on the configured variant.
ExtendOutcome extend(Tree& tree, const Eigen::VectorXd& q_rand, ExtensionContext& ctx);

/// Runs the configured variant until a node reaches the goal region and
/// connects to the goal, or the extension budget is exhausted. Throws
/// "invalid endpoints" when start or goal is in collision, and a usage
/// error when the variant needs a model that `models` does not provide.
PlanResult plan(const Scenario& scenario, const PlannerConfig& config, const LearnedModels* models,
                std::uint64_t seed, const PlanHooks* hooks = nullptr);

nlohmann::json plan_result_to_json(const PlanResult& result, bool include_trees = false);

}  // namespace safecorridor

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "safecorridor/gmm.hpp"
#include "safecorridor/models.hpp"
#include "safecorridor/planner_config.hpp"
#include "safecorridor/robots.hpp"
#include "safecorridor/scenario.hpp"

namespace safecorridor {

enum class LocalPlanner { kStraightLine, kSafetyGuided };

LocalPlanner parse_local_planner(const std::string& name);
std::string to_string(LocalPlanner planner);

struct LocalConnectResult {
  bool connected = false;
  int steps = 0;
  std::vector<Eigen::VectorXd> waypoints;  // q_a first; ends with q_b on success
};

/// Repeatedly steps from q_a toward q_b with the chosen primitive. Succeeds
/// when the current configuration is within d_min of q_b and the closing
/// segment to q_b is free. Every executed segment is collision-checked.
/// The safety-guided primitive needs `collision_model`.
LocalConnectResult local_connect(const Eigen::VectorXd& q_a, const Eigen::VectorXd& q_b, const Robot& robot,
                                 const ObstacleSet& obstacles, const PlannerConfig& config,
                                 LocalPlanner planner, const MixtureModel* collision_model, int max_steps = 100,
                                 std::size_t* checks = nullptr);

/// Edges are undirected (i < j). edge_paths[e] is the certified polyline
/// from vertices[i] to vertices[j].
struct Roadmap {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<Eigen::VectorXd>> edge_paths;
  std::size_t collision_checks = 0;

  std::size_t edge_count() const { return edges.size(); }
};

struct PrmOptions {
  std::size_t n_vertices = 200;
  std::size_t k_neighbors = 10;
  LocalPlanner local_planner = LocalPlanner::kStraightLine;
  int max_steps = 100;
};

/// Samples n collision-free vertices uniformly and tries each vertex against
/// its k nearest vertices. Requires a collision model for the safety-guided
/// local planner.
Roadmap prm_build(const Scenario& scenario, const PrmOptions& options, const MixtureModel* collision_model,
                  Rng& rng);

/// Vertex count of the largest connected component.
std::size_t largest_component(const Roadmap& roadmap);

}  // namespace safecorridor

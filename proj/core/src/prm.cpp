#include "safecorridor/prm.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "safecorridor/corridor.hpp"
#include "safecorridor/error.hpp"
#include "safecorridor/planners.hpp"

namespace safecorridor {

LocalPlanner parse_local_planner(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "straight" || key == "straight_line") return LocalPlanner::kStraightLine;
  if (key == "sg" || key == "safety_guided") return LocalPlanner::kSafetyGuided;
  throw Error(ErrorCode::kInvalidArgument, "unknown local planner '" + name + "'");
}

std::string to_string(LocalPlanner planner) {
  return planner == LocalPlanner::kStraightLine ? "straight-line" : "safety-guided";
}

LocalConnectResult local_connect(const Eigen::VectorXd& q_a, const Eigen::VectorXd& q_b, const Robot& robot,
                                 const ObstacleSet& obstacles, const PlannerConfig& config,
                                 LocalPlanner planner, const MixtureModel* collision_model, int max_steps,
                                 std::size_t* checks) {
  if (max_steps < 1) throw Error(ErrorCode::kInvalidArgument, "max_steps must be at least 1");
  if (planner == LocalPlanner::kSafetyGuided && collision_model == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "safety-guided local planner requires a collision model");
  }
  LocalConnectResult out;
  out.waypoints.push_back(q_a);
  ActiveSetCache cache;
  Eigen::VectorXd current = q_a;

  while ((current - q_b).norm() > config.goal_threshold) {
    if (out.steps >= max_steps) return out;
    Eigen::VectorXd target = q_b;
    if (planner == LocalPlanner::kSafetyGuided) {
      try {
        const SafeCorridor corridor =
            build_corridor(current, collision_model->gmm, collision_model->levels, config.epsilon);
        target = project_onto_corridor(corridor, q_b, cache).point;
      } catch (const Error&) {
        return out;
      }
    }
    const Eigen::VectorXd next = straight_line_steer(current, target, config.step);
    if (next == current) return out;
    ++out.steps;
    if (!segment_collision_free(robot, current, next, config.resolution, obstacles, checks, false)) return out;
    out.waypoints.push_back(next);
    current = next;
  }
  if (current != q_b) {
    if (!segment_collision_free(robot, current, q_b, config.resolution, obstacles, checks, false)) return out;
    out.waypoints.push_back(q_b);
  }
  out.connected = true;
  return out;
}

Roadmap prm_build(const Scenario& scenario, const PrmOptions& options, const MixtureModel* collision_model,
                  Rng& rng) {
  if (options.n_vertices < 2) throw Error(ErrorCode::kInvalidArgument, "PRM needs at least two vertices");
  const Robot& robot = scenario.robot;
  const PlannerConfig& config = scenario.planner;
  Roadmap roadmap;

  const std::size_t attempt_cap = options.n_vertices * 10000;
  for (std::size_t attempt = 0; roadmap.vertices.size() < options.n_vertices; ++attempt) {
    if (attempt >= attempt_cap) throw Error(ErrorCode::kInvalidArgument, "free space too small to sample");
    Eigen::VectorXd q = uniform_sample(robot.limits(), rng);
    ++roadmap.collision_checks;
    if (!robot.in_collision(q, scenario.obstacles)) roadmap.vertices.push_back(std::move(q));
  }

  const std::size_t n = roadmap.vertices.size();
  const std::size_t k = std::min(options.k_neighbors, n - 1);
  std::set<std::pair<int, int>> candidates;
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(n);
    for (std::size_t j = 0; j < n; ++j) dist[j] = (roadmap.vertices[j] - roadmap.vertices[i]).squaredNorm();
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](int a, int b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    for (std::size_t m = 0; m < k; ++m) {
      const int j = order[m];
      candidates.emplace(std::min<int>(static_cast<int>(i), j), std::max<int>(static_cast<int>(i), j));
    }
    order.resize(n);
  }

  for (const auto& [i, j] : candidates) {
    LocalConnectResult link =
        local_connect(roadmap.vertices[static_cast<std::size_t>(i)], roadmap.vertices[static_cast<std::size_t>(j)],
                      robot, scenario.obstacles, config, options.local_planner, collision_model,
                      options.max_steps, &roadmap.collision_checks);
    if (!link.connected) continue;
    roadmap.edges.emplace_back(i, j);
    roadmap.edge_paths.push_back(std::move(link.waypoints));
  }
  return roadmap;
}

std::size_t largest_component(const Roadmap& roadmap) {
  std::vector<int> root(roadmap.vertices.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[static_cast<std::size_t>(v)] != v) {
      root[static_cast<std::size_t>(v)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
      v = root[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const auto& [a, b] : roadmap.edges) root[static_cast<std::size_t>(find(a))] = find(b);
  std::vector<std::size_t> size(roadmap.vertices.size(), 0);
  std::size_t best = 0;
  for (std::size_t v = 0; v < roadmap.vertices.size(); ++v) {
    best = std::max(best, ++size[static_cast<std::size_t>(find(static_cast<int>(v)))]);
  }
  return best;
}

}  // namespace safecorridor

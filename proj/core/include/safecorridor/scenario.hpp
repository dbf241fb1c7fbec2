#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "safecorridor/planner_config.hpp"
#include "safecorridor/robots.hpp"

namespace safecorridor {

/// Declarative planning problem: robot, obstacles, endpoints and planner
/// defaults.
struct Scenario {
  std::string name;
  Robot robot;
  ObstacleSet obstacles;
  Eigen::VectorXd start;
  Eigen::VectorXd goal;
  PlannerConfig planner;

  /// Throws when endpoints have the wrong size or fall outside the limits.
  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

Eigen::VectorXd vector_from_json(const nlohmann::json& array);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace safecorridor

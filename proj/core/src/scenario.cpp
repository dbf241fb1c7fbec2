#include "safecorridor/scenario.hpp"

#include <fstream>
#include <numbers>

#include "safecorridor/error.hpp"

namespace safecorridor {

using nlohmann::json;

namespace {

JointLimits limits_from_json(const json& doc, int dim) {
  if (doc.is_null()) return JointLimits::symmetric(dim, std::numbers::pi);
  if (!doc.is_array() || static_cast<int>(doc.size()) != dim) {
    throw Error(ErrorCode::kParse, "joint_limits must list one [lo, hi] pair per joint");
  }
  JointLimits limits{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  for (int i = 0; i < dim; ++i) {
    limits.lower[i] = doc[i].at(0).get<double>();
    limits.upper[i] = doc[i].at(1).get<double>();
    if (!(limits.lower[i] < limits.upper[i])) throw Error(ErrorCode::kParse, "joint limit lo must be below hi");
  }
  return limits;
}

json limits_to_json(const JointLimits& limits) {
  json out = json::array();
  for (int i = 0; i < limits.dim(); ++i) out.push_back({limits.lower[i], limits.upper[i]});
  return out;
}

Robot robot_from_json(const json& doc) {
  const std::string type = doc.value("type", "planar_arm");
  if (type == "planar_arm" || type == "arm") {
    PlanarArm arm;
    arm.link_lengths = doc.at("link_lengths").get<std::vector<double>>();
    if (doc.contains("base")) {
      const auto base = doc.at("base").get<std::vector<double>>();
      if (base.size() != 2) throw Error(ErrorCode::kParse, "arm base must be 2D");
      arm.base = Eigen::Vector2d(base[0], base[1]);
    }
    arm.limits = limits_from_json(doc.value("joint_limits", json()), arm.dof());
    return Robot(std::move(arm));
  }
  if (type == "point") {
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) throw Error(ErrorCode::kParse, "point robot dimension must be positive");
    return Robot(PointRobot{limits_from_json(doc.value("joint_limits", json()), dim)});
  }
  throw Error(ErrorCode::kParse, "unknown robot type '" + type + "'");
}

json robot_to_json(const Robot& robot) {
  json out;
  out["type"] = robot.type_name();
  if (robot.is_arm()) {
    out["link_lengths"] = robot.arm().link_lengths;
    out["base"] = {robot.arm().base.x(), robot.arm().base.y()};
  } else {
    out["dim"] = robot.dof();
  }
  out["joint_limits"] = limits_to_json(robot.limits());
  return out;
}

PlannerConfig planner_from_json(const json& doc) {
  PlannerConfig c;
  if (doc.is_null()) return c;
  if (doc.contains("variant")) c.variant = parse_variant(doc.at("variant").get<std::string>());
  c.step = doc.value("delta", c.step);
  c.goal_threshold = doc.value("d_min", c.goal_threshold);
  c.max_iter = doc.value("max_iter", c.max_iter);
  c.goal_bias = doc.value("goal_bias", c.goal_bias);
  c.bias_goal = doc.value("bias_goal", c.bias_goal);
  c.bidirectional = doc.value("bidirectional", c.bidirectional);
  c.kappa = doc.value("kappa", c.kappa);
  c.epsilon = doc.value("epsilon", c.epsilon);
  c.resolution = doc.value("resolution", c.resolution);
  c.budget = doc.value("budget", c.budget);
  c.seed = doc.value("seed", c.seed);
  c.validate();
  return c;
}

json planner_to_json(const PlannerConfig& c) {
  return {{"variant", to_string(c.variant)}, {"delta", c.step},         {"d_min", c.goal_threshold},
          {"max_iter", c.max_iter},          {"goal_bias", c.goal_bias}, {"bias_goal", c.bias_goal},
          {"bidirectional", c.bidirectional}, {"kappa", c.kappa},       {"epsilon", c.epsilon},
          {"resolution", c.resolution},      {"budget", c.budget},       {"seed", c.seed}};
}

}  // namespace

Eigen::VectorXd vector_from_json(const json& array) {
  if (!array.is_array()) throw Error(ErrorCode::kParse, "expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(array.size()));
  for (std::size_t i = 0; i < array.size(); ++i) v[static_cast<Eigen::Index>(i)] = array[i].get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

void Scenario::validate() const {
  obstacles.validate();
  const int dof = robot.dof();
  if (start.size() != dof || goal.size() != dof) {
    throw Error(ErrorCode::kDimensionMismatch, "start/goal dimension does not match the robot");
  }
  if (!robot.limits().contains(start) || !robot.limits().contains(goal)) {
    throw Error(ErrorCode::kInvalidArgument, "start and goal must respect the joint limits");
  }
  const int wdim = robot.workspace_dim();
  for (const auto& c : obstacles.circles) {
    if (c.center.size() != wdim) throw Error(ErrorCode::kDimensionMismatch, "obstacle dimension mismatch");
  }
  for (const auto& b : obstacles.boxes) {
    if (b.min.size() != wdim) throw Error(ErrorCode::kDimensionMismatch, "obstacle dimension mismatch");
  }
  planner.validate();
}

Scenario scenario_from_json(const json& doc) {
  try {
    Scenario s;
    s.name = doc.value("name", "");
    s.robot = robot_from_json(doc.at("robot"));
    if (doc.contains("obstacles")) {
      const json& obs = doc.at("obstacles");
      for (const auto& c : obs.value("circles", json::array())) {
        s.obstacles.circles.push_back({vector_from_json(c.at("center")), c.at("radius").get<double>()});
      }
      for (const auto& b : obs.value("boxes", json::array())) {
        s.obstacles.boxes.push_back({vector_from_json(b.at("min")), vector_from_json(b.at("max"))});
      }
      s.obstacles.margin = obs.value("margin", 0.0);
    }
    s.start = vector_from_json(doc.at("start"));
    s.goal = vector_from_json(doc.at("goal"));
    s.planner = planner_from_json(doc.value("planner", json()));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed scenario: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json obstacles;
  obstacles["circles"] = json::array();
  for (const auto& c : s.obstacles.circles) {
    obstacles["circles"].push_back({{"center", vector_to_json(c.center)}, {"radius", c.radius}});
  }
  obstacles["boxes"] = json::array();
  for (const auto& b : s.obstacles.boxes) {
    obstacles["boxes"].push_back({{"min", vector_to_json(b.min)}, {"max", vector_to_json(b.max)}});
  }
  obstacles["margin"] = s.obstacles.margin;
  return {{"name", s.name},
          {"robot", robot_to_json(s.robot)},
          {"obstacles", obstacles},
          {"start", vector_to_json(s.start)},
          {"goal", vector_to_json(s.goal)},
          {"planner", planner_to_json(s.planner)}};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot read scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed scenario " + path.string() + ": " + e.what());
  }
  Scenario s = scenario_from_json(doc);
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

}  // namespace safecorridor

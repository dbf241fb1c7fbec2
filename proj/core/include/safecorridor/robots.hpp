#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace safecorridor {

/// Axis-aligned box of per-joint (or per-axis) bounds, inclusive.
struct JointLimits {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& q) const;
  static JointLimits symmetric(int dim, double half_width);
};

/// Disc in 2D, ball in 3D.
struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

struct Box {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

struct ObstacleSet {
  std::vector<Ball> circles;
  std::vector<Box> boxes;
  double margin = 0.0;  // inflation applied to every obstacle

  bool empty() const { return circles.empty() && boxes.empty(); }
  /// Throws on non-positive radii or inverted boxes.
  void validate() const;
  bool contains_point(const Eigen::VectorXd& p) const;
  bool intersects_segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

/// Planar serial chain with revolute joints and cumulative joint angles.
struct PlanarArm {
  std::vector<double> link_lengths;
  Eigen::Vector2d base = Eigen::Vector2d::Zero();
  JointLimits limits;

  int dof() const { return static_cast<int>(link_lengths.size()); }
  double reach() const;
};

/// Free-flying point whose configuration is its position.
struct PointRobot {
  JointLimits limits;

  int dof() const { return limits.dim(); }
};

struct ArmPose {
  std::vector<Eigen::Vector2d> joints;  // base first, end effector last
  Eigen::Vector2d end_effector;
};

ArmPose forward_kinematics(const PlanarArm& arm, const Eigen::VectorXd& q);
/// 2 x n end-effector Jacobian.
Eigen::MatrixXd jacobian(const PlanarArm& arm, const Eigen::VectorXd& q);
/// Right pseudoinverse J^T (J J^T)^-1; throws "singular Jacobian" when
/// J J^T has condition number above 1e12.
Eigen::MatrixXd jacobian_pinv(const Eigen::MatrixXd& j);

/// Kinematic model the planners see: a planar arm or a point robot.
class Robot {
 public:
  Robot() = default;
  Robot(PlanarArm arm);    // NOLINT(google-explicit-constructor)
  Robot(PointRobot point); // NOLINT(google-explicit-constructor)

  int dof() const;
  int workspace_dim() const;
  const JointLimits& limits() const;
  bool is_arm() const { return std::holds_alternative<PlanarArm>(model_); }
  const PlanarArm& arm() const { return std::get<PlanarArm>(model_); }
  std::string type_name() const;

  /// End-effector (or point) position in the workspace.
  Eigen::VectorXd end_effector(const Eigen::VectorXd& q) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& q) const;
  /// Axis-aligned bounds of every reachable workspace point.
  JointLimits workspace_bounds() const;

  /// True iff q violates the limits or the robot body touches an obstacle.
  bool in_collision(const Eigen::VectorXd& q, const ObstacleSet& obstacles) const;

 private:
  std::variant<PlanarArm, PointRobot> model_;
};

bool config_collision(const Robot& robot, const Eigen::VectorXd& q, const ObstacleSet& obstacles);

/// Number of configurations checked along q1 -> q2 at spacing <= resolution,
/// endpoints included.
std::size_t segment_check_count(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2, double resolution);

/// Checks the interpolated configurations ((m - i) q1 + i q2) / m, i = 0..m,
/// stopping at the first collision. `checks` accumulates predicate calls.
/// With `include_start` false the i = 0 configuration is assumed free and
/// skipped, which is how planners extend from nodes already in a tree.
bool segment_collision_free(const Robot& robot, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                            double resolution, const ObstacleSet& obstacles, std::size_t* checks = nullptr,
                            bool include_start = true);

}  // namespace safecorridor

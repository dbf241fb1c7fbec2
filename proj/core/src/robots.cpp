#include "safecorridor/robots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "safecorridor/error.hpp"

namespace safecorridor {

namespace {

bool segment_hits_ball(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Ball& ball, double margin) {
  const Eigen::VectorXd ab = b - a;
  const double len_sq = ab.squaredNorm();
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp((ball.center - a).dot(ab) / len_sq, 0.0, 1.0);
  const double r = ball.radius + margin;
  return (a + t * ab - ball.center).squaredNorm() <= r * r;
}

// Slab clipping of the parametric segment a + t (b - a), t in [0, 1].
bool segment_hits_box(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Box& box, double margin) {
  double t_enter = 0.0;
  double t_exit = 1.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double lo = box.min[d] - margin;
    const double hi = box.max[d] + margin;
    const double dir = b[d] - a[d];
    if (dir == 0.0) {
      if (a[d] < lo || a[d] > hi) return false;
      continue;
    }
    double t0 = (lo - a[d]) / dir;
    double t1 = (hi - a[d]) / dir;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }
  return true;
}

}  // namespace

bool JointLimits::contains(const Eigen::VectorXd& q) const {
  if (q.size() != lower.size()) return false;
  return (q.array() >= lower.array()).all() && (q.array() <= upper.array()).all();
}

JointLimits JointLimits::symmetric(int dim, double half_width) {
  return {Eigen::VectorXd::Constant(dim, -half_width), Eigen::VectorXd::Constant(dim, half_width)};
}

void ObstacleSet::validate() const {
  for (const auto& c : circles) {
    if (!(c.radius > 0.0) || !c.center.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "circle radius must be positive");
    }
  }
  for (const auto& b : boxes) {
    if (b.min.size() != b.max.size() || !(b.min.array() < b.max.array()).all()) {
      throw Error(ErrorCode::kInvalidArgument, "box min must be below max on every axis");
    }
  }
  if (margin < 0.0) throw Error(ErrorCode::kInvalidArgument, "obstacle margin must be nonnegative");
}

bool ObstacleSet::contains_point(const Eigen::VectorXd& p) const {
  return intersects_segment(p, p);
}

bool ObstacleSet::intersects_segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  for (const auto& c : circles) {
    if (segment_hits_ball(a, b, c, margin)) return true;
  }
  for (const auto& box : boxes) {
    if (segment_hits_box(a, b, box, margin)) return true;
  }
  return false;
}

double PlanarArm::reach() const {
  double total = 0.0;
  for (double l : link_lengths) total += l;
  return total;
}

ArmPose forward_kinematics(const PlanarArm& arm, const Eigen::VectorXd& q) {
  if (q.size() != arm.dof()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  ArmPose pose;
  pose.joints.reserve(arm.link_lengths.size() + 1);
  Eigen::Vector2d p = arm.base;
  pose.joints.push_back(p);
  double angle = 0.0;
  for (std::size_t j = 0; j < arm.link_lengths.size(); ++j) {
    angle += q[static_cast<Eigen::Index>(j)];
    p += arm.link_lengths[j] * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    pose.joints.push_back(p);
  }
  pose.end_effector = p;
  return pose;
}

Eigen::MatrixXd jacobian(const PlanarArm& arm, const Eigen::VectorXd& q) {
  if (q.size() != arm.dof()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  const int n = arm.dof();
  std::vector<Eigen::Vector2d> tangent(n);
  double angle = 0.0;
  for (int j = 0; j < n; ++j) {
    angle += q[j];
    tangent[j] = arm.link_lengths[j] * Eigen::Vector2d(-std::sin(angle), std::cos(angle));
  }
  // Column i sums the link tangents from joint i outward.
  Eigen::MatrixXd jac(2, n);
  Eigen::Vector2d tail = Eigen::Vector2d::Zero();
  for (int i = n - 1; i >= 0; --i) {
    tail += tangent[i];
    jac.col(i) = tail;
  }
  return jac;
}

Eigen::MatrixXd jacobian_pinv(const Eigen::MatrixXd& j) {
  const Eigen::MatrixXd jjt = j * j.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jjt, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) throw Error(ErrorCode::kSingularJacobian, "singular Jacobian");
  return jjt.ldlt().solve(j).transpose();
}

Robot::Robot(PlanarArm arm) : model_(std::move(arm)) {
  const auto& a = std::get<PlanarArm>(model_);
  if (a.link_lengths.empty()) throw Error(ErrorCode::kInvalidArgument, "arm needs at least one link");
  for (double l : a.link_lengths) {
    if (!(l > 0.0)) throw Error(ErrorCode::kInvalidArgument, "link lengths must be positive");
  }
  if (a.limits.dim() != a.dof()) throw Error(ErrorCode::kDimensionMismatch, "joint limits do not match links");
}

Robot::Robot(PointRobot point) : model_(std::move(point)) {
  if (std::get<PointRobot>(model_).dof() < 1) throw Error(ErrorCode::kInvalidArgument, "point robot needs bounds");
}

int Robot::dof() const {
  return std::visit([](const auto& m) { return m.dof(); }, model_);
}

int Robot::workspace_dim() const { return is_arm() ? 2 : dof(); }

const JointLimits& Robot::limits() const {
  return std::visit([](const auto& m) -> const JointLimits& { return m.limits; }, model_);
}

std::string Robot::type_name() const { return is_arm() ? "planar_arm" : "point"; }

Eigen::VectorXd Robot::end_effector(const Eigen::VectorXd& q) const {
  if (is_arm()) return forward_kinematics(arm(), q).end_effector;
  return q;
}

Eigen::MatrixXd Robot::jacobian(const Eigen::VectorXd& q) const {
  if (is_arm()) return safecorridor::jacobian(arm(), q);
  return Eigen::MatrixXd::Identity(dof(), dof());
}

JointLimits Robot::workspace_bounds() const {
  if (!is_arm()) return limits();
  const auto& a = arm();
  const Eigen::Vector2d r = Eigen::Vector2d::Constant(a.reach());
  return {a.base - r, a.base + r};
}

bool Robot::in_collision(const Eigen::VectorXd& q, const ObstacleSet& obstacles) const {
  if (!limits().contains(q)) return true;
  if (!is_arm()) return obstacles.contains_point(q);
  const ArmPose pose = forward_kinematics(arm(), q);
  for (std::size_t i = 0; i + 1 < pose.joints.size(); ++i) {
    if (obstacles.intersects_segment(pose.joints[i], pose.joints[i + 1])) return true;
  }
  return false;
}

bool config_collision(const Robot& robot, const Eigen::VectorXd& q, const ObstacleSet& obstacles) {
  return robot.in_collision(q, obstacles);
}

std::size_t segment_check_count(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  const double length = (q2 - q1).norm();
  if (length == 0.0) return 1;
  // The small relative slack keeps exact multiples (1.0 / 0.1) from gaining a step.
  const double steps = std::ceil(length / resolution - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, steps)) + 1;
}

bool segment_collision_free(const Robot& robot, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                            double resolution, const ObstacleSet& obstacles, std::size_t* checks,
                            bool include_start) {
  const std::size_t count = segment_check_count(q1, q2, resolution);
  if (count == 1) {
    if (!include_start && q1 == q2) return true;
    if (checks != nullptr) ++*checks;
    return !robot.in_collision(q1, obstacles);
  }
  const double m = static_cast<double>(count - 1);
  for (std::size_t i = include_start ? 0 : 1; i < count; ++i) {
    const double k = static_cast<double>(i);
    const Eigen::VectorXd q = ((m - k) * q1 + k * q2) / m;
    if (checks != nullptr) ++*checks;
    if (robot.in_collision(q, obstacles)) return false;
  }
  return true;
}

}  // namespace safecorridor

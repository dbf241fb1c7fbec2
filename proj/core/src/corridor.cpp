#include "safecorridor/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safecorridor/error.hpp"

namespace safecorridor {

Eigen::MatrixXd SafeCorridor::constraint_matrix() const {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(halfspaces.size()), anchor.size());
  for (std::size_t i = 0; i < halfspaces.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = halfspaces[i].normal.transpose();
  }
  return a;
}

Eigen::VectorXd SafeCorridor::constraint_bounds() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(halfspaces.size()));
  for (std::size_t i = 0; i < halfspaces.size(); ++i) {
    b[static_cast<Eigen::Index>(i)] = halfspaces[i].offset + halfspaces[i].normal.dot(anchor);
  }
  return b;
}

SafeCorridor build_corridor(const Eigen::VectorXd& anchor, const GaussianMixture& gmm,
                            const ComponentLevels& levels, double epsilon) {
  if (!anchor.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite anchor");
  if (anchor.size() != gmm.dim()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  if (levels.size() != gmm.size()) {
    throw Error(ErrorCode::kInvalidArgument, "confidence levels do not match the mixture");
  }
  SafeCorridor corridor;
  corridor.anchor = anchor;
  corridor.epsilon = epsilon;
  corridor.halfspaces.reserve(gmm.size());
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    if (levels.per_component[k] <= 0.0) continue;
    const auto& geometry = gmm.geometry(k);
    Eigen::VectorXd toward_mean = gmm.component(k).mean - anchor;
    if (toward_mean.squaredNorm() == 0.0) {
      // Anchor sits on the mean; any fixed direction gives a valid separating face.
      toward_mean = Eigen::VectorXd::Zero(anchor.size());
      toward_mean[0] = 1e-9;
    }
    const double whitened = (geometry.inv_sqrt * toward_mean).norm();
    const double radius = std::sqrt(levels.per_component_radius_sq[k]);
    HalfSpace h;
    h.normal = geometry.precision * toward_mean / (whitened * whitened);
    h.offset = std::max(1.0 - radius / whitened, epsilon);
    h.source_component = k;
    corridor.halfspaces.push_back(std::move(h));
  }
  return corridor;
}

double corridor_violation(const SafeCorridor& corridor, const Eigen::VectorXd& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : corridor.halfspaces) {
    worst = std::max(worst, h.normal.dot(x - corridor.anchor) - h.offset);
  }
  return worst;
}

bool corridor_contains(const SafeCorridor& corridor, const Eigen::VectorXd& x, double tolerance) {
  if (x.size() != corridor.anchor.size()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  return std::all_of(corridor.halfspaces.begin(), corridor.halfspaces.end(), [&](const HalfSpace& h) {
    return h.normal.dot(x - corridor.anchor) <= h.offset + tolerance;
  });
}

}  // namespace safecorridor

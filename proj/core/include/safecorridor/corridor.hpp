#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "safecorridor/confidence.hpp"
#include "safecorridor/gmm.hpp"

namespace safecorridor {

/// One corridor face in anchor-centred form: normal^T (x - anchor) <= offset.
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;
  std::size_t source_component = 0;
};

/// Convex polytope of tangent half-spaces separating the anchor from each
/// component's confidence ellipsoid, relaxed by the tolerance epsilon.
struct SafeCorridor {
  Eigen::VectorXd anchor;
  std::vector<HalfSpace> halfspaces;
  double epsilon = 0.0;

  int dim() const { return static_cast<int>(anchor.size()); }
  std::size_t size() const { return halfspaces.size(); }

  /// Stacked rows for A x <= b in absolute coordinates.
  Eigen::MatrixXd constraint_matrix() const;
  Eigen::VectorXd constraint_bounds() const;
};

SafeCorridor build_corridor(const Eigen::VectorXd& anchor, const GaussianMixture& gmm,
                            const ComponentLevels& levels, double epsilon);

/// Inclusive membership test with absolute slack `tolerance`.
bool corridor_contains(const SafeCorridor& corridor, const Eigen::VectorXd& x,
                       double tolerance = 0.0);

/// Largest constraint value a_k^T x - b_k (<= 0 means inside).
double corridor_violation(const SafeCorridor& corridor, const Eigen::VectorXd& x);

/// Warm-start state for repeated projections of one target.
struct ActiveSetCache {
  std::vector<std::size_t> last_active;
  Eigen::VectorXd last_target;
  bool valid_for_target = false;

  void invalidate() {
    last_active.clear();
    valid_for_target = false;
  }
};

struct ProjectionResult {
  Eigen::VectorXd point;
  std::vector<std::size_t> active;   // sorted constraint indices binding at `point`
  Eigen::VectorXd multipliers;       // one per entry of `active`
  int iterations = 0;                // active-set iterations (0 when the warm start is optimal)
  bool warm_start_hit = false;
};

/// Euclidean projection of `target` onto the corridor by a primal active-set
/// method, warm-started from `cache` when it holds an active set for the same
/// target. Throws "projection nonconvergent" after 10 K + 20 iterations and
/// "empty corridor" when no feasible point exists.
ProjectionResult project_onto_corridor(const SafeCorridor& corridor, const Eigen::VectorXd& target,
                                       ActiveSetCache& cache);

ProjectionResult project_onto_corridor(const SafeCorridor& corridor, const Eigen::VectorXd& target);

/// Projection onto a general polytope {x : A x <= b}. `start` must be
/// feasible when provided; otherwise an elastic phase finds one.
ProjectionResult project_onto_polytope(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& target, const Eigen::VectorXd* start,
                                       ActiveSetCache* cache);

/// Max of primal infeasibility, dual infeasibility, complementarity and
/// stationarity residual of a projection result.
double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& target,
                    const ProjectionResult& result);

}  // namespace safecorridor

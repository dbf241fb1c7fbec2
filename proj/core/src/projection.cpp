#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "safecorridor/corridor.hpp"
#include "safecorridor/error.hpp"

namespace safecorridor {

namespace {

using Index = Eigen::Index;

// Rows of `a` normalized to unit length; bounds scaled alike so slacks are
// Euclidean distances to each face.
struct NormalizedPolytope {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd row_norm;

  NormalizedPolytope(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in)
      : a(a_in), b(b_in), row_norm(a_in.rows()) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double norm = a.row(i).norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::kInvalidArgument, "constraint normal must be finite and nonzero");
      }
      row_norm[i] = norm;
      a.row(i) /= norm;
      b[i] /= norm;
    }
  }

  Index rows() const { return a.rows(); }
  Index cols() const { return a.cols(); }
  double slack(Index i, const Eigen::VectorXd& x) const { return b[i] - a.row(i).dot(x); }
  double max_violation(const Eigen::VectorXd& x) const {
    if (rows() == 0) return -std::numeric_limits<double>::infinity();
    return (a * x - b).maxCoeff();
  }
};

struct Tolerances {
  double feasibility;
  double active;
  double multiplier;
  double step;
};

Tolerances make_tolerances(const NormalizedPolytope& p, const Eigen::VectorXd& target) {
  double scale = 1.0 + target.cwiseAbs().maxCoeff();
  if (p.rows() > 0) scale += p.b.cwiseAbs().maxCoeff();
  return {1e-11 * scale, 1e-10 * scale, 1e-12 * scale, 1e-13 * scale};
}

// Greedy index-ordered selection of linearly independent rows.
std::vector<Index> independent_subset(const NormalizedPolytope& p, const std::vector<Index>& candidates) {
  std::vector<Index> chosen;
  std::vector<Eigen::VectorXd> basis;
  for (Index i : candidates) {
    if (static_cast<Index>(basis.size()) == p.cols()) break;
    Eigen::VectorXd r = p.a.row(i).transpose();
    for (const auto& q : basis) r -= q.dot(r) * q;
    const double norm = r.norm();
    if (norm > 1e-9) {
      basis.push_back(r / norm);
      chosen.push_back(i);
    }
  }
  return chosen;
}

struct EqualitySolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
};

// Projection of the target onto the affine set {a_i^T x = b_i, i in rows}.
EqualitySolution project_affine(const NormalizedPolytope& p, const std::vector<Index>& rows,
                                const Eigen::VectorXd& target) {
  EqualitySolution s;
  if (rows.empty()) {
    s.x = target;
    s.lambda.resize(0);
    return s;
  }
  const Index m = static_cast<Index>(rows.size());
  Eigen::MatrixXd aw(m, p.cols());
  Eigen::VectorXd bw(m);
  for (Index j = 0; j < m; ++j) {
    aw.row(j) = p.a.row(rows[j]);
    bw[j] = p.b[rows[j]];
  }
  const Eigen::MatrixXd gram = aw * aw.transpose();
  s.lambda = gram.ldlt().solve(aw * target - bw);
  s.x = target - aw.transpose() * s.lambda;
  return s;
}

struct SolverState {
  Eigen::VectorXd x;
  std::vector<Index> working;  // kept sorted
  Eigen::VectorXd lambda;
  int iterations = 0;
};

// Primal active-set iterations for min 1/2 |x - target|^2 s.t. A x <= b
// from a feasible state. Each step keeps feasibility and does not increase
// the objective.
void primal_active_set(const NormalizedPolytope& p, const Eigen::VectorXd& target, const Tolerances& tol,
                       SolverState& state, int max_iterations) {
  while (true) {
    if (state.iterations >= max_iterations) {
      throw Error(ErrorCode::kProjectionNonconvergent, "projection nonconvergent");
    }
    ++state.iterations;

    const EqualitySolution eq = project_affine(p, state.working, target);
    const Eigen::VectorXd step = eq.x - state.x;
    if (step.norm() <= tol.step) {
      state.x = eq.x;
      state.lambda = eq.lambda;
      if (state.working.empty()) return;
      Index drop = -1;
      double most_negative = -tol.multiplier;
      for (Index j = 0; j < static_cast<Index>(state.working.size()); ++j) {
        if (eq.lambda[j] < most_negative) {
          most_negative = eq.lambda[j];
          drop = j;
        }
      }
      if (drop < 0) return;
      state.working.erase(state.working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    Index blocking = -1;
    for (Index i = 0; i < p.rows(); ++i) {
      if (std::binary_search(state.working.begin(), state.working.end(), i)) continue;
      const double rate = p.a.row(i).dot(step);
      if (rate <= 1e-14) continue;
      const double ratio = std::max(0.0, p.slack(i, state.x)) / rate;
      if (ratio < alpha) {
        alpha = ratio;
        blocking = i;
      }
    }
    state.x += alpha * step;
    if (blocking >= 0) {
      state.working.insert(std::upper_bound(state.working.begin(), state.working.end(), blocking), blocking);
    }
  }
}

struct Solution {
  Eigen::VectorXd x;
  std::vector<Index> active;
  Eigen::VectorXd lambda;  // normalized-row multipliers aligned with `active`
};

// Recomputes the optimum from the constraints that bind at `x`, so the
// result depends only on that set and not on the path that found it.
Solution canonicalize(const NormalizedPolytope& p, const Eigen::VectorXd& target, const Tolerances& tol,
                      const Eigen::VectorXd& x, const std::vector<Index>& working,
                      const Eigen::VectorXd& working_lambda) {
  std::vector<Index> binding;
  for (Index i = 0; i < p.rows(); ++i) {
    if (std::abs(p.slack(i, x)) <= tol.active) binding.push_back(i);
  }
  const std::vector<Index> basis = independent_subset(p, binding);
  const EqualitySolution eq = project_affine(p, basis, target);

  Solution out;
  out.x = eq.x;
  out.active = binding;
  out.lambda = Eigen::VectorXd::Zero(static_cast<Index>(binding.size()));
  for (Index j = 0; j < static_cast<Index>(working.size()); ++j) {
    auto it = std::lower_bound(binding.begin(), binding.end(), working[j]);
    if (it != binding.end() && *it == working[j]) out.lambda[it - binding.begin()] = working_lambda[j];
  }
  return out;
}

std::vector<Index> active_at(const NormalizedPolytope& p, const Eigen::VectorXd& x, double tol) {
  std::vector<Index> rows;
  for (Index i = 0; i < p.rows(); ++i) {
    if (p.slack(i, x) <= tol) rows.push_back(i);
  }
  return independent_subset(p, rows);
}

// Finds a feasible point by projecting (target, -rho) onto the elastic set
// {(x, s) : a_i^T x - s <= b_i, s >= 0}; for rho above the optimal
// multiplier mass the elastic variable vanishes.
Eigen::VectorXd elastic_feasible_point(const NormalizedPolytope& p, const Eigen::VectorXd& target,
                                       const Eigen::VectorXd& seed, int max_iterations) {
  const Index n = p.cols();
  const Index k = p.rows();
  Eigen::MatrixXd a_aug = Eigen::MatrixXd::Zero(k + 1, n + 1);
  Eigen::VectorXd b_aug = Eigen::VectorXd::Zero(k + 1);
  a_aug.topLeftCorner(k, n) = p.a;
  a_aug.block(0, n, k, 1).setConstant(-1.0);
  b_aug.head(k) = p.b;
  a_aug(k, n) = -1.0;
  const NormalizedPolytope aug(a_aug, b_aug);

  const double base = 1.0 + (target - seed).norm() + p.b.cwiseAbs().maxCoeff();
  for (double rho = 1e2 * base; rho <= 1e10 * base; rho *= 100.0) {
    Eigen::VectorXd aug_target(n + 1);
    aug_target << target, -rho;
    SolverState state;
    state.x.resize(n + 1);
    state.x << seed, std::max(0.0, p.max_violation(seed));
    const Tolerances tol = make_tolerances(aug, aug_target);
    state.working = active_at(aug, state.x, tol.feasibility);
    primal_active_set(aug, aug_target, tol, state, max_iterations);
    if (state.x[n] <= 1e-9 * base) return state.x.head(n);
  }
  throw Error(ErrorCode::kEmptyCorridor, "empty corridor");
}

}  // namespace

ProjectionResult project_onto_polytope(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& target, const Eigen::VectorXd* start,
                                       ActiveSetCache* cache) {
  if (a.cols() != target.size() || a.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  }
  const NormalizedPolytope p(a, b);
  const Tolerances tol = make_tolerances(p, target);
  const int max_iterations = 10 * static_cast<int>(p.rows()) + 20;

  auto finish = [&](const Solution& s, int iterations, bool warm) {
    ProjectionResult r;
    r.point = s.x;
    r.iterations = iterations;
    r.warm_start_hit = warm;
    r.active.assign(s.active.begin(), s.active.end());
    r.multipliers.resize(s.lambda.size());
    for (Index j = 0; j < s.lambda.size(); ++j) r.multipliers[j] = s.lambda[j] / p.row_norm[s.active[j]];
    if (cache != nullptr) {
      cache->last_active = r.active;
      cache->last_target = target;
      cache->valid_for_target = true;
    }
    return r;
  };

  if (p.max_violation(target) <= 0.0) {
    return finish(Solution{target, {}, Eigen::VectorXd()}, 0, false);
  }

  SolverState state;
  bool warm_state = false;
  if (cache != nullptr && cache->valid_for_target && cache->last_target.size() == target.size() &&
      cache->last_target == target && !cache->last_active.empty()) {
    std::vector<Index> previous;
    for (std::size_t i : cache->last_active) {
      if (static_cast<Index>(i) < p.rows()) previous.push_back(static_cast<Index>(i));
    }
    if (previous.size() == cache->last_active.size()) {
      const std::vector<Index> rows = independent_subset(p, previous);
      const EqualitySolution eq = project_affine(p, rows, target);
      if (p.max_violation(eq.x) <= tol.feasibility) {
        if (eq.lambda.size() == 0 || eq.lambda.minCoeff() >= -tol.multiplier) {
          return finish(canonicalize(p, target, tol, eq.x, rows, eq.lambda), 0, true);
        }
        // Feasible but not optimal: continue the active-set method from here.
        state.x = eq.x;
        state.working = rows;
        warm_state = true;
      }
    } else {
      cache->invalidate();
    }
  }

  if (!warm_state) {
    if (start != nullptr && start->size() == target.size() && p.max_violation(*start) <= tol.feasibility) {
      state.x = *start;
    } else {
      const Eigen::VectorXd seed = start != nullptr ? *start : target;
      state.x = elastic_feasible_point(p, target, seed, 10 * static_cast<int>(p.rows() + 1) + 20);
    }
    state.working = active_at(p, state.x, tol.feasibility);
  }

  primal_active_set(p, target, tol, state, max_iterations);
  return finish(canonicalize(p, target, tol, state.x, state.working, state.lambda), state.iterations, false);
}

ProjectionResult project_onto_corridor(const SafeCorridor& corridor, const Eigen::VectorXd& target,
                                       ActiveSetCache& cache) {
  if (target.size() != corridor.anchor.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  }
  if (!target.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite target");
  if (corridor_contains(corridor, target)) {
    ProjectionResult r;
    r.point = target;
    cache.last_active.clear();
    cache.last_target = target;
    cache.valid_for_target = true;
    return r;
  }
  // Solve in anchor-centred coordinates where the anchor is the origin.
  Eigen::MatrixXd a = corridor.constraint_matrix();
  Eigen::VectorXd b(static_cast<Index>(corridor.size()));
  bool anchor_feasible = true;
  for (std::size_t i = 0; i < corridor.size(); ++i) {
    b[static_cast<Index>(i)] = corridor.halfspaces[i].offset;
    anchor_feasible = anchor_feasible && corridor.halfspaces[i].offset >= 0.0;
  }
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(corridor.anchor.size());
  const Eigen::VectorXd centred_target = target - corridor.anchor;

  // The cache is keyed on the absolute target; translate it for the solver.
  ActiveSetCache centred_cache;
  if (cache.valid_for_target && cache.last_target.size() == target.size() && cache.last_target == target) {
    centred_cache.last_active = cache.last_active;
    centred_cache.last_target = centred_target;
    centred_cache.valid_for_target = true;
  }
  ProjectionResult r =
      project_onto_polytope(a, b, centred_target, anchor_feasible ? &origin : nullptr, &centred_cache);
  r.point += corridor.anchor;
  cache.last_active = centred_cache.last_active;
  cache.last_target = target;
  cache.valid_for_target = true;
  return r;
}

ProjectionResult project_onto_corridor(const SafeCorridor& corridor, const Eigen::VectorXd& target) {
  ActiveSetCache scratch;
  return project_onto_corridor(corridor, target, scratch);
}

double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& target,
                    const ProjectionResult& result) {
  const Eigen::VectorXd& x = result.point;
  double residual = 0.0;
  if (a.rows() > 0) residual = std::max(residual, (a * x - b).maxCoeff());
  Eigen::VectorXd stationarity = x - target;
  for (std::size_t j = 0; j < result.active.size(); ++j) {
    const Index i = static_cast<Index>(result.active[j]);
    const double lambda = result.multipliers[static_cast<Index>(j)];
    residual = std::max(residual, -lambda);
    residual = std::max(residual, std::abs(lambda * (a.row(i).dot(x) - b[i])));
    stationarity += lambda * a.row(i).transpose();
  }
  return std::max(residual, stationarity.cwiseAbs().maxCoeff());
}

}  // namespace safecorridor

#pragma once

#include <vector>

#include <Eigen/Core>

#include "safecorridor/gmm.hpp"

namespace safecorridor {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
double chi2_cdf(int dof, double t);

/// Quantile of chi-squared; kappa must lie in [0, 1).
double chi2_inv_cdf(int dof, double kappa);

/// Density level whose super level set is the kappa-confidence ellipsoid
/// of a Gaussian with this covariance.
double gaussian_level(double kappa, const Eigen::MatrixXd& covariance);

struct LevelInverse {
  double kappa = 0.0;
  bool above_mode = false;  // level exceeded the peak density; kappa clamped to 0
};

/// Confidence level of the super level set {g >= level}.
LevelInverse gaussian_level_inv(double level, const Eigen::MatrixXd& covariance);

/// Per-component confidence levels derived from one shared density level.
struct ComponentLevels {
  double overall_level = 0.0;          // target kappa
  double shared_density_level = 0.0;   // Lambda
  std::vector<double> per_component;   // kappa_k
  std::vector<double> per_component_radius_sq;  // chi2 quantile at kappa_k

  std::size_t size() const { return per_component.size(); }
  /// sum_k w_k kappa_k for the mixture these levels were computed on.
  double weighted_level(const GaussianMixture& gmm) const;
};

/// Bisection on the shared density level so that sum_k w_k kappa_k equals
/// `kappa` within 1e-6. Components whose scaled level exceeds their peak
/// get kappa_k = 0.
ComponentLevels shared_level_search(const GaussianMixture& gmm, double kappa);

/// The closed-form shared level sum_k w_k^2 Lambda_k(kappa).
double analytic_shared_level(const GaussianMixture& gmm, double kappa);

/// Per-component levels implied by a given shared density level.
ComponentLevels levels_for_shared_density(const GaussianMixture& gmm, double shared_level,
                                          double overall_level);

/// Levels with kappa_k = 0 for every component (no ellipsoids).
ComponentLevels clamped_levels(const GaussianMixture& gmm);

/// True iff x lies inside some component ellipsoid with kappa_k > 0.
bool in_confidence_region(const Eigen::VectorXd& x, const GaussianMixture& gmm,
                          const ComponentLevels& levels);

}  // namespace safecorridor

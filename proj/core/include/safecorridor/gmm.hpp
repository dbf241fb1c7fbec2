#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace safecorridor {

using Rng = std::mt19937_64;

/// Configuration samples with a per-point collision label.
struct LabeledSampleSet {
  int dim = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<bool> collision;

  void add(const Eigen::VectorXd& point, bool in_collision);
  std::size_t size() const { return points.size(); }
  /// Points carrying the given label, in their original order.
  std::vector<Eigen::VectorXd> select(bool in_collision) const;
  std::size_t count(bool in_collision) const;
};

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double weight = 1.0;
  double mass = 1.0;
};

/// Quantities derived once per component and reused by density
/// evaluation, sampling and corridor construction.
struct ComponentGeometry {
  Eigen::MatrixXd precision;      // covariance^-1
  Eigen::MatrixXd inv_sqrt;       // symmetric covariance^-1/2
  Eigen::MatrixXd chol_lower;     // L with L L^T = covariance
  double log_det_2pi_cov = 0.0;   // log det(2 pi covariance)
};

/// Immutable weighted list of Gaussians. Construction validates the
/// invariants (shared dimension, weights summing to one, symmetric
/// positive-definite covariances) and precomputes per-component geometry.
class GaussianMixture {
 public:
  GaussianMixture() = default;
  /// `bandwidth` is the Meanshift bandwidth the model was fitted with; it
  /// sets the eigenvalue floor 1e-6 * bandwidth^2 used for matrix roots.
  explicit GaussianMixture(std::vector<GaussianComponent> components, double bandwidth = 0.0);

  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  int dim() const { return dim_; }
  double bandwidth() const { return bandwidth_; }
  double eigenvalue_floor() const;

  const GaussianComponent& component(std::size_t k) const { return components_[k]; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const ComponentGeometry& geometry(std::size_t k) const { return geometry_[k]; }

 private:
  std::vector<GaussianComponent> components_;
  std::vector<ComponentGeometry> geometry_;
  int dim_ = 0;
  double bandwidth_ = 0.0;
};

/// Hard Meanshift membership: each sample maps to one surviving mode.
struct ClusterAssignment {
  std::vector<int> mode_per_point;
  std::vector<Eigen::VectorXd> modes;

  std::size_t cluster_count() const { return modes.size(); }
};

struct MeanShiftOptions {
  double tol_factor = 1e-4;    // mode displacement tolerance, in units of B
  int max_iterations = 500;    // ascent iterations per point
  double merge_factor = 0.5;   // merge radius, in units of B
  double cutoff_factor = 4.0;  // kernel support radius, in units of B
  double snap_factor = 0.2;    // stop once within this many B of an earlier mode; 0 disables
};

/// Gaussian-kernel Meanshift with kernel standard deviation `bandwidth`.
/// Modes are returned in lexicographic order so the result does not depend
/// on the order of `samples` beyond floating-point noise.
ClusterAssignment meanshift_cluster(std::span<const Eigen::VectorXd> samples, double bandwidth,
                                    const MeanShiftOptions& options = {});

/// Single-step EM statistics of a hard assignment: masses, means, population
/// covariances (divisor m_k) regularized by 1e-6 * bandwidth^2 * I, and
/// weights m_k / sum m_j. Empty clusters are dropped.
GaussianMixture cluster_statistics(std::span<const Eigen::VectorXd> samples,
                                   const ClusterAssignment& assignment, double bandwidth);

/// meanshift_cluster followed by cluster_statistics.
GaussianMixture fit_mixture(std::span<const Eigen::VectorXd> samples, double bandwidth,
                            const MeanShiftOptions& options = {});

double regularization_floor(double bandwidth);

double gaussian_pdf(const Eigen::VectorXd& x, const GaussianComponent& component);
double gaussian_log_pdf(const Eigen::VectorXd& x, const GaussianComponent& component);
double mixture_pdf(const Eigen::VectorXd& x, const GaussianMixture& gmm);

/// Squared Mahalanobis distance of x from component k.
double mahalanobis_sq(const Eigen::VectorXd& x, const GaussianMixture& gmm, std::size_t k);

/// Draws a component index with probability w_k, then a Gaussian sample.
Eigen::VectorXd sample_mixture(const GaussianMixture& gmm, Rng& rng);

/// Standard-normal n-vector.
Eigen::VectorXd standard_normal(int n, Rng& rng);

}  // namespace safecorridor

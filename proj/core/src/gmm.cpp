#include "safecorridor/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "safecorridor/error.hpp"

namespace safecorridor {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

ComponentGeometry make_geometry(const GaussianComponent& c, double floor) {
  const int n = static_cast<int>(c.mean.size());
  Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "singular covariance");
  }
  ComponentGeometry g;
  g.chol_lower = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = g.chol_lower(i, i);
    if (!(d > 0.0)) throw Error(ErrorCode::kSingularCovariance, "singular covariance");
    log_det += 2.0 * std::log(d);
  }
  g.log_det_2pi_cov = log_det + n * kLog2Pi;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance);
  Eigen::VectorXd inv_root = eig.eigenvalues().unaryExpr([floor](double s) {
    return 1.0 / std::sqrt(std::max(s, floor));
  });
  const Eigen::MatrixXd& v = eig.eigenvectors();
  g.inv_sqrt = v * inv_root.asDiagonal() * v.transpose();
  g.inv_sqrt = 0.5 * (g.inv_sqrt + g.inv_sqrt.transpose()).eval();
  g.precision = g.inv_sqrt * g.inv_sqrt;
  g.precision = 0.5 * (g.precision + g.precision.transpose()).eval();
  return g;
}

}  // namespace

void LabeledSampleSet::add(const Eigen::VectorXd& point, bool in_collision) {
  if (points.empty() && dim == 0) dim = static_cast<int>(point.size());
  if (point.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  points.push_back(point);
  collision.push_back(in_collision);
}

std::vector<Eigen::VectorXd> LabeledSampleSet::select(bool in_collision) const {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (collision[i] == in_collision) out.push_back(points[i]);
  }
  return out;
}

std::size_t LabeledSampleSet::count(bool in_collision) const {
  return static_cast<std::size_t>(std::count(collision.begin(), collision.end(), in_collision));
}

double regularization_floor(double bandwidth) { return 1e-6 * bandwidth * bandwidth; }

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components, double bandwidth)
    : components_(std::move(components)), bandwidth_(bandwidth) {
  if (components_.empty()) throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one component");
  dim_ = static_cast<int>(components_.front().mean.size());
  if (dim_ < 1) throw Error(ErrorCode::kInvalidArgument, "mixture dimension must be positive");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_ || c.covariance.rows() != dim_ || c.covariance.cols() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
    }
    if (!(c.weight >= 0.0) || !c.mean.allFinite() || !c.covariance.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid mixture component");
    }
    const double scale = std::max(1.0, c.covariance.cwiseAbs().maxCoeff());
    if ((c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw Error(ErrorCode::kInvalidArgument, "covariance is not symmetric");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidArgument, "mixture weights must sum to 1");

  const double floor = std::max(eigenvalue_floor(), std::numeric_limits<double>::min());
  geometry_.reserve(components_.size());
  for (const auto& c : components_) geometry_.push_back(make_geometry(c, floor));
}

double GaussianMixture::eigenvalue_floor() const { return regularization_floor(bandwidth_); }

GaussianMixture cluster_statistics(std::span<const Eigen::VectorXd> samples,
                                   const ClusterAssignment& assignment, double bandwidth) {
  if (samples.empty()) throw Error(ErrorCode::kNoSamples, "no samples");
  if (assignment.mode_per_point.size() != samples.size()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment does not cover all samples");
  }
  const int n = static_cast<int>(samples.front().size());
  const std::size_t k_count = assignment.modes.size();

  std::vector<double> mass(k_count, 0.0);
  std::vector<Eigen::VectorXd> sum(k_count, Eigen::VectorXd::Zero(n));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int k = assignment.mode_per_point[i];
    if (k < 0 || static_cast<std::size_t>(k) >= k_count) {
      throw Error(ErrorCode::kInvalidArgument, "assignment index out of range");
    }
    mass[k] += 1.0;
    sum[k] += samples[i];
  }

  std::vector<Eigen::VectorXd> mean(k_count);
  std::vector<Eigen::MatrixXd> scatter(k_count, Eigen::MatrixXd::Zero(n, n));
  for (std::size_t k = 0; k < k_count; ++k) {
    if (mass[k] > 0.0) mean[k] = sum[k] / mass[k];
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int k = assignment.mode_per_point[i];
    const Eigen::VectorXd d = samples[i] - mean[k];
    scatter[k].noalias() += d * d.transpose();
  }

  double total_mass = 0.0;
  for (double m : mass) total_mass += m;

  const double floor = regularization_floor(bandwidth);
  std::vector<GaussianComponent> components;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (mass[k] == 0.0) continue;
    GaussianComponent c;
    c.mass = mass[k];
    c.mean = mean[k];
    c.covariance = scatter[k] / mass[k];
    c.covariance = 0.5 * (c.covariance + c.covariance.transpose()).eval();
    c.covariance.diagonal().array() += floor;
    c.weight = mass[k] / total_mass;
    components.push_back(std::move(c));
  }
  return GaussianMixture(std::move(components), bandwidth);
}

GaussianMixture fit_mixture(std::span<const Eigen::VectorXd> samples, double bandwidth,
                            const MeanShiftOptions& options) {
  return cluster_statistics(samples, meanshift_cluster(samples, bandwidth, options), bandwidth);
}

double gaussian_log_pdf(const Eigen::VectorXd& x, const GaussianComponent& component) {
  const int n = static_cast<int>(component.mean.size());
  if (x.size() != n) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(component.covariance);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularCovariance, "singular covariance");
  const Eigen::MatrixXd l = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(l(i, i) > 0.0)) throw Error(ErrorCode::kSingularCovariance, "singular covariance");
    log_det += 2.0 * std::log(l(i, i));
  }
  const Eigen::VectorXd z = llt.matrixL().solve(x - component.mean);
  return -0.5 * (log_det + n * kLog2Pi) - 0.5 * z.squaredNorm();
}

double gaussian_pdf(const Eigen::VectorXd& x, const GaussianComponent& component) {
  return std::exp(gaussian_log_pdf(x, component));
}

double mahalanobis_sq(const Eigen::VectorXd& x, const GaussianMixture& gmm, std::size_t k) {
  const Eigen::VectorXd d = x - gmm.component(k).mean;
  return (gmm.geometry(k).inv_sqrt * d).squaredNorm();
}

double mixture_pdf(const Eigen::VectorXd& x, const GaussianMixture& gmm) {
  if (x.size() != gmm.dim()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    const auto& g = gmm.geometry(k);
    const Eigen::VectorXd z =
        g.chol_lower.triangularView<Eigen::Lower>().solve(x - gmm.component(k).mean);
    total += gmm.component(k).weight * std::exp(-0.5 * (g.log_det_2pi_cov + z.squaredNorm()));
  }
  return total;
}

Eigen::VectorXd standard_normal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

Eigen::VectorXd sample_mixture(const GaussianMixture& gmm, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  std::size_t chosen = gmm.size() - 1;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    cumulative += gmm.component(k).weight;
    if (u < cumulative && gmm.component(k).weight > 0.0) {
      chosen = k;
      break;
    }
  }
  // Rounding can leave u above the final cumulative sum; fall back to the last weighted component.
  while (gmm.component(chosen).weight == 0.0 && chosen > 0) --chosen;
  return gmm.component(chosen).mean + gmm.geometry(chosen).chol_lower * standard_normal(gmm.dim(), rng);
}

}  // namespace safecorridor

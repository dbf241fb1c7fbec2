#include "safecorridor/confidence.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "safecorridor/error.hpp"

namespace safecorridor {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kTiny = 1e-300;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by the modified Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double log_det_2pi(const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularCovariance, "singular covariance");
  double log_det = 0.0;
  for (int i = 0; i < covariance.rows(); ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
  return log_det + covariance.rows() * kLog2Pi;
}

// Chi-squared statistic of the super level set {g_k >= lambda / w_k}:
// s_k = -log((lambda / w_k)^2 det(2 pi Sigma_k)). Nonpositive means empty set.
double level_statistic(double log_lambda, double weight, double log_det) {
  if (!(weight > 0.0)) return -std::numeric_limits<double>::infinity();
  return -2.0 * (log_lambda - std::log(weight)) - log_det;
}

double weighted_kappa(const GaussianMixture& gmm, double log_lambda) {
  double sum = 0.0;
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    const double s = level_statistic(log_lambda, gmm.component(k).weight, gmm.geometry(k).log_det_2pi_cov);
    if (s > 0.0) sum += gmm.component(k).weight * chi2_cdf(gmm.dim(), s);
  }
  return sum;
}

ComponentLevels levels_from_log(const GaussianMixture& gmm, double log_lambda, double overall) {
  ComponentLevels out;
  out.overall_level = overall;
  out.shared_density_level = std::exp(log_lambda);
  out.per_component.resize(gmm.size(), 0.0);
  out.per_component_radius_sq.resize(gmm.size(), 0.0);
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    const double s = level_statistic(log_lambda, gmm.component(k).weight, gmm.geometry(k).log_det_2pi_cov);
    if (s > 0.0) {
      out.per_component[k] = chi2_cdf(gmm.dim(), s);
      out.per_component_radius_sq[k] = s;
    }
  }
  return out;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma shape must be positive");
  if (x < 0.0) throw Error(ErrorCode::kNegativeStatistic, "negative statistic");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double chi2_cdf(int dof, double t) {
  if (dof < 1) throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be positive");
  if (t < 0.0 || std::isnan(t)) throw Error(ErrorCode::kNegativeStatistic, "negative statistic");
  return regularized_gamma_p(0.5 * dof, 0.5 * t);
}

double chi2_inv_cdf(int dof, double kappa) {
  if (!(kappa < 1.0)) throw Error(ErrorCode::kDegenerateConfidenceLevel, "degenerate confidence level");
  if (!(kappa >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "confidence level must be in [0, 1)");
  if (kappa == 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (chi2_cdf(dof, hi) < kappa) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(dof, mid) < kappa) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double gaussian_level(double kappa, const Eigen::MatrixXd& covariance) {
  const int n = static_cast<int>(covariance.rows());
  return std::exp(-0.5 * log_det_2pi(covariance) - 0.5 * chi2_inv_cdf(n, kappa));
}

LevelInverse gaussian_level_inv(double level, const Eigen::MatrixXd& covariance) {
  if (!(level > 0.0)) throw Error(ErrorCode::kInvalidArgument, "density level must be positive");
  const int n = static_cast<int>(covariance.rows());
  const double s = -2.0 * std::log(level) - log_det_2pi(covariance);
  if (s <= 0.0) return {0.0, s < 0.0};
  return {chi2_cdf(n, s), false};
}

double ComponentLevels::weighted_level(const GaussianMixture& gmm) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < gmm.size() && k < per_component.size(); ++k) {
    sum += gmm.component(k).weight * per_component[k];
  }
  return sum;
}

double analytic_shared_level(const GaussianMixture& gmm, double kappa) {
  const double quantile = chi2_inv_cdf(gmm.dim(), kappa);
  double sum = 0.0;
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    const double w = gmm.component(k).weight;
    sum += w * w * std::exp(-0.5 * gmm.geometry(k).log_det_2pi_cov - 0.5 * quantile);
  }
  return sum;
}

ComponentLevels levels_for_shared_density(const GaussianMixture& gmm, double shared_level,
                                          double overall_level) {
  if (!(shared_level > 0.0)) throw Error(ErrorCode::kInvalidArgument, "density level must be positive");
  return levels_from_log(gmm, std::log(shared_level), overall_level);
}

ComponentLevels clamped_levels(const GaussianMixture& gmm) {
  ComponentLevels out;
  out.per_component.assign(gmm.size(), 0.0);
  out.per_component_radius_sq.assign(gmm.size(), 0.0);
  return out;
}

ComponentLevels shared_level_search(const GaussianMixture& gmm, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw Error(ErrorCode::kDegenerateConfidenceLevel, "confidence level must be in (0, 1)");
  }
  // Above the largest weighted peak every kappa_k is clamped to zero.
  double log_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    const double w = gmm.component(k).weight;
    if (w > 0.0) log_hi = std::max(log_hi, std::log(w) - 0.5 * gmm.geometry(k).log_det_2pi_cov);
  }

  double log_lo = std::min(std::log(analytic_shared_level(gmm, kappa)), log_hi);
  for (double step = 1.0; weighted_kappa(gmm, log_lo) < kappa; step *= 2.0) log_lo -= step;

  double best = log_lo;
  double best_err = std::abs(weighted_kappa(gmm, log_lo) - kappa);
  for (int i = 0; i < 200 && best_err > 1e-12; ++i) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid == log_lo || mid == log_hi) break;
    const double f = weighted_kappa(gmm, mid);
    if (std::abs(f - kappa) < best_err) {
      best_err = std::abs(f - kappa);
      best = mid;
    }
    if (f >= kappa) log_lo = mid;
    else log_hi = mid;
  }
  return levels_from_log(gmm, best, kappa);
}

bool in_confidence_region(const Eigen::VectorXd& x, const GaussianMixture& gmm,
                          const ComponentLevels& levels) {
  if (x.size() != gmm.dim()) throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch");
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    if (levels.per_component[k] <= 0.0) continue;
    if (mahalanobis_sq(x, gmm, k) <= levels.per_component_radius_sq[k]) return true;
  }
  return false;
}

}  // namespace safecorridor

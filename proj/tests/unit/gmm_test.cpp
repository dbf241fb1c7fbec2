#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "safecorridor/error.hpp"
#include "safecorridor/gmm.hpp"

namespace safecorridor {
namespace {

using testing::random_mixture;
using testing::random_spd;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

// Direct evaluation of det(2 pi S)^-1/2 exp(-d^T S^-1 d / 2) through a dense inverse.
double pdf_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& s) {
  const Eigen::VectorXd d = x - mu;
  const double quad = d.dot(s.inverse() * d);
  return std::exp(-0.5 * quad) / std::sqrt((2.0 * std::numbers::pi * s).determinant());
}

std::vector<Eigen::VectorXd> two_blobs(std::size_t per_blob, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t i = 0; i < per_blob; ++i) {
    pts.push_back(vec({-3.0 + noise(rng), noise(rng)}));
    pts.push_back(vec({3.0 + noise(rng), noise(rng)}));
  }
  return pts;
}

TEST(MeanShift, NearbyPointsShareOneCluster) {
  const std::vector<Eigen::VectorXd> pts{vec({0, 0}), vec({0.1, 0})};
  const auto a = meanshift_cluster(pts, 1.0);
  EXPECT_EQ(a.cluster_count(), 1u);
  EXPECT_EQ(a.mode_per_point[0], a.mode_per_point[1]);
}

TEST(MeanShift, DistantPointsAreSeparateClusters) {
  const std::vector<Eigen::VectorXd> pts{vec({0, 0}), vec({100, 0})};
  const auto a = meanshift_cluster(pts, 1.0);
  ASSERT_EQ(a.cluster_count(), 2u);
  EXPECT_NE(a.mode_per_point[0], a.mode_per_point[1]);
  EXPECT_TRUE(a.modes[static_cast<std::size_t>(a.mode_per_point[0])].isApprox(pts[0]));
  EXPECT_TRUE(a.modes[static_cast<std::size_t>(a.mode_per_point[1])].isApprox(pts[1]));
}

TEST(MeanShift, SinglePointIsItsOwnMode) {
  const std::vector<Eigen::VectorXd> pts{vec({3, 4})};
  for (double b : {0.01, 1.0, 50.0}) {
    const auto a = meanshift_cluster(pts, b);
    ASSERT_EQ(a.cluster_count(), 1u);
    EXPECT_EQ(a.modes[0], pts[0]);
  }
}

TEST(MeanShift, RejectsEmptyAndNonFiniteInput) {
  const std::vector<Eigen::VectorXd> none;
  try {
    meanshift_cluster(none, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSamples);
    EXPECT_STREQ(e.what(), "no samples");
  }
  const std::vector<Eigen::VectorXd> bad{vec({0, std::numeric_limits<double>::quiet_NaN()})};
  try {
    meanshift_cluster(bad, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSample);
  }
  const std::vector<Eigen::VectorXd> one{vec({0, 0})};
  EXPECT_THROW(meanshift_cluster(one, 0.0), Error);
}

TEST(MeanShift, HugeBandwidthYieldsOneCluster) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(vec({u(rng), u(rng), u(rng)}));
  EXPECT_EQ(meanshift_cluster(pts, 1e3).cluster_count(), 1u);
}

TEST(MeanShift, SeparatedBlobsGetOneModeEach) {
  Rng rng(5);
  const auto pts = two_blobs(100, rng);
  const auto a = meanshift_cluster(pts, 0.5);
  ASSERT_EQ(a.cluster_count(), 2u);
  for (std::size_t i = 0; i < pts.size(); i += 2) {
    EXPECT_EQ(a.mode_per_point[i], a.mode_per_point[0]);
    EXPECT_EQ(a.mode_per_point[i + 1], a.mode_per_point[1]);
  }
  EXPECT_NE(a.mode_per_point[0], a.mode_per_point[1]);
}

TEST(MeanShift, ModeSnappingKeepsClusterCount) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 600; ++i) pts.push_back(vec({u(rng), u(rng)}));
  MeanShiftOptions exact;
  exact.snap_factor = 0.0;
  const auto a = meanshift_cluster(pts, 0.2, exact);
  const auto b = meanshift_cluster(pts, 0.2);
  EXPECT_EQ(a.cluster_count(), b.cluster_count());
}

TEST(MeanShift, EveryPointMapsToOneSurvivingMode) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 300; ++i) pts.push_back(vec({u(rng), u(rng)}));
  const auto a = meanshift_cluster(pts, 0.3);
  ASSERT_EQ(a.mode_per_point.size(), pts.size());
  std::vector<int> hits(a.cluster_count(), 0);
  for (int m : a.mode_per_point) {
    ASSERT_GE(m, 0);
    ASSERT_LT(static_cast<std::size_t>(m), a.cluster_count());
    ++hits[static_cast<std::size_t>(m)];
  }
  for (int h : hits) EXPECT_GT(h, 0);
}

TEST(ClusterStatistics, TwoPointClusterMatchesHandEvaluation) {
  const std::vector<Eigen::VectorXd> pts{vec({0, 0}), vec({2, 0})};
  ClusterAssignment a;
  a.mode_per_point = {0, 0};
  a.modes = {vec({1, 0})};
  const double b = 0.5;
  const auto gmm = cluster_statistics(pts, a, b);
  ASSERT_EQ(gmm.size(), 1u);
  const auto& c = gmm.component(0);
  const double lambda = 1e-6 * b * b;
  EXPECT_DOUBLE_EQ(c.mass, 2.0);
  EXPECT_DOUBLE_EQ(c.weight, 1.0);
  EXPECT_TRUE(c.mean.isApprox(vec({1, 0})));
  Eigen::Matrix2d expected;
  expected << 1.0 + lambda, 0.0, 0.0, lambda;
  EXPECT_LT((c.covariance - expected).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(regularization_floor(b), lambda);
}

TEST(ClusterStatistics, SinglePointClusterIsPureRegularization) {
  const std::vector<Eigen::VectorXd> pts{vec({1, 2}), vec({5, 5}), vec({5, 6})};
  ClusterAssignment a;
  a.mode_per_point = {0, 1, 1};
  a.modes = {vec({1, 2}), vec({5, 5.5})};
  const auto gmm = cluster_statistics(pts, a, 1.0);
  ASSERT_EQ(gmm.size(), 2u);
  EXPECT_EQ(gmm.component(0).mean, pts[0]);
  EXPECT_TRUE(gmm.component(0).covariance.isApprox(1e-6 * Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_NEAR(gmm.component(0).weight, 1.0 / 3.0, 1e-15);
}

TEST(ClusterStatistics, WeightsFollowMassRatio) {
  const std::vector<Eigen::VectorXd> pts{vec({0}), vec({0.1}), vec({0.2}), vec({9})};
  ClusterAssignment a;
  a.mode_per_point = {0, 0, 0, 1};
  a.modes = {vec({0.1}), vec({9})};
  const auto gmm = cluster_statistics(pts, a, 1.0);
  EXPECT_DOUBLE_EQ(gmm.component(0).weight, 0.75);
  EXPECT_DOUBLE_EQ(gmm.component(1).weight, 0.25);
}

TEST(ClusterStatistics, EmptyClustersAreDropped) {
  const std::vector<Eigen::VectorXd> pts{vec({0}), vec({1})};
  ClusterAssignment a;
  a.mode_per_point = {0, 2};
  a.modes = {vec({0}), vec({5}), vec({1})};
  const auto gmm = cluster_statistics(pts, a, 1.0);
  EXPECT_EQ(gmm.size(), 2u);
}

TEST(ClusterStatistics, WeightsSumToOneAndArePermutationInvariant) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 400; ++i) pts.push_back(vec({u(rng), u(rng)}));
  const auto a = meanshift_cluster(pts, 0.4);
  const auto gmm = cluster_statistics(pts, a, 0.4);
  double total = 0.0;
  for (const auto& c : gmm.components()) total += c.weight;
  EXPECT_NEAR(total, 1.0, 1e-9);

  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Eigen::VectorXd> shuffled;
  ClusterAssignment sa;
  sa.modes = a.modes;
  for (std::size_t i : order) {
    shuffled.push_back(pts[i]);
    sa.mode_per_point.push_back(a.mode_per_point[i]);
  }
  const auto g2 = cluster_statistics(shuffled, sa, 0.4);
  ASSERT_EQ(g2.size(), gmm.size());
  for (std::size_t k = 0; k < gmm.size(); ++k) {
    EXPECT_LT((g2.component(k).mean - gmm.component(k).mean).norm(), 1e-12);
    EXPECT_LT((g2.component(k).covariance - gmm.component(k).covariance).norm(), 1e-12);
    EXPECT_EQ(g2.component(k).weight, gmm.component(k).weight);
  }
}

TEST(ClusterStatistics, EverySampleHasFiniteMahalanobisToItsCluster) {
  Rng rng(4);
  const auto pts = two_blobs(150, rng);
  const auto a = meanshift_cluster(pts, 0.5);
  const auto gmm = cluster_statistics(pts, a, 0.5);
  ASSERT_EQ(gmm.size(), a.cluster_count());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = mahalanobis_sq(pts[i], gmm, static_cast<std::size_t>(a.mode_per_point[i]));
    EXPECT_TRUE(std::isfinite(d2));
    EXPECT_LT(d2, 100.0);
  }
}

TEST(GaussianPdf, ClosedFormValues) {
  GaussianComponent c{vec({0, 0}), Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0};
  EXPECT_NEAR(gaussian_pdf(vec({0, 0}), c), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_pdf(vec({1, 0}), c), std::exp(-0.5) / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_pdf(vec({1, 0}), c), 0.09653, 1e-5);
  GaussianComponent c1{vec({0}), 4.0 * Eigen::MatrixXd::Identity(1, 1), 1.0, 1.0};
  EXPECT_NEAR(gaussian_pdf(vec({0}), c1), 1.0 / std::sqrt(8.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_pdf(vec({0}), c1), 0.19947, 1e-5);
}

TEST(GaussianPdf, MatchesDenseInverseOracle) {
  Rng rng(13);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    GaussianComponent c;
    c.mean = Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });
    c.covariance = random_spd(n, 0.1, 3.0, rng);
    const Eigen::VectorXd x = c.mean + Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });
    const double expected = pdf_oracle(x, c.mean, c.covariance);
    EXPECT_NEAR(gaussian_pdf(x, c), expected, 1e-10 * expected + 1e-300);
  }
}

TEST(GaussianPdf, SingularCovarianceIsRejected) {
  GaussianComponent c{vec({0, 0}), Eigen::MatrixXd::Zero(2, 2), 1.0, 1.0};
  try {
    gaussian_pdf(vec({0, 0}), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCovariance);
  }
}

TEST(MixturePdf, DegenerateMixturesReduceToOneComponent) {
  GaussianComponent c{vec({1, -1}), Eigen::MatrixXd::Identity(2, 2) * 0.5, 1.0, 1.0};
  const GaussianMixture single({c});
  GaussianComponent h = c;
  h.weight = 0.5;
  const GaussianMixture twin({h, h});
  for (const auto& x : {vec({0, 0}), vec({1, -1}), vec({3, 2})}) {
    EXPECT_NEAR(mixture_pdf(x, single), gaussian_pdf(x, c), 1e-15);
    EXPECT_NEAR(mixture_pdf(x, twin), gaussian_pdf(x, c), 1e-15);
  }
}

TEST(MixturePdf, IntegratesToOneOverLargeBox) {
  Rng rng(17);
  const GaussianMixture gmm = random_mixture(4, 2, 1.0, rng);
  const double half = 6.0;
  std::uniform_real_distribution<double> u(-half, half);
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += mixture_pdf(vec({u(rng), u(rng)}), gmm);
  const double integral = sum / n * (2 * half) * (2 * half);
  EXPECT_NEAR(integral, 1.0, 1e-2);
}

TEST(MixturePdf, DominatesEachWeightedComponent) {
  Rng rng(19);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianMixture gmm = random_mixture(1 + trial % 6, 3, 2.0, rng);
    const Eigen::VectorXd x = vec({u(rng), u(rng), u(rng)});
    const double total = mixture_pdf(x, gmm);
    for (std::size_t k = 0; k < gmm.size(); ++k) {
      EXPECT_GE(total * (1 + 1e-12), gmm.component(k).weight * gaussian_pdf(x, gmm.component(k)));
    }
  }
}

TEST(Mixture, ConstructorValidatesInvariants) {
  GaussianComponent c{vec({0, 0}), Eigen::MatrixXd::Identity(2, 2), 0.7, 1.0};
  EXPECT_THROW(GaussianMixture({c}), Error);
  c.weight = 1.0;
  c.covariance(0, 1) = 0.5;
  EXPECT_THROW(GaussianMixture({c}), Error);
  EXPECT_THROW(GaussianMixture(std::vector<GaussianComponent>{}), Error);
}

TEST(SampleMixture, TinyCovarianceConcentratesAtMean) {
  const double lambda = 1e-6;
  GaussianComponent c{vec({2, -1}), lambda * Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0};
  const GaussianMixture gmm({c});
  Rng rng(23);
  const int n = 10000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) sum += sample_mixture(gmm, rng);
  const double sigma = std::sqrt(lambda);
  EXPECT_LT(((sum / n) - c.mean).cwiseAbs().maxCoeff(), 3.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST(SampleMixture, ZeroWeightComponentIsNeverChosen) {
  GaussianComponent a{vec({0, 0}), 0.01 * Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0};
  GaussianComponent b{vec({100, 100}), 0.01 * Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0};
  const GaussianMixture gmm({a, b});
  Rng rng(29);
  for (int i = 0; i < 5000; ++i) EXPECT_LT(sample_mixture(gmm, rng).norm(), 10.0);
}

TEST(SampleMixture, EmpiricalCovarianceMatches) {
  Rng rng(31);
  GaussianComponent c{vec({1, 2, 3}), random_spd(3, 0.2, 2.0, rng), 1.0, 1.0};
  const GaussianMixture gmm({c});
  const int n = 100000;
  Eigen::MatrixXd draws(3, n);
  for (int i = 0; i < n; ++i) draws.col(i) = sample_mixture(gmm, rng);
  const Eigen::VectorXd mean = draws.rowwise().mean();
  const Eigen::MatrixXd centered = draws.colwise() - mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / n;
  EXPECT_LT((cov - c.covariance).norm() / c.covariance.norm(), 0.05);
}

TEST(SampleMixture, ComponentFrequenciesFollowWeights) {
  GaussianComponent a{vec({-50}), Eigen::MatrixXd::Identity(1, 1), 0.3, 1.0};
  GaussianComponent b{vec({50}), Eigen::MatrixXd::Identity(1, 1), 0.7, 1.0};
  const GaussianMixture gmm({a, b});
  Rng rng(37);
  const int n = 20000;
  int left = 0;
  for (int i = 0; i < n; ++i) left += sample_mixture(gmm, rng)[0] < 0 ? 1 : 0;
  // 5 standard errors of a binomial proportion.
  EXPECT_NEAR(static_cast<double>(left) / n, 0.3, 5 * std::sqrt(0.21 / n));
}

TEST(FitMixture, RecoversBlobMeans) {
  Rng rng(41);
  const auto pts = two_blobs(300, rng);
  const auto gmm = fit_mixture(pts, 0.5);
  ASSERT_EQ(gmm.size(), 2u);
  EXPECT_NEAR(gmm.component(0).mean[0], -3.0, 0.05);
  EXPECT_NEAR(gmm.component(1).mean[0], 3.0, 0.05);
  EXPECT_NEAR(gmm.component(0).weight, 0.5, 1e-12);
  EXPECT_EQ(gmm.bandwidth(), 0.5);
}

}  // namespace
}  // namespace safecorridor

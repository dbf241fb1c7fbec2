#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "safecorridor/confidence.hpp"
#include "safecorridor/corridor.hpp"
#include "safecorridor/error.hpp"

namespace safecorridor {
namespace {

using testing::enumerate_projection;
using testing::random_mixture;

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Unit Gaussian at the origin whose ellipsoid has squared radius 4.
struct UnitDisc {
  GaussianMixture gmm{{GaussianComponent{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0}}};
  ComponentLevels levels;
  UnitDisc() {
    levels.overall_level = chi2_cdf(2, 4.0);
    levels.per_component = {levels.overall_level};
    levels.per_component_radius_sq = {4.0};
  }
};

Eigen::VectorXd random_point(int n, double extent, Rng& rng) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

TEST(BuildCorridor, TangentLineTowardDistantAnchor) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(4, 0), disc.gmm, disc.levels, 0.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(corridor_contains(c, vec2(2.0, 0.0), 1e-12));
  EXPECT_TRUE(corridor_contains(c, vec2(2.0, 7.0), 1e-12));
  EXPECT_FALSE(corridor_contains(c, vec2(1.999, 0.0)));
  EXPECT_NEAR(corridor_violation(c, vec2(2.0, -3.0)), 0.0, 1e-12);
}

TEST(BuildCorridor, AnchorOnEllipsoidBoundary) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(2, 0), disc.gmm, disc.levels, 0.0);
  EXPECT_NEAR(c.halfspaces[0].offset, 0.0, 1e-15);
  EXPECT_TRUE(corridor_contains(c, vec2(2, 0)));
  EXPECT_FALSE(corridor_contains(c, vec2(1.999, 0)));
}

TEST(BuildCorridor, AnchorInsideEllipsoidUsesTolerance) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(1, 0), disc.gmm, disc.levels, 0.01);
  EXPECT_TRUE(corridor_contains(c, vec2(0.99, 0.0), 1e-12));
  EXPECT_FALSE(corridor_contains(c, vec2(0.989, 0.0)));
  EXPECT_LT(corridor_violation(c, c.anchor), 0.0);
}

TEST(BuildCorridor, FarComponentMeanIsExcluded) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(4, 0), disc.gmm, disc.levels, 0.0);
  EXPECT_FALSE(corridor_contains(c, disc.gmm.component(0).mean));
}

TEST(BuildCorridor, ZeroLevelComponentsContributeNothing) {
  Rng rng(1);
  const GaussianMixture gmm = random_mixture(6, 2, 2.0, rng);
  auto levels = shared_level_search(gmm, 0.9);
  const Eigen::VectorXd p = random_point(2, 4.0, rng);
  EXPECT_EQ(build_corridor(p, gmm, levels, 0.01).size(), gmm.size());
  levels.per_component[2] = 0.0;
  levels.per_component_radius_sq[2] = 0.0;
  EXPECT_EQ(build_corridor(p, gmm, levels, 0.01).size(), gmm.size() - 1);
  EXPECT_EQ(build_corridor(p, gmm, clamped_levels(gmm), 0.01).size(), 0u);
}

TEST(BuildCorridor, AnchorAtComponentMeanDoesNotCrash) {
  const UnitDisc disc;
  const auto c = build_corridor(Eigen::VectorXd::Zero(2), disc.gmm, disc.levels, 0.01);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c.halfspaces[0].normal.allFinite());
  EXPECT_TRUE(corridor_contains(c, c.anchor));
}

TEST(BuildCorridor, NonFiniteAnchorIsRejected) {
  const UnitDisc disc;
  EXPECT_THROW(build_corridor(vec2(NAN, 0), disc.gmm, disc.levels, 0.0), Error);
}

TEST(BuildCorridor, ContainsItsAnchorForRandomMixtures) {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 4;
    const GaussianMixture gmm = random_mixture(1 + trial % 8, n, 2.0, rng);
    const auto levels = shared_level_search(gmm, 0.9);
    const Eigen::VectorXd p = random_point(n, 3.0, rng);
    EXPECT_TRUE(corridor_contains(build_corridor(p, gmm, levels, 0.0), p, 1e-12));
    EXPECT_LT(corridor_violation(build_corridor(p, gmm, levels, 0.01), p), 0.0);
  }
}

TEST(BuildCorridor, ConvexCombinationsStayInside) {
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GaussianMixture gmm = random_mixture(6, 2, 2.0, rng);
  const auto levels = shared_level_search(gmm, 0.9);
  const auto c = build_corridor(vec2(2.5, 2.5), gmm, levels, 0.01);
  int pairs = 0;
  while (pairs < 200) {
    const Eigen::VectorXd a = random_point(2, 4.0, rng);
    const Eigen::VectorXd b = random_point(2, 4.0, rng);
    if (!corridor_contains(c, a) || !corridor_contains(c, b)) continue;
    ++pairs;
    const double t = unit(rng);
    EXPECT_TRUE(corridor_contains(c, (1 - t) * a + t * b, 1e-12));
  }
}

TEST(Projection, InteriorTargetIsFixed) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(4, 0), disc.gmm, disc.levels, 0.0);
  const auto r = project_onto_corridor(c, vec2(3, 1));
  EXPECT_EQ(r.point, vec2(3, 1));
  EXPECT_TRUE(r.active.empty());
}

TEST(Projection, SingleHalfSpaceClosedForm) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(4, 0), disc.gmm, disc.levels, 0.0);
  const auto r = project_onto_corridor(c, vec2(0, 0));
  EXPECT_LT((r.point - vec2(2, 0)).norm(), 1e-12);
  EXPECT_EQ(r.active.size(), 1u);
}

TEST(Projection, TwoActiveConstraints) {
  SafeCorridor c;
  c.anchor = vec2(0, 0);
  c.halfspaces = {{vec2(1, 0), 1.0, 0}, {vec2(0, 1), 1.0, 1}};
  const auto r = project_onto_corridor(c, vec2(2, 2));
  EXPECT_LT((r.point - vec2(1, 1)).norm(), 1e-12);
  EXPECT_EQ(r.active, (std::vector<std::size_t>{0, 1}));
  const auto oracle = enumerate_projection(c.constraint_matrix(), c.constraint_bounds(), vec2(2, 2));
  ASSERT_TRUE(oracle.has_value());
  EXPECT_LT((*oracle - r.point).norm(), 1e-12);
}

TEST(Projection, InfeasiblePolytopeIsReported) {
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  Eigen::VectorXd b(2);
  b << 0, -1;  // x <= 0 and x >= 1
  try {
    project_onto_polytope(a, b, Eigen::VectorXd::Zero(1), nullptr, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorridor);
  }
}

TEST(Projection, MatchesEnumerationOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 2;
    const GaussianMixture gmm = random_mixture(1 + trial % 12, n, 2.0, rng);
    const auto levels = shared_level_search(gmm, 0.9);
    const auto c = build_corridor(random_point(n, 3.0, rng), gmm, levels, 0.01);
    const Eigen::VectorXd target = random_point(n, 5.0, rng);
    const auto r = project_onto_corridor(c, target);
    const auto oracle = enumerate_projection(c.constraint_matrix(), c.constraint_bounds(), target);
    ASSERT_TRUE(oracle.has_value());
    EXPECT_LT((r.point - *oracle).norm(), 1e-6) << "trial " << trial;
    EXPECT_LE(kkt_residual(c.constraint_matrix(), c.constraint_bounds(), target, r), 1e-8);
  }
}

TEST(Projection, WarmStartIsBitIdenticalToColdStart) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const GaussianMixture gmm = random_mixture(2 + trial % 10, 2, 2.0, rng);
    const auto levels = shared_level_search(gmm, 0.9);
    const Eigen::VectorXd target = random_point(2, 5.0, rng);
    ActiveSetCache cache;
    Eigen::VectorXd anchor = random_point(2, 3.0, rng);
    // A chain of anchors with one target, as in repeated extensions.
    for (int step = 0; step < 4; ++step) {
      const auto c = build_corridor(anchor, gmm, levels, 0.01);
      const auto warm = project_onto_corridor(c, target, cache);
      const auto cold = project_onto_corridor(c, target);
      EXPECT_EQ(warm.point, cold.point);
      EXPECT_EQ(warm.active, cold.active);
      anchor = anchor + 0.3 * (warm.point - anchor);
    }
  }
}

TEST(Projection, RepeatedTargetHitsWarmStart) {
  const UnitDisc disc;
  const auto c = build_corridor(vec2(4, 0), disc.gmm, disc.levels, 0.0);
  ActiveSetCache cache;
  const auto first = project_onto_corridor(c, vec2(0, 0), cache);
  EXPECT_TRUE(cache.valid_for_target);
  const auto second = project_onto_corridor(c, vec2(0, 0), cache);
  EXPECT_TRUE(second.warm_start_hit);
  EXPECT_EQ(second.iterations, 0);
  EXPECT_EQ(first.point, second.point);
}

TEST(Projection, MetricProjectionProperties) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const GaussianMixture gmm = random_mixture(1 + trial % 8, n, 2.0, rng);
    const auto levels = shared_level_search(gmm, 0.9);
    const auto c = build_corridor(random_point(n, 3.0, rng), gmm, levels, 0.01);
    const Eigen::VectorXd t1 = random_point(n, 5.0, rng);
    const Eigen::VectorXd t2 = random_point(n, 5.0, rng);
    const Eigen::VectorXd p1 = project_onto_corridor(c, t1).point;
    const Eigen::VectorXd p2 = project_onto_corridor(c, t2).point;
    EXPECT_TRUE(corridor_contains(c, p1, 1e-9));
    EXPECT_LT((project_onto_corridor(c, p1).point - p1).norm(), 1e-9);
    EXPECT_LE((p1 - p2).norm(), (t1 - t2).norm() + 1e-9);
    for (int i = 0; i < 10; ++i) {
      const Eigen::VectorXd x = random_point(n, 5.0, rng);
      if (!corridor_contains(c, x)) continue;
      EXPECT_LE((p1 - t1).norm(), (x - t1).norm() + 1e-9);
    }
  }
}

TEST(Projection, SafeAnchorsKeepProjectionsOutsideConfidenceRegion) {
  Rng rng(13);
  int corridors = 0;
  while (corridors < 200) {
    const int n = 2 + corridors % 2;
    const GaussianMixture gmm = random_mixture(1 + corridors % 6, n, 2.0, rng);
    const auto levels = shared_level_search(gmm, 0.9);
    const Eigen::VectorXd p = random_point(n, 4.0, rng);
    if (in_confidence_region(p, gmm, levels)) continue;
    ++corridors;
    const auto c = build_corridor(p, gmm, levels, 0.0);
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd q = project_onto_corridor(c, random_point(n, 6.0, rng)).point;
      EXPECT_FALSE(in_confidence_region(q, gmm, levels));
    }
  }
}

}  // namespace
}  // namespace safecorridor

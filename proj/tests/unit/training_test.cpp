#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "safecorridor/error.hpp"
#include "safecorridor/training.hpp"

namespace safecorridor {
namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Scenario free_point_scenario() {
  Scenario s;
  s.robot = Robot(PointRobot{JointLimits{vec2(0, 0), vec2(1, 1)}});
  s.start = vec2(0.1, 0.1);
  s.goal = vec2(0.9, 0.9);
  s.planner.step = 0.05;
  s.planner.goal_threshold = 0.05;
  return s;
}

TEST(TrainingSamples, ObstacleFreeScenarioIsAllFree) {
  const Scenario s = free_point_scenario();
  for (SamplingMode mode : {SamplingMode::kUniform, SamplingMode::kRrtTrace}) {
    const LabeledSampleSet set = generate_training_samples(s, 500, mode, 1);
    EXPECT_EQ(set.size(), 500u);
    EXPECT_EQ(set.count(true), 0u);
  }
}

TEST(TrainingSamples, BlockedStartRejectsTraceButLabelsUniform) {
  Scenario s = free_point_scenario();
  s.obstacles.boxes.push_back({vec2(-1, -1), vec2(2, 2)});
  try {
    generate_training_samples(s, 100, SamplingMode::kRrtTrace, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidEndpoints);
  }
  const LabeledSampleSet set = generate_training_samples(s, 100, SamplingMode::kUniform, 1);
  EXPECT_EQ(set.count(true), 100u);
}

TEST(TrainingSamples, ZeroSamplesIsAnError) {
  const Scenario s = free_point_scenario();
  try {
    generate_training_samples(s, 0, SamplingMode::kUniform, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no samples");
  }
}

TEST(TrainingSamples, LabelsMatchCollisionPredicateAndAreReproducible) {
  const Scenario s = load_scenario(testing::scenario_path("narrow2d"));
  for (SamplingMode mode : {SamplingMode::kUniform, SamplingMode::kRrtTrace}) {
    const LabeledSampleSet a = generate_training_samples(s, 3000, mode, 7);
    const LabeledSampleSet b = generate_training_samples(s, 3000, mode, 7);
    const LabeledSampleSet c = generate_training_samples(s, 3000, mode, 8);
    ASSERT_EQ(a.size(), 3000u);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.collision, b.collision);
    EXPECT_NE(a.points, c.points);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.collision[i], s.robot.in_collision(a.points[i], s.obstacles));
    }
    EXPECT_GT(a.count(true), 0u);
    EXPECT_GT(a.count(false), 0u);
  }
}

TEST(TrainingSamples, WorkspaceSamplesLabelObstacleMembership) {
  const Scenario s = load_scenario(testing::scenario_path("shelf2d"));
  const LabeledSampleSet set = generate_workspace_samples(s, 2000, 3);
  const JointLimits bounds = s.robot.workspace_bounds();
  EXPECT_EQ(set.dim, 2);
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_TRUE(bounds.contains(set.points[i]));
    EXPECT_EQ(set.collision[i], s.obstacles.contains_point(set.points[i]));
  }
  EXPECT_GT(set.count(true), 0u);
}

TEST(LearnModels, FitsEveryRequestedModelWithTargetLevels) {
  const Scenario s = load_scenario(testing::scenario_path("shelf2d"));
  LearnOptions opts;
  opts.samples = 1500;
  opts.mode = SamplingMode::kUniform;
  opts.bandwidth = 0.3;
  opts.workspace_bandwidth = 0.15;
  opts.kappa = 0.8;
  LearnReport report;
  const LearnedModels m = learn_models(s, opts, &report);
  ASSERT_TRUE(m.collision && m.free && m.workspace);
  EXPECT_EQ(m.collision->gmm.dim(), 3);
  EXPECT_EQ(m.workspace->gmm.dim(), 2);
  EXPECT_EQ(report.collision_samples + report.free_samples, 1500u);
  EXPECT_EQ(report.collision_clusters, m.collision->gmm.size());
  EXPECT_EQ(report.workspace_clusters, m.workspace->gmm.size());
  for (const auto* model : {&*m.collision, &*m.free, &*m.workspace}) {
    EXPECT_NEAR(model->levels.weighted_level(model->gmm), 0.8, 1e-6);
  }
  EXPECT_EQ(m.workspace->gmm.bandwidth(), 0.15);
  EXPECT_EQ(m.sampling_mode, "uniform");
}

TEST(LearnModels, MissingLabelClassLeavesModelAbsent) {
  const Scenario s = free_point_scenario();
  LearnOptions opts;
  opts.samples = 200;
  opts.mode = SamplingMode::kUniform;
  const LearnedModels m = learn_models(s, opts);
  EXPECT_FALSE(m.collision.has_value());
  EXPECT_TRUE(m.free.has_value());
  EXPECT_FALSE(m.workspace.has_value());
}

TEST(LearnModels, SampleFileRoundTripGivesSameModel) {
  const Scenario s = load_scenario(testing::scenario_path("narrow2d"));
  const LabeledSampleSet set = generate_training_samples(s, 800, SamplingMode::kUniform, 2);
  std::stringstream csv;
  write_samples_csv(set, csv);
  const LabeledSampleSet back = read_samples_csv(csv);
  EXPECT_EQ(back.points, set.points);
  EXPECT_EQ(back.collision, set.collision);
  LearnOptions opts;
  opts.learn_workspace = false;
  const LearnedModels a = learn_models_from_samples(s, set, opts);
  const LearnedModels b = learn_models_from_samples(s, back, opts);
  EXPECT_EQ(models_to_json(a), models_to_json(b));
}

TEST(LearnModels, SampleDimensionMustMatchRobot) {
  const Scenario s = load_scenario(testing::scenario_path("shelf2d"));
  LabeledSampleSet set;
  set.add(vec2(0, 0), true);
  EXPECT_THROW(learn_models_from_samples(s, set, LearnOptions{}), Error);
}

TEST(SamplingModeNames, ParseAndPrint) {
  EXPECT_EQ(parse_sampling_mode("uniform"), SamplingMode::kUniform);
  EXPECT_EQ(parse_sampling_mode("rrt_trace"), SamplingMode::kRrtTrace);
  EXPECT_EQ(to_string(SamplingMode::kRrtTrace), "rrt-trace");
  EXPECT_THROW(parse_sampling_mode("grid"), Error);
}

}  // namespace
}  // namespace safecorridor

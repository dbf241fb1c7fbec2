#pragma once

#include <cstdint>
#include <string>

#include "safecorridor/gmm.hpp"
#include "safecorridor/models.hpp"
#include "safecorridor/scenario.hpp"

namespace safecorridor {

enum class SamplingMode { kUniform, kRrtTrace };

SamplingMode parse_sampling_mode(const std::string& name);
std::string to_string(SamplingMode mode);

/// n labeled configurations. kUniform draws inside the joint limits;
/// kRrtTrace records every configuration checked by standard RRT trials
/// seeded seed, seed + 1, ... until n are collected.
LabeledSampleSet generate_training_samples(const Scenario& scenario, std::size_t n, SamplingMode mode,
                                           std::uint64_t seed);

/// n uniform end-effector-space points labeled by obstacle membership.
LabeledSampleSet generate_workspace_samples(const Scenario& scenario, std::size_t n, std::uint64_t seed);

struct LearnOptions {
  std::size_t samples = 10000;
  SamplingMode mode = SamplingMode::kRrtTrace;
  double bandwidth = 0.1745;
  double workspace_bandwidth = 0.0;  // 0: reuse `bandwidth`
  std::size_t workspace_samples = 0; // 0: reuse `samples`
  double kappa = 0.9;
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  bool learn_free = true;
  bool learn_workspace = true;
};

struct LearnReport {
  std::size_t collision_samples = 0;
  std::size_t free_samples = 0;
  std::size_t collision_clusters = 0;
  std::size_t free_clusters = 0;
  std::size_t workspace_clusters = 0;
  double fit_time_ms = 0.0;
};

/// Fits each requested mixture and its levels at options.kappa. A label
/// class without samples leaves the corresponding model absent.
LearnedModels learn_models(const Scenario& scenario, const LearnOptions& options, LearnReport* report = nullptr);

/// learn_models on externally supplied configuration samples; only the
/// workspace samples are generated.
LearnedModels learn_models_from_samples(const Scenario& scenario, const LabeledSampleSet& samples,
                                        const LearnOptions& options, LearnReport* report = nullptr);

/// Model over the labeled points of one class, with levels at kappa.
MixtureModel fit_model(const LabeledSampleSet& samples, bool in_collision, double bandwidth, double kappa);

}  // namespace safecorridor

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace safecorridor {

enum class Variant {
  kRrt,
  kRrtBiased,
  kRrtConnect,
  kSgRrt,
  kWsSgRrt,
  kGmmSgRrt,
  kGmmWsSgRrt,
};

/// Accepts both "sg-rrt" and "sg_rrt" spellings.
Variant parse_variant(const std::string& name);
std::string to_string(Variant variant);

struct PlannerConfig {
  Variant variant = Variant::kRrt;
  double step = 0.1;              // delta, maximum straight-line step
  double goal_threshold = 0.1;    // d_min
  int max_iter = 3;               // extensions reusing one random sample
  double goal_bias = 0.1;         // probability of sampling the goal when biasing is on
  bool bias_goal = false;         // goal biasing for variants other than rrt_biased
  bool bidirectional = false;     // RRT-Connect style growth for any variant
  double kappa = 0.9;
  double epsilon = 0.01;
  double resolution = 0.05;       // collision-check spacing along segments
  std::size_t budget = 20000;     // maximum extensions
  std::uint64_t seed = 1;

  /// Throws on delta <= 0, d_min <= 0, max_iter < 1 or goal_bias outside [0, 1).
  void validate() const;

  bool uses_goal_bias() const { return variant == Variant::kRrtBiased || bias_goal; }
  bool uses_bidirectional() const { return variant == Variant::kRrtConnect || bidirectional; }
  bool uses_config_corridor() const { return variant == Variant::kSgRrt || variant == Variant::kGmmSgRrt; }
  bool uses_task_corridor() const { return variant == Variant::kWsSgRrt || variant == Variant::kGmmWsSgRrt; }
  bool uses_free_model() const { return variant == Variant::kGmmSgRrt || variant == Variant::kGmmWsSgRrt; }
};

}  // namespace safecorridor

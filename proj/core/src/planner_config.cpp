#include "safecorridor/planner_config.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "safecorridor/error.hpp"

namespace safecorridor {

namespace {

constexpr std::array<std::pair<Variant, const char*>, 7> kVariantNames{{
    {Variant::kRrt, "rrt"},
    {Variant::kRrtBiased, "rrt-biased"},
    {Variant::kRrtConnect, "rrt-connect"},
    {Variant::kSgRrt, "sg-rrt"},
    {Variant::kWsSgRrt, "ws-sg-rrt"},
    {Variant::kGmmSgRrt, "gmm-sg-rrt"},
    {Variant::kGmmWsSgRrt, "gmm-ws-sg-rrt"},
}};

}  // namespace

Variant parse_variant(const std::string& name) {
  std::string normalized = name;
  std::replace(normalized.begin(), normalized.end(), '_', '-');
  std::transform(normalized.begin(), normalized.end(), normalized.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& [variant, label] : kVariantNames) {
    if (normalized == label) return variant;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown planner variant '" + name + "'");
}

std::string to_string(Variant variant) {
  for (const auto& [v, label] : kVariantNames) {
    if (v == variant) return label;
  }
  return "unknown";
}

void PlannerConfig::validate() const {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  if (!(goal_threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "goal threshold must be positive");
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be at least 1");
  if (!(goal_bias >= 0.0 && goal_bias < 1.0)) throw Error(ErrorCode::kInvalidArgument, "goal bias must be in [0, 1)");
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be in (0, 1)");
}

}  // namespace safecorridor

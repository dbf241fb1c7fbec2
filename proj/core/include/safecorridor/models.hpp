#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "safecorridor/confidence.hpp"
#include "safecorridor/corridor.hpp"
#include "safecorridor/gmm.hpp"

namespace safecorridor {

struct MixtureModel {
  GaussianMixture gmm;
  ComponentLevels levels;  // confidence levels at the bundle's kappa
};

/// Everything the planners learn offline for one scenario.
struct LearnedModels {
  double kappa = 0.9;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  std::string sampling_mode;
  std::optional<MixtureModel> collision;  // configuration-space obstacles
  std::optional<MixtureModel> free;       // configuration-space free space
  std::optional<MixtureModel> workspace;  // workspace obstacles
};

/// {dim, bandwidth, components:[{weight, mass, mean, covariance(row-major)}]}
nlohmann::json mixture_to_json(const GaussianMixture& gmm);
GaussianMixture mixture_from_json(const nlohmann::json& doc);

nlohmann::json levels_to_json(const ComponentLevels& levels);
ComponentLevels levels_from_json(const nlohmann::json& doc);

nlohmann::json models_to_json(const LearnedModels& models);
LearnedModels models_from_json(const nlohmann::json& doc);

/// Labeled samples as CSV: header x0,...,x{n-1},collision then one row per
/// point with a 0/1 label.
void write_samples_csv(const LabeledSampleSet& samples, std::ostream& out);
LabeledSampleSet read_samples_csv(std::istream& in);

/// {anchor, epsilon, constraints:[{normal, offset, component}]}
nlohmann::json corridor_to_json(const SafeCorridor& corridor);

void save_models(const LearnedModels& models, const std::filesystem::path& path);
LearnedModels load_models(const std::filesystem::path& path);

}  // namespace safecorridor

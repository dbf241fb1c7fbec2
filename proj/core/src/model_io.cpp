#include "safecorridor/models.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "safecorridor/error.hpp"
#include "safecorridor/scenario.hpp"

namespace safecorridor {

using nlohmann::json;

json mixture_to_json(const GaussianMixture& gmm) {
  json components = json::array();
  for (const auto& c : gmm.components()) {
    json cov = json::array();
    for (int r = 0; r < gmm.dim(); ++r) {
      for (int col = 0; col < gmm.dim(); ++col) cov.push_back(c.covariance(r, col));
    }
    components.push_back({{"weight", c.weight}, {"mass", c.mass}, {"mean", vector_to_json(c.mean)}, {"covariance", cov}});
  }
  return {{"dim", gmm.dim()}, {"bandwidth", gmm.bandwidth()}, {"components", components}};
}

GaussianMixture mixture_from_json(const json& doc) {
  try {
    const int dim = doc.at("dim").get<int>();
    std::vector<GaussianComponent> components;
    for (const auto& c : doc.at("components")) {
      GaussianComponent g;
      g.weight = c.at("weight").get<double>();
      g.mass = c.value("mass", 1.0);
      g.mean = vector_from_json(c.at("mean"));
      const auto& cov = c.at("covariance");
      if (static_cast<int>(cov.size()) != dim * dim || g.mean.size() != dim) {
        throw Error(ErrorCode::kParse, "component size does not match model dimension");
      }
      g.covariance.resize(dim, dim);
      for (int r = 0; r < dim; ++r) {
        for (int col = 0; col < dim; ++col) g.covariance(r, col) = cov[static_cast<std::size_t>(r * dim + col)].get<double>();
      }
      components.push_back(std::move(g));
    }
    return GaussianMixture(std::move(components), doc.value("bandwidth", 0.0));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed mixture: ") + e.what());
  }
}

json levels_to_json(const ComponentLevels& levels) {
  return {{"overall_level", levels.overall_level},
          {"shared_density_level", levels.shared_density_level},
          {"per_component", levels.per_component},
          {"per_component_radius_sq", levels.per_component_radius_sq}};
}

ComponentLevels levels_from_json(const json& doc) {
  try {
    ComponentLevels levels;
    levels.overall_level = doc.at("overall_level").get<double>();
    levels.shared_density_level = doc.at("shared_density_level").get<double>();
    levels.per_component = doc.at("per_component").get<std::vector<double>>();
    levels.per_component_radius_sq = doc.at("per_component_radius_sq").get<std::vector<double>>();
    if (levels.per_component.size() != levels.per_component_radius_sq.size()) {
      throw Error(ErrorCode::kParse, "levels arrays differ in length");
    }
    return levels;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed levels: ") + e.what());
  }
}

namespace {

json model_entry(const MixtureModel& m) {
  json out = mixture_to_json(m.gmm);
  out["levels"] = levels_to_json(m.levels);
  return out;
}

std::optional<MixtureModel> read_entry(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  const json& entry = doc.at(key);
  MixtureModel m{mixture_from_json(entry), levels_from_json(entry.at("levels"))};
  if (m.levels.size() != m.gmm.size()) throw Error(ErrorCode::kParse, "levels do not match mixture size");
  return m;
}

}  // namespace

json models_to_json(const LearnedModels& models) {
  json out;
  out["kappa"] = models.kappa;
  out["epsilon"] = models.epsilon;
  out["seed"] = models.seed;
  out["samples"] = models.sample_count;
  out["sampling_mode"] = models.sampling_mode;
  out["collision"] = models.collision ? model_entry(*models.collision) : json();
  out["free"] = models.free ? model_entry(*models.free) : json();
  out["workspace"] = models.workspace ? model_entry(*models.workspace) : json();
  return out;
}

LearnedModels models_from_json(const json& doc) {
  try {
    LearnedModels m;
    m.kappa = doc.value("kappa", 0.9);
    m.epsilon = doc.value("epsilon", 0.01);
    m.seed = doc.value("seed", std::uint64_t{0});
    m.sample_count = doc.value("samples", std::size_t{0});
    m.sampling_mode = doc.value("sampling_mode", "");
    m.collision = read_entry(doc, "collision");
    m.free = read_entry(doc, "free");
    m.workspace = read_entry(doc, "workspace");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, "bad number '" + cell + "' on sample line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace

void write_samples_csv(const LabeledSampleSet& samples, std::ostream& out) {
  for (int d = 0; d < samples.dim; ++d) out << 'x' << d << ',';
  out << "collision\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (double v : samples.points[i]) out << v << ',';
    out << (samples.collision[i] ? 1 : 0) << '\n';
  }
}

LabeledSampleSet read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "empty sample file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "collision") {
    throw Error(ErrorCode::kParse, "sample header must list coordinates then 'collision'");
  }
  LabeledSampleSet set;
  set.dim = static_cast<int>(header.size()) - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParse, "wrong column count on sample line " + std::to_string(line_no));
    }
    Eigen::VectorXd q(set.dim);
    for (int d = 0; d < set.dim; ++d) q[d] = parse_cell(cells[static_cast<std::size_t>(d)], line_no);
    const std::string& label = cells.back();
    if (label != "0" && label != "1") {
      throw Error(ErrorCode::kParse, "collision label must be 0 or 1 on sample line " + std::to_string(line_no));
    }
    set.add(q, label == "1");
  }
  if (set.size() == 0) throw Error(ErrorCode::kNoSamples, "no samples");
  return set;
}

json corridor_to_json(const SafeCorridor& corridor) {
  json constraints = json::array();
  for (const auto& h : corridor.halfspaces) {
    constraints.push_back({{"normal", vector_to_json(h.normal)}, {"offset", h.offset}, {"component", h.source_component}});
  }
  return {{"anchor", vector_to_json(corridor.anchor)}, {"epsilon", corridor.epsilon}, {"constraints", constraints}};
}

void save_models(const LearnedModels& models, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParse, "cannot write model file " + path.string());
  out << models_to_json(models).dump(2) << '\n';
}

LearnedModels load_models(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot read model file " + path.string());
  try {
    return models_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed model file " + path.string() + ": " + e.what());
  }
}

}  // namespace safecorridor

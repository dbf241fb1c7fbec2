#include "safecorridor_tools/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "safecorridor/error.hpp"
#include "safecorridor/planners.hpp"
#include "safecorridor/scenario.hpp"
#include "safecorridor/training.hpp"

namespace safecorridor::tools {

using nlohmann::json;

namespace {

bool needs_model(Variant v) {
  PlannerConfig c;
  c.variant = v;
  return c.uses_config_corridor() || c.uses_task_corridor() || c.uses_free_model();
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& cell, std::size_t line_no) {
  std::istringstream in(cell);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) {
    throw Error(ErrorCode::kParse, "bad number '" + cell + "' on CSV line " + std::to_string(line_no));
  }
  return value;
}

const char* kHeader =
    "scenario,variant,seed,train_samples,success,iterations,extensions,collision_checks,colliding_extensions,wall_time_ms";

}  // namespace

void BenchSpec::validate() const {
  if (scenarios.empty()) throw Error(ErrorCode::kInvalidArgument, "bench spec lists no scenarios");
  if (variants.empty()) throw Error(ErrorCode::kInvalidArgument, "bench spec lists no variants");
  if (seed_count == 0) throw Error(ErrorCode::kInvalidArgument, "bench seed range is empty");
  const bool any_model = std::any_of(variants.begin(), variants.end(), needs_model);
  if (any_model && train_sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "bench spec needs train_sizes");
  for (std::size_t n : train_sizes) {
    if (n == 0) throw Error(ErrorCode::kNoSamples, "no samples");
  }
}

BenchSpec bench_spec_from_json(const json& doc, const std::filesystem::path& base_dir) {
  try {
    BenchSpec spec;
    auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() || base_dir.empty() ? p : base_dir / p; };
    for (const auto& s : doc.at("scenarios")) spec.scenarios.push_back(resolve(s.get<std::string>()));
    for (const auto& v : doc.at("variants")) spec.variants.push_back(parse_variant(v.get<std::string>()));
    if (doc.contains("seeds")) {
      const json& seeds = doc.at("seeds");
      if (seeds.is_array()) {
        const auto lo = seeds.at(0).get<std::uint64_t>();
        const auto hi = seeds.at(1).get<std::uint64_t>();
        if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "bench seed range is empty");
        spec.seed_first = lo;
        spec.seed_count = static_cast<std::size_t>(hi - lo + 1);
      } else {
        spec.seed_first = seeds.value("first", spec.seed_first);
        spec.seed_count = seeds.value("count", spec.seed_count);
      }
    }
    if (doc.contains("train_sizes")) spec.train_sizes = doc.at("train_sizes").get<std::vector<std::size_t>>();
    spec.sampling_mode = doc.value("sampling_mode", spec.sampling_mode);
    parse_sampling_mode(spec.sampling_mode);
    spec.bandwidth = doc.value("bandwidth", spec.bandwidth);
    spec.kappa = doc.value("kappa", spec.kappa);
    if (doc.contains("epsilon")) spec.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("budget")) spec.budget = doc.at("budget").get<std::size_t>();
    spec.model_seed = doc.value("model_seed", spec.model_seed);
    spec.output_dir = resolve(doc.value("output_dir", spec.output_dir.string()));
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed bench spec: ") + e.what());
  }
}

BenchSpec load_bench_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot read bench spec " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed bench spec " + path.string() + ": " + e.what());
  }
  return bench_spec_from_json(doc, path.parent_path());
}

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("SAFECORRIDOR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

std::vector<TrialRow> run_bench(const BenchSpec& spec, unsigned threads, std::ostream* log) {
  spec.validate();
  std::vector<Scenario> scenarios;
  for (const auto& path : spec.scenarios) scenarios.push_back(load_scenario(path));

  const bool any_model = std::any_of(spec.variants.begin(), spec.variants.end(), needs_model);
  const bool any_free = std::any_of(spec.variants.begin(), spec.variants.end(), [](Variant v) {
    PlannerConfig c;
    c.variant = v;
    return c.uses_free_model();
  });
  const bool any_task = std::any_of(spec.variants.begin(), spec.variants.end(), [](Variant v) {
    PlannerConfig c;
    c.variant = v;
    return c.uses_task_corridor();
  });

  // models[s * sizes + t]
  std::vector<LearnedModels> models;
  if (any_model) {
    models.resize(scenarios.size() * spec.train_sizes.size());
    parallel_for(models.size(), threads, [&](std::size_t i) {
      const Scenario& scenario = scenarios[i / spec.train_sizes.size()];
      LearnOptions options;
      options.samples = spec.train_sizes[i % spec.train_sizes.size()];
      options.mode = parse_sampling_mode(spec.sampling_mode);
      options.bandwidth = spec.bandwidth;
      options.kappa = spec.kappa;
      options.seed = spec.model_seed;
      options.learn_free = any_free;
      options.learn_workspace = any_task;
      models[i] = learn_models(scenario, options);
    });
    if (log != nullptr) *log << "learned " << models.size() << " model bundle(s)\n";
  }

  struct Trial {
    std::size_t scenario;
    Variant variant;
    std::size_t size_index;  // npos for model-free variants
    std::uint64_t seed;
  };
  constexpr std::size_t kNoModel = static_cast<std::size_t>(-1);
  std::vector<Trial> trials;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (Variant v : spec.variants) {
      const bool model = needs_model(v);
      const std::size_t sizes = model ? spec.train_sizes.size() : 1;
      for (std::size_t t = 0; t < sizes; ++t) {
        for (std::size_t k = 0; k < spec.seed_count; ++k) {
          trials.push_back({s, v, model ? t : kNoModel, spec.seed_first + k});
        }
      }
    }
  }

  std::vector<TrialRow> rows(trials.size());
  parallel_for(trials.size(), threads, [&](std::size_t i) {
    const Trial& trial = trials[i];
    const Scenario& scenario = scenarios[trial.scenario];
    PlannerConfig config = scenario.planner;
    config.variant = trial.variant;
    if (spec.budget) config.budget = *spec.budget;
    const LearnedModels* bundle =
        trial.size_index == kNoModel ? nullptr
                                     : &models[trial.scenario * spec.train_sizes.size() + trial.size_index];
    if (bundle != nullptr) config.epsilon = bundle->epsilon;
    if (spec.epsilon) config.epsilon = *spec.epsilon;
    try {
      const PlanResult result = plan(scenario, config, bundle, trial.seed);
      TrialRow& row = rows[i];
      row.scenario = scenario.name;
      row.variant = to_string(trial.variant);
      row.seed = trial.seed;
      row.train_samples = trial.size_index == kNoModel ? 0 : spec.train_sizes[trial.size_index];
      row.success = result.found();
      row.iterations = result.stats.iterations;
      row.extensions = result.stats.extensions;
      row.collision_checks = result.stats.collision_checks;
      row.colliding_extensions = result.stats.colliding_extensions;
      row.wall_time_ms = result.stats.wall_time_ms;
    } catch (const Error& e) {
      throw Error(e.code(), "trial failed (scenario " + scenario.name + ", variant " + to_string(trial.variant) +
                                ", seed " + std::to_string(trial.seed) + "): " + e.what());
    }
  });
  if (log != nullptr) *log << "ran " << rows.size() << " trial(s)\n";
  return rows;
}

void write_csv(const std::vector<TrialRow>& rows, std::ostream& out) {
  out << kHeader << '\n';
  char wall[32];
  for (const auto& r : rows) {
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_ms);
    out << r.scenario << ',' << r.variant << ',' << r.seed << ',' << r.train_samples << ',' << (r.success ? 1 : 0)
        << ',' << r.iterations << ',' << r.extensions << ',' << r.collision_checks << ',' << r.colliding_extensions << ',' << wall << '\n';
  }
}

std::vector<TrialRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw Error(ErrorCode::kParse, "unexpected CSV header");
  std::vector<TrialRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 10) throw Error(ErrorCode::kParse, "wrong column count on CSV line " + std::to_string(line_no));
    TrialRow r;
    r.scenario = cells[0];
    r.variant = cells[1];
    r.seed = parse_number<std::uint64_t>(cells[2], line_no);
    r.train_samples = parse_number<std::size_t>(cells[3], line_no);
    r.success = parse_number<int>(cells[4], line_no) != 0;
    r.iterations = parse_number<std::size_t>(cells[5], line_no);
    r.extensions = parse_number<std::size_t>(cells[6], line_no);
    r.collision_checks = parse_number<std::size_t>(cells[7], line_no);
    r.colliding_extensions = parse_number<std::size_t>(cells[8], line_no);
    r.wall_time_ms = parse_number<double>(cells[9], line_no);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(ErrorCode::kParse, "CSV has no rows");
  return rows;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<GroupSummary> summarize(const std::vector<TrialRow>& rows) {
  std::vector<std::tuple<std::string, std::size_t, std::string>> keys;
  std::map<std::tuple<std::string, std::size_t, std::string>, std::vector<const TrialRow*>> groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.scenario, r.train_samples, r.variant);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<GroupSummary> out;
  for (const auto& key : keys) {
    const auto& members = groups.at(key);
    GroupSummary g;
    std::tie(g.scenario, g.train_samples, g.variant) = key;
    g.trials = members.size();
    std::vector<double> checks, walls;
    double successes = 0, iterations = 0, extensions = 0, fraction = 0;
    for (const TrialRow* r : members) {
      successes += r->success ? 1 : 0;
      iterations += static_cast<double>(r->iterations);
      extensions += static_cast<double>(r->extensions);
      fraction += r->colliding_fraction();
      checks.push_back(static_cast<double>(r->collision_checks));
      walls.push_back(r->wall_time_ms);
    }
    const double n = static_cast<double>(g.trials);
    g.success_rate = successes / n;
    g.mean_iterations = iterations / n;
    g.mean_extensions = extensions / n;
    g.mean_colliding_fraction = fraction / n;
    g.median_checks = quantile(checks, 0.5);
    g.q1_checks = quantile(checks, 0.25);
    g.q3_checks = quantile(checks, 0.75);
    g.median_wall_ms = quantile(walls, 0.5);
    out.push_back(std::move(g));
  }
  return out;
}

std::string summary_markdown(const std::vector<GroupSummary>& groups) {
  std::ostringstream out;
  out << "| scenario | train samples | variant | trials | success | median checks | IQR checks | "
         "mean iterations | mean extensions | colliding fraction | median wall ms |\n"
      << "|---|---:|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  char buf[256];
  for (const auto& g : groups) {
    std::snprintf(buf, sizeof buf, "| %s | %zu | %s | %zu | %.2f | %.1f | %.1f-%.1f | %.1f | %.1f | %.3f | %.2f |\n",
                  g.scenario.c_str(), g.train_samples, g.variant.c_str(), g.trials, g.success_rate, g.median_checks,
                  g.q1_checks, g.q3_checks, g.mean_iterations, g.mean_extensions, g.mean_colliding_fraction, g.median_wall_ms);
    out << buf;
  }
  return out.str();
}

}  // namespace safecorridor::tools

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecorridor/planner_config.hpp"

namespace safecorridor::tools {

/// One benchmark sweep: every scenario x variant x seed, and for variants
/// that need learned models, every training size as well.
struct BenchSpec {
  std::vector<std::filesystem::path> scenarios;
  std::vector<Variant> variants;
  std::uint64_t seed_first = 1;
  std::size_t seed_count = 50;
  std::vector<std::size_t> train_sizes{10000};
  std::string sampling_mode = "rrt-trace";
  double bandwidth = 0.1745;
  double kappa = 0.9;
  std::optional<double> epsilon;   // planner epsilon override
  std::optional<std::size_t> budget;
  std::uint64_t model_seed = 1;
  std::filesystem::path output_dir = "bench_out";

  void validate() const;
};

/// Relative scenario paths and output_dir resolve against `base_dir`.
BenchSpec bench_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
BenchSpec load_bench_spec(const std::filesystem::path& path);

struct TrialRow {
  std::string scenario;
  std::string variant;
  std::uint64_t seed = 0;
  std::size_t train_samples = 0;  // 0 for variants without a model
  bool success = false;
  std::size_t iterations = 0;
  std::size_t extensions = 0;
  std::size_t collision_checks = 0;
  std::size_t colliding_extensions = 0;
  double wall_time_ms = 0.0;

  double colliding_fraction() const {
    return extensions == 0 ? 0.0 : static_cast<double>(colliding_extensions) / static_cast<double>(extensions);
  }
};

/// Runs all trials on up to `threads` workers. Rows come back in
/// deterministic trial order regardless of scheduling.
std::vector<TrialRow> run_bench(const BenchSpec& spec, unsigned threads, std::ostream* log = nullptr);

/// Worker count: min(requested, SAFECORRIDOR_THREADS, hardware), at least 1.
unsigned resolve_threads(unsigned requested);

void write_csv(const std::vector<TrialRow>& rows, std::ostream& out);
/// Throws Error(kParse) on a missing header, wrong column count or bad number.
std::vector<TrialRow> read_csv(std::istream& in);

struct GroupSummary {
  std::string scenario;
  std::size_t train_samples = 0;
  std::string variant;
  std::size_t trials = 0;
  double success_rate = 0.0;
  double median_checks = 0.0;
  double q1_checks = 0.0;
  double q3_checks = 0.0;
  double mean_iterations = 0.0;
  double mean_extensions = 0.0;
  double mean_colliding_fraction = 0.0;
  double median_wall_ms = 0.0;
};

/// Groups keyed by (scenario, train_samples, variant) in first-seen order.
std::vector<GroupSummary> summarize(const std::vector<TrialRow>& rows);
std::string summary_markdown(const std::vector<GroupSummary>& groups);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace safecorridor::tools

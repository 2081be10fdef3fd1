#pragma once

// Batch commands behind the command-line tool. Each returns a process exit
// status and writes human-readable progress to `log`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "amr/amr_model.hpp"
#include "amr/baselines.hpp"
#include "amr/dataset.hpp"
#include "amr/eval.hpp"
#include "amr/ingest.hpp"
#include "amr/metrics.hpp"

#include "json.hpp"

namespace amr {

using json = nlohmann::json;

struct RunConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<std::string> algorithms{"amr", "knn", "lr", "dt"};
  std::vector<double> alpha_grid = default_alpha_grid();
  std::vector<double> delta_grid = default_delta_grid();
  std::size_t n_perm = kDefaultPermutations;
  std::uint64_t seed = 20240501;
  std::filesystem::path output_dir = "results";
  unsigned threads = 1;
  Aggregation aggregation = Aggregation::Mean;
  std::size_t knn_k_max = 25;
  TreeConfig tree;
};

/// Keys: datasets, algorithms, alpha_grid, delta_grid, n_perm, seed,
/// output_dir, threads, knn_k_max, dt_max_depth, dt_min_leaf, aggregation.
RunConfig load_run_config(const std::filesystem::path& file);

const std::vector<std::string>& known_algorithms();
void validate_run_config(const RunConfig& config);

struct AlgorithmRun {
  std::string algorithm;
  Vector actuals;
  Vector predictions;
  MetricSet metrics;
  json params = json::object();
  json extra = json::object();  // algorithm-specific sections ("grid", "diagnostics")
};

AlgorithmRun run_algorithm(const std::string& id, const Dataset& d, const RunConfig& config);

json grid_result_json(const GridSearchResult& r);
json metric_set_json(const MetricSet& m);

struct Predictions {
  std::vector<std::size_t> row_index;
  Vector prediction;
  Vector actual;  // empty when the file has no `actual` column
};

Predictions read_predictions(const std::filesystem::path& file);
void write_predictions(const std::filesystem::path& file, const AlgorithmRun& run);

int cmd_ama_validate(const std::vector<std::size_t>& checkpoints, std::uint64_t seed,
                     const std::filesystem::path& out_path, bool literal_index_divisor,
                     unsigned threads, std::ostream& log);

/// Writes <out>/<dataset>/<alg>.metrics.json, <alg>.predictions.csv,
/// dataset.csv and <out>/manifest.json.
int cmd_evaluate(const RunConfig& config, std::ostream& log);

/// Evaluates already-prepared datasets (the file-free core of cmd_evaluate).
int evaluate_datasets(const std::vector<Dataset>& datasets, const RunConfig& config,
                      std::ostream& log);

struct CompareOutcome {
  PermTestResult perm;
  Verdict verdict;
  MetricSet a;
  MetricSet b;
};

/// `a`/`b` are algorithm ids looked up as <pred_dir>/<id>.predictions.csv, or
/// paths to prediction files (external imports use `row_index,prediction`).
CompareOutcome compare_predictions(const std::filesystem::path& pred_dir, const std::string& a,
                                   const std::string& b, std::size_t n_perm, std::uint64_t seed);

int cmd_compare(const std::filesystem::path& pred_dir, const std::string& a,
                const std::string& b, std::size_t n_perm, std::uint64_t seed,
                const std::filesystem::path& out_file, std::ostream& log);

/// Property suites for the least-squares bounds; JSON summary with pass counts.
json theory_check(std::uint64_t seed, std::size_t trials);
int cmd_theory_check(std::uint64_t seed, std::size_t trials,
                     const std::filesystem::path& out_file, std::ostream& log);

struct ReportOptions {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::filesystem::path published;  // optional reference metrics CSV
  std::string baseline = "amr";
  std::size_t n_perm = kDefaultPermutations;
  std::uint64_t seed = 20240501;
};

/// Metric tables (datasets × algorithms), the pairwise permutation table and,
/// given published reference metrics, a per-cell deviation report.
int cmd_report(const ReportOptions& options, std::ostream& log);

}  // namespace amr

// amr: batch front end for validation, evaluation, comparison and reporting.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amr/error.hpp"
#include "amr/runner.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Arithmetic method regression toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 20240501;
  std::string out;
  std::string config;
  unsigned threads = 1;
  app.add_option("--seed", seed, "Root seed")->capture_default_str();
  app.add_option("--out", out, "Output file or directory");
  app.add_option("--config", config, "Run configuration file");
  app.add_option("--threads", threads, "Worker threads")->capture_default_str();

  auto* validate = app.add_subcommand("ama-validate", "Random AMA decomposition checkpoints");
  std::vector<std::size_t> checkpoints;
  bool literal = false;
  validate->add_option("--checkpoints", checkpoints, "Dimension counts, ascending")
      ->required()
      ->delimiter(',')
      ->expected(1, -1);
  validate->add_flag("--literal-index-divisor", literal, "Divide by the variable index");

  auto* evaluate = app.add_subcommand("evaluate", "LOOCV evaluation of configured datasets");
  std::vector<std::string> algorithms;
  bool literal_sum = false;
  evaluate->add_option("--algorithms", algorithms, "Algorithm ids (overrides config)")
      ->delimiter(',');
  evaluate->add_flag("--literal-sum", literal_sum, "Keep raw neighbour sums");

  auto* compare = app.add_subcommand("compare", "Paired permutation test on prediction files");
  std::string pred_dir, alg_a, alg_b;
  std::size_t n_perm = amr::kDefaultPermutations;
  compare->add_option("--predictions", pred_dir, "Directory with <id>.predictions.csv")->required();
  compare->add_option("a", alg_a, "First algorithm id or prediction file")->required();
  compare->add_option("b", alg_b, "Second algorithm id or prediction file")->required();
  compare->add_option("--n-perm", n_perm, "Monte Carlo draws")->capture_default_str();

  auto* theory = app.add_subcommand("theory-check", "Random-instance checks of the solver bounds");
  std::size_t trials = 100;
  theory->add_option("--trials", trials, "Instances per suite")->capture_default_str();

  auto* report = app.add_subcommand("report", "Metric, pairwise and deviation tables");
  amr::ReportOptions ropt;
  std::string input_dir, published;
  report->add_option("--input", input_dir, "Directory written by evaluate")->required();
  report->add_option("--published", published, "Reference metrics CSV");
  report->add_option("--baseline", ropt.baseline, "Algorithm compared against the rest")
      ->capture_default_str();
  report->add_option("--n-perm", ropt.n_perm, "Monte Carlo draws")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      if (checkpoints.empty()) {
        std::cerr << "ama-validate: at least one checkpoint is required\n";
        return 2;
      }
      const fs::path path = out.empty() ? fs::path("ama_validation.csv") : fs::path(out);
      return amr::cmd_ama_validate(checkpoints, seed, path, literal, threads, std::cerr);
    }
    if (*evaluate) {
      if (config.empty()) {
        std::cerr << "evaluate: --config is required\n";
        return 2;
      }
      amr::RunConfig rc = amr::load_run_config(config);
      if (!algorithms.empty()) rc.algorithms = algorithms;
      if (literal_sum) rc.aggregation = amr::Aggregation::LiteralSum;
      if (!out.empty()) rc.output_dir = out;
      if (app.get_option("--seed")->count() > 0) rc.seed = seed;
      if (app.get_option("--threads")->count() > 0) rc.threads = threads;
      return amr::cmd_evaluate(rc, std::cerr);
    }
    if (*compare) {
      if (n_perm == 0) {
        std::cerr << "compare: --n-perm must be positive\n";
        return 2;
      }
      const int rc = amr::cmd_compare(pred_dir, alg_a, alg_b, n_perm, seed, out, std::cout);
      return rc;
    }
    if (*theory) {
      if (trials == 0) {
        std::cerr << "theory-check: --trials must be at least 1\n";
        return 2;
      }
      return amr::cmd_theory_check(seed, trials, out, out.empty() ? std::cout : std::cerr);
    }
    if (*report) {
      ropt.input_dir = input_dir;
      ropt.output_dir = out.empty() ? fs::path(input_dir) / "report" : fs::path(out);
      ropt.published = published;
      ropt.seed = seed;
      return amr::cmd_report(ropt, std::cerr);
    }
  } catch (const amr::Error& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == amr::ErrorKind::InvalidArgument ? 2 : 1;
  }
  return 0;
}

#include "amr/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "amr/ama.hpp"
#include "amr/error.hpp"
#include "amr/format.hpp"
#include "amr/kv_config.hpp"
#include "amr/linalg.hpp"
#include "amr/random.hpp"

namespace amr {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + file.string());
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, file.string() + ": " + e.what());
  }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, std::string("invalid ") + what + ": " + s);
  }
}

}  // namespace

// ---------------------------------------------------------------- config

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> ids{"amr", "knn", "lr", "dt"};
  return ids;
}

void validate_run_config(const RunConfig& c) {
  if (c.algorithms.empty()) throw Error(ErrorKind::InvalidArgument, "no algorithms selected");
  for (const auto& a : c.algorithms)
    if (std::find(known_algorithms().begin(), known_algorithms().end(), a) == known_algorithms().end())
      throw Error(ErrorKind::InvalidArgument, "unknown algorithm id: " + a);
  if (c.alpha_grid.empty() || c.delta_grid.empty())
    throw Error(ErrorKind::InvalidArgument, "empty hyperparameter grid");
  for (double a : c.alpha_grid)
    if (!(a > 0.0 && a <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha grid outside (0, 1]");
  for (double d : c.delta_grid)
    if (!(d >= 1.0 && d <= 10.0)) throw Error(ErrorKind::InvalidArgument, "delta grid outside [1, 10]");
  if (c.n_perm == 0) throw Error(ErrorKind::InvalidArgument, "n_perm must be positive");
}

RunConfig load_run_config(const fs::path& file) {
  const auto kv = load_key_values(file);
  RunConfig c;
  const auto base = file.parent_path();
  for (const auto& [key, value] : kv) {
    if (key == "datasets") {
      for (const auto& p : split_list(value)) {
        fs::path dp = p;
        if (dp.is_relative()) dp = base / dp;
        c.datasets.push_back(load_dataset_config(dp));
      }
    } else if (key == "algorithms") {
      c.algorithms = split_list(value);
    } else if (key == "alpha_grid") {
      c.alpha_grid = parse_double_list(value);
    } else if (key == "delta_grid") {
      c.delta_grid = parse_double_list(value);
    } else if (key == "n_perm") {
      c.n_perm = parse_u64(value, "n_perm");
    } else if (key == "seed") {
      c.seed = parse_u64(value, "seed");
    } else if (key == "output_dir") {
      c.output_dir = value;
      if (c.output_dir.is_relative()) c.output_dir = base / c.output_dir;
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(parse_u64(value, "threads"));
    } else if (key == "knn_k_max") {
      c.knn_k_max = parse_u64(value, "knn_k_max");
    } else if (key == "dt_max_depth") {
      c.tree.max_depth = parse_u64(value, "dt_max_depth");
    } else if (key == "dt_min_leaf") {
      c.tree.min_leaf = parse_u64(value, "dt_min_leaf");
    } else if (key == "aggregation") {
      if (value == "mean")
        c.aggregation = Aggregation::Mean;
      else if (value == "literal-sum")
        c.aggregation = Aggregation::LiteralSum;
      else
        throw Error(ErrorKind::ParseError, "aggregation must be mean or literal-sum");
    } else {
      throw Error(ErrorKind::ParseError, "unknown run config key: " + key);
    }
  }
  validate_run_config(c);
  return c;
}

// ---------------------------------------------------------------- algorithms

json metric_set_json(const MetricSet& m) {
  return json{{"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}, {"r2", m.r2}, {"et_seconds", m.et}};
}

json grid_result_json(const GridSearchResult& r) {
  return json{{"mae_op", r.mae_op},     {"mse_op", r.mse_op},     {"rmse_op", r.rmse_op},
              {"r2_op", r.r2_op},       {"alpha_op", r.alpha_op}, {"beta_op", r.beta_op},
              {"delta_op", r.delta_op}, {"k_op", r.k_op},         {"et_seconds", r.et}};
}

AlgorithmRun run_algorithm(const std::string& id, const Dataset& d, const RunConfig& config) {
  AlgorithmRun run;
  run.algorithm = id;
  run.actuals = d.y;
  const auto t0 = Clock::now();
  if (id == "amr") {
    const auto g = grid_search_loocv(d, config.alpha_grid, config.delta_grid,
                                     GridOptions{config.aggregation, config.threads});
    run.predictions = g.predictions;
    run.params = json{{"alpha", g.result.alpha_op},
                      {"beta", g.result.beta_op},
                      {"delta", g.result.delta_op},
                      {"aggregation", config.aggregation == Aggregation::Mean ? "mean" : "literal-sum"}};
    run.extra["grid"] = grid_result_json(g.result);
    double ksum = 0.0;
    for (auto k : g.fold_k) ksum += static_cast<double>(k);
    run.extra["diagnostics"] = json{{"k_last_fold", g.result.k_last_fold},
                                    {"k_mean", ksum / static_cast<double>(g.fold_k.size())},
                                    {"grid_points", g.surface.size()}};
  } else if (id == "knn") {
    const auto sel = knn_select_k(d, config.knn_k_max, DistanceMetric::Euclidean);
    run.predictions = sel.predictions;
    run.params = json{{"k", sel.k}, {"metric", "euclidean"}, {"k_max", config.knn_k_max}};
  } else if (id == "lr") {
    run.predictions = loocv(d, linreg_fit_predict, config.threads).predictions;
    run.params = json{{"intercept", true}};
  } else if (id == "dt") {
    const TreeConfig tc = config.tree;
    run.predictions =
        loocv(d,
              [tc](const DenseMatrix& X, std::span<const double> Y, std::span<const double> x) {
                return dtree_fit_predict(X, Y, x, tc);
              },
              config.threads)
            .predictions;
    run.params = json{{"max_depth", tc.max_depth}, {"min_leaf", tc.min_leaf}};
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm id: " + id);
  }
  run.metrics = compute_metrics(run.actuals, run.predictions, seconds_since(t0));
  if (id == "amr") {
    // ET covers the whole grid search, the same span the grid reports.
    run.extra["grid"]["et_seconds"] = run.metrics.et;
  }
  return run;
}

// ---------------------------------------------------------------- predictions I/O

void write_predictions(const fs::path& file, const AlgorithmRun& run) {
  std::ostringstream ss;
  ss << "row_index,actual,prediction\n";
  for (std::size_t i = 0; i < run.predictions.size(); ++i)
    ss << i << ',' << fmt_double(run.actuals[i]) << ',' << fmt_double(run.predictions[i]) << '\n';
  write_text(file, ss.str());
}

Predictions read_predictions(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::MissingPredictions, "no prediction file " + file.string());
  const RawTable t = parse_csv(in, CsvOptions{});
  const auto find = [&](const std::string& col) -> std::optional<std::size_t> {
    const auto it = std::find(t.header.begin(), t.header.end(), col);
    if (it == t.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const auto ri = find("row_index");
  const auto pi = find("prediction");
  const auto ai = find("actual");
  if (!ri || !pi)
    throw Error(ErrorKind::ParseError, file.string() + " needs row_index and prediction columns");
  Predictions p;
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    const auto& row = t.cells[r];
    try {
      p.row_index.push_back(std::stoull(row[*ri]));
      p.prediction.push_back(std::stod(row[*pi]));
      if (ai) p.actual.push_back(std::stod(row[*ai]));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, file.string() + ": bad numeric cell", r + 2);
    }
  }
  // Sort by row index so files written in any order pair up.
  std::vector<std::size_t> order(p.row_index.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.row_index[a] < p.row_index[b]; });
  Predictions s;
  for (auto i : order) {
    s.row_index.push_back(p.row_index[i]);
    s.prediction.push_back(p.prediction[i]);
    if (!p.actual.empty()) s.actual.push_back(p.actual[i]);
  }
  for (std::size_t i = 1; i < s.row_index.size(); ++i)
    if (s.row_index[i] == s.row_index[i - 1])
      throw Error(ErrorKind::ParseError, file.string() + ": duplicate row_index", s.row_index[i]);
  return s;
}

// ---------------------------------------------------------------- ama-validate

int cmd_ama_validate(const std::vector<std::size_t>& checkpoints, std::uint64_t seed,
                     const fs::path& out_path, bool literal_index_divisor, unsigned threads,
                     std::ostream& log) {
  try {
    ValidationOptions opts;
    opts.divisor = literal_index_divisor ? IndexDivisor::Literal : IndexDivisor::TotalCount;
    opts.threads = threads;
    const auto records = ama_validate(checkpoints, seed, opts);
    std::ostringstream ss;
    write_validation_csv(ss, records);
    write_text(out_path, ss.str());
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, r.eps);
    log << "ama-validate: " << records.size() << " checkpoints, max eps " << fmt_double(worst)
        << " %, written to " << out_path.string() << '\n';
    return 0;
  } catch (const Error& e) {
    log << "ama-validate: " << e.what() << '\n';
    return 1;
  }
}

// ---------------------------------------------------------------- evaluate

namespace {

int evaluate_one(const Dataset& d, const RunConfig& config, const json& preprocessing,
                 std::ostream& log) {
  const fs::path dir = config.output_dir / d.name;
  fs::create_directories(dir);
  {
    std::ostringstream ss;
    write_numeric_csv(ss, d);
    write_text(dir / "dataset.csv", ss.str());
  }
  int status = 0;
  for (const auto& alg : config.algorithms) {
    try {
      const auto run = run_algorithm(alg, d, config);
      json doc{{"dataset", d.name},
               {"algorithm", alg},
               {"n", d.rows()},
               {"m", d.cols()},
               {"metrics", metric_set_json(run.metrics)},
               {"params", run.params},
               {"preprocessing", preprocessing}};
      for (const auto& [k, v] : run.extra.items()) doc[k] = v;
      write_text(dir / (alg + ".metrics.json"), doc.dump(2) + "\n");
      write_predictions(dir / (alg + ".predictions.csv"), run);
      log << d.name << " / " << alg << ": MAE " << fmt_double(run.metrics.mae) << '\n';
    } catch (const Error& e) {
      log << d.name << " / " << alg << ": FAILED " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

void write_manifest(const RunConfig& config, const std::vector<std::string>& names) {
  json m{{"datasets", names},
         {"algorithms", config.algorithms},
         {"seed", config.seed},
         {"n_perm", config.n_perm}};
  write_text(config.output_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

int evaluate_datasets(const std::vector<Dataset>& datasets, const RunConfig& config,
                      std::ostream& log) {
  validate_run_config(config);
  int status = 0;
  std::vector<std::string> names;
  for (const auto& d : datasets) {
    names.push_back(d.name);
    try {
      status |= evaluate_one(d, config, json::object(), log);
    } catch (const Error& e) {
      log << d.name << ": FAILED " << e.what() << '\n';
      status = 1;
    }
  }
  write_manifest(config, names);
  return status;
}

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  try {
    validate_run_config(config);
  } catch (const Error& e) {
    log << "evaluate: " << e.what() << '\n';
    return 2;
  }
  if (config.datasets.empty()) {
    log << "evaluate: no datasets configured\n";
    return 2;
  }
  int status = 0;
  std::vector<std::string> names;
  for (const auto& dc : config.datasets) {
    names.push_back(dc.name);
    try {
      const auto prep = prepare_dataset(dc);
      json pre{{"rows_removed", prep.rows_removed},
               {"selected_columns", prep.selected},
               {"feature_names", prep.dataset.feature_names},
               {"target", prep.dataset.target_name}};
      status |= evaluate_one(prep.dataset, config, pre, log);
    } catch (const Error& e) {
      log << dc.name << ": FAILED " << e.what() << '\n';
      status = 1;
    }
  }
  write_manifest(config, names);
  return status;
}

// ---------------------------------------------------------------- compare

namespace {

fs::path prediction_file(const fs::path& dir, const std::string& id) {
  const fs::path direct = id;
  if (direct.extension() == ".csv" && fs::exists(direct)) return direct;
  return dir / (id + ".predictions.csv");
}

std::optional<double> metrics_et(const fs::path& dir, const std::string& id) {
  const auto f = dir / (id + ".metrics.json");
  if (!fs::exists(f)) return std::nullopt;
  const auto j = read_json(f);
  if (!j.contains("metrics")) return std::nullopt;
  return j["metrics"].value("et_seconds", 0.0);
}

}  // namespace

CompareOutcome compare_predictions(const fs::path& pred_dir, const std::string& a,
                                   const std::string& b, std::size_t n_perm, std::uint64_t seed) {
  const auto pa = read_predictions(prediction_file(pred_dir, a));
  const auto pb = read_predictions(prediction_file(pred_dir, b));
  if (pa.prediction.size() != pb.prediction.size())
    throw Error(ErrorKind::RowCountMismatch, "prediction files have " +
                                                 std::to_string(pa.prediction.size()) + " and " +
                                                 std::to_string(pb.prediction.size()) + " rows");
  if (pa.row_index != pb.row_index)
    throw Error(ErrorKind::RowCountMismatch, "prediction files cover different row indices");
  const Vector& actual = !pa.actual.empty() ? pa.actual : pb.actual;
  if (actual.empty())
    throw Error(ErrorKind::MissingPredictions, "neither prediction file carries actual values");

  CompareOutcome o;
  o.a = compute_metrics(actual, pa.prediction, metrics_et(pred_dir, a).value_or(0.0));
  o.b = compute_metrics(actual, pb.prediction, metrics_et(pred_dir, b).value_or(0.0));
  o.perm = permutation_test(absolute_errors(actual, pa.prediction),
                            absolute_errors(actual, pb.prediction), n_perm, seed);
  o.verdict = decision_rule(o.a, o.b, o.perm);
  return o;
}

namespace {

json compare_json(const std::string& a, const std::string& b, const CompareOutcome& o) {
  json et = nullptr;
  if (o.verdict.et_preference) et = *o.verdict.et_preference == Side::A ? a : b;
  return json{{"a", a},
              {"b", b},
              {"perm_test",
               {{"dif_obs", o.perm.dif_obs},
                {"p_value", o.perm.p_value},
                {"n_perms", o.perm.n_perms},
                {"exhaustive", o.perm.exhaustive},
                {"seed", o.perm.seed}}},
              {"verdict",
               {{"decision", to_string(o.verdict.decision)},
                {"significant", o.verdict.significant},
                {"et_preference", et},
                {"mse_agrees", o.verdict.mse_agrees},
                {"rmse_agrees", o.verdict.rmse_agrees},
                {"r2_agrees", o.verdict.r2_agrees}}},
              {"metrics_a", metric_set_json(o.a)},
              {"metrics_b", metric_set_json(o.b)}};
}

std::string stem_id(const std::string& id) {
  fs::path p = id;
  if (p.extension() != ".csv") return id;
  auto s = p.stem().string();
  const std::string suffix = ".predictions";
  if (s.size() > suffix.size() && s.ends_with(suffix)) s.erase(s.size() - suffix.size());
  return s;
}

}  // namespace

int cmd_compare(const fs::path& pred_dir, const std::string& a, const std::string& b,
                std::size_t n_perm, std::uint64_t seed, const fs::path& out_file,
                std::ostream& log) {
  try {
    const auto o = compare_predictions(pred_dir, a, b, n_perm, seed);
    const auto an = stem_id(a), bn = stem_id(b);
    const fs::path out =
        out_file.empty() ? pred_dir / ("compare_" + an + "_vs_" + bn + ".json") : out_file;
    write_text(out, compare_json(an, bn, o).dump(2) + "\n");
    log << an << " vs " << bn << ": " << to_string(o.verdict.decision)
        << " (dif_obs " << fmt_double(o.perm.dif_obs) << ", p " << fmt_double(o.perm.p_value)
        << (o.perm.exhaustive ? ", exhaustive" : ", monte-carlo") << ", n_perms "
        << o.perm.n_perms << ")\n";
    return 0;
  } catch (const Error& e) {
    log << "compare: " << e.what() << '\n';
    return 1;
  }
}

// ---------------------------------------------------------------- theory-check

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
  DenseMatrix A(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) A(r, c) = rng.uniform(-1.0, 1.0);
  return A;
}

Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (auto& e : v) e = rng.uniform(lo, hi);
  return v;
}

// Nonzero entries with magnitude in [lo, hi] and random sign.
Vector random_row(Rng& rng, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (auto& e : v) e = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(lo, hi);
  return v;
}

struct Suite {
  std::string name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  double worst = -INFINITY;  // suite-specific worst-case statistic
};

}  // namespace

json theory_check(std::uint64_t seed, std::size_t trials) {
  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "trials must be positive");
  json violations = json::array();
  std::vector<Suite> suites;

  auto violation = [&](const std::string& check, std::size_t t, double lhs, double rhs) {
    violations.push_back(json{{"check", check}, {"trial", t}, {"lhs", lhs}, {"rhs", rhs}});
  };

  {  // residual bound on random rectangular systems
    Suite s{"residual_bound", trials};
    Rng rng(split_seed(seed, "theory/residual"));
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t m = 2 + rng.below(7);
      const std::size_t n = 1 + rng.below(m);
      const auto A = random_matrix(rng, m, n);
      const auto b = random_vector(rng, m);
      Vector x = least_squares(A, b);
      const double scale = rng.uniform(0.0, 2.0);
      for (auto& e : x) e += scale * rng.uniform(-1.0, 1.0);
      const auto r = residual_bound_check(A, b, x);
      s.worst = std::max(s.worst, r.lhs - r.rhs);
      if (r.holds) ++s.passed; else violation(s.name, t, r.lhs, r.rhs);
    }
    suites.push_back(s);
  }
  {  // normal-equation residual of the least-squares solver
    Suite s{"least_squares_normal_residual", trials};
    Rng rng(split_seed(seed, "theory/normal"));
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t m = 2 + rng.below(7);
      const std::size_t n = 1 + rng.below(m);
      const auto A = random_matrix(rng, m, n);
      const auto b = random_vector(rng, m);
      const auto x = least_squares(A, b);
      const auto atb = A.multiply_transposed(b);
      const auto res = norm2(subtract(A.multiply_transposed(A.multiply(x)), atb));
      const double lim = 1e-8 * norm2(atb);
      s.worst = std::max(s.worst, res - lim);
      if (res <= lim || res == 0.0) ++s.passed; else violation(s.name, t, res, lim);
    }
    suites.push_back(s);
  }
  {  // deviation from the pseudoinverse solution
    Suite s{"deviation_bound", trials};
    Rng rng(split_seed(seed, "theory/deviation"));
    for (std::size_t t = 0; t < trials; ++t) {
      const auto a = random_row(rng, 1 + rng.below(8), 0.1, 10.0);
      const double b = rng.uniform(-100.0, 100.0);
      const auto r = deviation_bound_check(a, b);
      s.worst = std::max(s.worst, r.lhs - r.rhs);
      if (r.holds) ++s.passed; else violation(s.name, t, r.lhs, r.rhs);
    }
    suites.push_back(s);
  }
  {  // a · L == 1
    Suite s{"left_operator_identity", trials};
    Rng rng(split_seed(seed, "theory/identity"));
    for (std::size_t t = 0; t < trials; ++t) {
      const auto a = random_row(rng, 1 + rng.below(50), 1e-3, 1e3);
      const double aL = dot(a, ama_left_operator(a));
      const double err = std::abs(aL - 1.0);
      s.worst = std::max(s.worst, err);
      if (err <= 1e-9) ++s.passed; else violation(s.name, t, aL, 1.0);
    }
    suites.push_back(s);
  }
  {  // Lipschitz ratio against the analytic constant
    Suite s{"stability", trials};
    Rng rng(split_seed(seed, "theory/stability"));
    for (std::size_t t = 0; t < trials; ++t) {
      const auto a = random_row(rng, 1 + rng.below(6), 0.5, 5.0);
      const double b = rng.uniform(-10.0, 10.0);
      const double eta_A = 0.01, eta_b = 0.01;
      const auto probe = stability_probe(DenseMatrix(1, a.size(), a), Vector{b}, eta_A, eta_b, 50,
                                         split_seed(seed, t));
      const double C = stability_constant(a, b, eta_A);
      s.worst = std::max(s.worst, probe.max_ratio - C);
      if (std::isfinite(probe.max_ratio) && probe.max_ratio <= C * (1.0 + 1e-9))
        ++s.passed;
      else
        violation(s.name, t, probe.max_ratio, C);
    }
    suites.push_back(s);
  }
  {  // closed-form α̂ against a 101-point grid
    Suite s{"optimal_alpha_dominance", trials};
    Rng rng(split_seed(seed, "theory/alpha"));
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = 2 + rng.below(30);
      const auto y = random_vector(rng, n);
      const auto u = random_vector(rng, n);
      const auto v = random_vector(rng, n);
      const double ah = optimal_alpha(y, u, v);
      const double r_hat = empirical_risk(y, u, v, ah);
      double r_grid = INFINITY;
      for (int i = 0; i <= 100; ++i) r_grid = std::min(r_grid, empirical_risk(y, u, v, i / 100.0));
      s.worst = std::max(s.worst, r_hat - r_grid);
      if (r_hat <= r_grid + 1e-12) ++s.passed; else violation(s.name, t, r_hat, r_grid);
    }
    suites.push_back(s);
  }

  json out{{"seed", seed}, {"trials", trials}};
  bool all = true;
  json checks = json::object();
  for (const auto& s : suites) {
    checks[s.name] = json{{"trials", s.trials}, {"passed", s.passed}, {"worst_excess", s.worst}};
    all = all && s.passed == s.trials;
  }
  out["checks"] = checks;
  out["violations"] = violations;
  out["all_passed"] = all;
  return out;
}

int cmd_theory_check(std::uint64_t seed, std::size_t trials, const fs::path& out_file,
                     std::ostream& log) {
  try {
    const auto summary = theory_check(seed, trials);
    const auto text = summary.dump(2) + "\n";
    if (out_file.empty())
      log << text;
    else
      write_text(out_file, text);
    for (const auto& [name, c] : summary["checks"].items())
      log << name << ": " << c["passed"].get<std::size_t>() << "/" << c["trials"].get<std::size_t>()
          << '\n';
    if (!summary["all_passed"].get<bool>()) {
      for (const auto& v : summary["violations"]) log << "violation: " << v.dump() << '\n';
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    log << "theory-check: " << e.what() << '\n';
    return 1;
  }
}

// ---------------------------------------------------------------- report

namespace {

const std::vector<std::string> kMetricNames{"mae", "mse", "rmse", "r2", "et_seconds"};

// dataset → algorithm → metric → value
using MetricTable = std::map<std::string, std::map<std::string, std::map<std::string, double>>>;

MetricTable load_published(const fs::path& file, std::vector<std::string>& algorithms) {
  MetricTable t;
  const auto raw = load_csv(file, CsvOptions{});
  const auto col = [&](const std::string& name) { return resolve_column(raw.header, name); };
  const auto ds = col("dataset"), alg = col("algorithm");
  for (const auto& row : raw.cells) {
    if (std::find(algorithms.begin(), algorithms.end(), row[alg]) == algorithms.end())
      algorithms.push_back(row[alg]);
    for (const auto& m : kMetricNames) {
      const auto it = std::find(raw.header.begin(), raw.header.end(), m);
      if (it == raw.header.end()) continue;
      const auto& cell = row[static_cast<std::size_t>(it - raw.header.begin())];
      if (cell.empty()) continue;
      t[row[ds]][row[alg]][m] = std::stod(cell);
    }
  }
  return t;
}

std::string csv_cell(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

}  // namespace

int cmd_report(const ReportOptions& opt, std::ostream& log) {
  try {
    const auto manifest = read_json(opt.input_dir / "manifest.json");
    const auto datasets = manifest.at("datasets").get<std::vector<std::string>>();
    const auto algorithms = manifest.at("algorithms").get<std::vector<std::string>>();

    MetricTable ours;
    for (const auto& d : datasets)
      for (const auto& a : algorithms) {
        const auto f = opt.input_dir / d / (a + ".metrics.json");
        if (!fs::exists(f)) continue;
        const auto j = read_json(f).at("metrics");
        for (const auto& m : kMetricNames) ours[d][a][m] = j.at(m).get<double>();
      }

    MetricTable published;
    std::vector<std::string> published_algs;
    if (!opt.published.empty()) published = load_published(opt.published, published_algs);
    std::vector<std::string> external;
    for (const auto& a : published_algs)
      if (std::find(algorithms.begin(), algorithms.end(), a) == algorithms.end()) external.push_back(a);

    const auto lookup = [](const MetricTable& t, const std::string& d, const std::string& a,
                           const std::string& m) -> std::optional<double> {
      const auto i = t.find(d);
      if (i == t.end()) return std::nullopt;
      const auto j = i->second.find(a);
      if (j == i->second.end()) return std::nullopt;
      const auto k = j->second.find(m);
      if (k == j->second.end()) return std::nullopt;
      return k->second;
    };

    // One table per metric: rows = datasets, columns = algorithms, external
    // (published-only) algorithms appended.
    for (const auto& m : kMetricNames) {
      std::ostringstream ss;
      ss << "dataset";
      for (const auto& a : algorithms) ss << ',' << a;
      for (const auto& a : external) ss << ',' << a << "_published";
      ss << '\n';
      for (const auto& d : datasets) {
        ss << d;
        for (const auto& a : algorithms) ss << ',' << csv_cell(lookup(ours, d, a, m));
        for (const auto& a : external) ss << ',' << csv_cell(lookup(published, d, a, m));
        ss << '\n';
      }
      const std::string name = m == "et_seconds" ? "et" : m;
      write_text(opt.output_dir / (name + "_table.csv"), ss.str());
    }

    // Pairwise permutation table against the baseline algorithm.
    std::vector<std::string> others;
    for (const auto& a : algorithms)
      if (a != opt.baseline) others.push_back(a);
    std::size_t baseline_wins_knn = 0, knn_pairs = 0;
    {
      std::ostringstream ss;
      ss << "dataset";
      for (const auto& a : others)
        ss << ',' << opt.baseline << "_vs_" << a << "_dif_obs," << opt.baseline << "_vs_" << a
           << "_p_value," << opt.baseline << "_vs_" << a << "_n_perms";
      ss << '\n';
      for (const auto& d : datasets) {
        ss << d;
        for (const auto& a : others) {
          try {
            const auto o = compare_predictions(opt.input_dir / d, opt.baseline, a, opt.n_perm,
                                               split_seed(opt.seed, d + "/" + a));
            ss << ',' << fmt_double(o.perm.dif_obs) << ',' << fmt_double(o.perm.p_value) << ','
               << o.perm.n_perms;
          } catch (const Error& e) {
            log << "report: " << d << " " << opt.baseline << " vs " << a << ": " << e.what() << '\n';
            ss << ",,,";
          }
        }
        ss << '\n';
        const auto mb = lookup(ours, d, opt.baseline, "mae");
        const auto mk = lookup(ours, d, "knn", "mae");
        if (mb && mk) {
          ++knn_pairs;
          if (*mb <= *mk) ++baseline_wins_knn;
        }
      }
      write_text(opt.output_dir / "pairwise_table.csv", ss.str());
    }

    json summary{{"datasets", datasets.size()},
                 {"algorithms", algorithms},
                 {"baseline", opt.baseline},
                 {"n_perm", opt.n_perm},
                 {"baseline_mae_le_knn", baseline_wins_knn},
                 {"datasets_with_knn", knn_pairs}};

    if (!opt.published.empty()) {
      std::ostringstream ss;
      ss << "dataset,algorithm,metric,ours,published,abs_diff,rel_diff\n";
      std::size_t cells = 0;
      for (const auto& d : datasets)
        for (const auto& a : algorithms)
          for (const auto& m : kMetricNames) {
            const auto o = lookup(ours, d, a, m);
            const auto p = lookup(published, d, a, m);
            if (!o && !p) continue;
            ss << d << ',' << a << ',' << m << ',' << csv_cell(o) << ',' << csv_cell(p) << ',';
            if (o && p) {
              const double diff = std::abs(*o - *p);
              ss << fmt_double(diff) << ',' << (*p != 0.0 ? fmt_double(diff / std::abs(*p)) : "");
            } else {
              ss << ',';
            }
            ss << '\n';
            ++cells;
          }
      write_text(opt.output_dir / "deviation_report.csv", ss.str());
      summary["deviation_cells"] = cells;
    }
    write_text(opt.output_dir / "summary.json", summary.dump(2) + "\n");
    log << "report: " << datasets.size() << " datasets, " << opt.baseline << " MAE <= knn MAE on "
        << baseline_wins_knn << "/" << knn_pairs << '\n';
    return 0;
  } catch (const Error& e) {
    log << "report: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    log << "report: malformed input: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace amr

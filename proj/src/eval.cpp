#include "amr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "amr/error.hpp"
#include "amr/random.hpp"

namespace amr {

LoocvOutput loocv(const Dataset& dataset, const FitPredict& regressor, unsigned threads) {
  dataset.validate();
  const std::size_t n = dataset.rows();
  LoocvOutput out;
  out.actuals = dataset.y;
  out.predictions.assign(n, 0.0);

  auto fold = [&](std::size_t l) {
    const DenseMatrix X_tr = dataset.X.without_row(l);
    Vector Y_tr;
    Y_tr.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r)
      if (r != l) Y_tr.push_back(dataset.y[r]);
    try {
      out.predictions[l] = regressor(X_tr, Y_tr, dataset.X.row(l));
    } catch (const Error& e) {
      e.rethrow_with_index(l, "fold");
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t l = 0; l < n; ++l) fold(l);
    return out;
  }
  // Errors from workers are reported for the lowest failing fold, so the
  // message does not depend on scheduling.
  std::vector<std::optional<Error>> failures(n);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t l = w; l < n; l += threads) {
          try {
            fold(l);
          } catch (const Error& e) {
            failures[l] = e;
          }
        }
      });
  }
  for (auto& f : failures)
    if (f) throw *f;
  return out;
}

Vector absolute_errors(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw Error(ErrorKind::LengthMismatch, "actual and predicted lengths differ");
  Vector e(actual.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::abs(actual[i] - predicted[i]);
  return e;
}

namespace {

bool at_least_as_extreme(double dif, double obs) noexcept {
  const double a = std::abs(obs);
  return std::abs(dif) >= a - 1e-12 * std::max(1.0, a);
}

}  // namespace

PermTestResult permutation_test(std::span<const double> err_A, std::span<const double> err_B,
                                std::size_t n_perm, std::uint64_t seed, PermutationMode mode) {
  if (err_A.size() != err_B.size())
    throw Error(ErrorKind::LengthMismatch, "paired error vectors differ in length");
  if (err_A.empty()) throw Error(ErrorKind::EmptyVector, "no paired errors");
  const std::size_t n = err_A.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector d(n);
  double obs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = err_A[i] - err_B[i];
    obs += d[i];
  }
  obs *= inv_n;

  PermTestResult r;
  r.dif_obs = obs;
  r.seed = seed;

  const bool exhaustive = mode == PermutationMode::Exhaustive ||
                          (mode == PermutationMode::Auto && n <= kMaxExhaustivePairs);
  if (exhaustive) {
    if (n > 30) throw Error(ErrorKind::InvalidArgument, "too many pairs for exhaustive enumeration");
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1U) ? -d[i] : d[i];
      if (at_least_as_extreme(s * inv_n, obs)) ++count;
    }
    r.exhaustive = true;
    r.n_perms = static_cast<std::size_t>(total);
    r.p_value = static_cast<double>(count) / static_cast<double>(total);
    return r;
  }

  if (n_perm == 0) throw Error(ErrorKind::InvalidArgument, "n_perm must be positive");
  // Counter-based: draw t uses its own stream, so results do not depend on
  // how draws are scheduled.
  const auto base = split_seed(seed, "permutation-test");
  std::uint64_t count = 0;
  for (std::size_t t = 0; t < n_perm; ++t) {
    Rng rng(split_seed(base, static_cast<std::uint64_t>(t)));
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next();
      s += (bits & 1U) ? -d[i] : d[i];
      bits >>= 1;
    }
    if (at_least_as_extreme(s * inv_n, obs)) ++count;
  }
  r.exhaustive = false;
  r.n_perms = n_perm;
  r.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + n_perm);
  return r;
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::ABetter: return "A_better";
    case Decision::BBetter: return "B_better";
    case Decision::Similar: return "similar";
  }
  return "similar";
}

Verdict decision_rule(const MetricSet& report_A, const MetricSet& report_B,
                      const PermTestResult& perm, double p_threshold) {
  Verdict v;
  v.significant = perm.p_value < p_threshold;
  if (v.significant && perm.dif_obs < 0.0)
    v.decision = Decision::ABetter;
  else if (v.significant && perm.dif_obs > 0.0)
    v.decision = Decision::BBetter;
  else
    v.decision = Decision::Similar;

  if (v.decision == Decision::Similar && report_A.et != report_B.et)
    v.et_preference = report_A.et < report_B.et ? Side::A : Side::B;

  // Sign convention: negative means A looks better.
  const double mae_sign = perm.dif_obs;
  auto agrees = [&](double metric_diff) {
    if (mae_sign == 0.0 || metric_diff == 0.0) return true;
    return (mae_sign < 0.0) == (metric_diff < 0.0);
  };
  v.mse_agrees = agrees(report_A.mse - report_B.mse);
  v.rmse_agrees = agrees(report_A.rmse - report_B.rmse);
  v.r2_agrees = agrees(report_B.r2 - report_A.r2);
  return v;
}

}  // namespace amr

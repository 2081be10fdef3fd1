#pragma once

// LOOCV driver, paired permutation test on absolute errors, and the
// MAE-first decision rule for comparing two regressors.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "amr/dataset.hpp"
#include "amr/matrix.hpp"
#include "amr/metrics.hpp"

namespace amr {

// Train on (X_tr, Y_tr), predict x_te. Must not keep state between calls.
using FitPredict = std::function<double(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                                        std::span<const double> x_te)>;

struct LoocvOutput {
  Vector actuals;
  Vector predictions;
};

/// Fold l trains on every row but l. Regressor errors are re-raised with the
/// fold index attached.
LoocvOutput loocv(const Dataset& dataset, const FitPredict& regressor, unsigned threads = 1);

Vector absolute_errors(std::span<const double> actual, std::span<const double> predicted);

enum class PermutationMode { Auto, Exhaustive, MonteCarlo };

inline constexpr std::size_t kDefaultPermutations = 5000;
inline constexpr std::size_t kMaxExhaustivePairs = 20;

struct PermTestResult {
  double dif_obs = 0.0;  // mean(err_A) − mean(err_B)
  double p_value = 1.0;
  std::size_t n_perms = 0;
  bool exhaustive = false;
  std::uint64_t seed = 0;
};

/// Two-tailed paired test: each pair is swapped independently under the
/// null. Auto enumerates all 2^n assignments when n ≤ 20, otherwise draws
/// `n_perm` Monte Carlo assignments with add-one smoothing.
PermTestResult permutation_test(std::span<const double> err_A, std::span<const double> err_B,
                                std::size_t n_perm, std::uint64_t seed,
                                PermutationMode mode = PermutationMode::Auto);

enum class Decision { ABetter, BBetter, Similar };
enum class Side { A, B };

std::string to_string(Decision d);

struct Verdict {
  Decision decision = Decision::Similar;
  bool significant = false;
  std::optional<Side> et_preference;
  // Supporting metrics: does each one point the same way as the MAE sign?
  // Informational only; they never change `decision`.
  bool mse_agrees = true;
  bool rmse_agrees = true;
  bool r2_agrees = true;
};

Verdict decision_rule(const MetricSet& report_A, const MetricSet& report_B,
                      const PermTestResult& perm, double p_threshold = 0.05);

}  // namespace amr

#pragma once

// Reference regressors: k-NN, ordinary least squares with intercept, and a
// CART regression tree.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "amr/dataset.hpp"
#include "amr/matrix.hpp"

namespace amr {

enum class DistanceMetric { Euclidean, Manhattan };

struct KnnConfig {
  std::size_t k = 1;
  DistanceMetric metric = DistanceMetric::Euclidean;
};

/// Mean regressand of the k nearest rows; equal distances go to the lower
/// row index.
double knn_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                   std::span<const double> x_te, const KnnConfig& config);

struct KnnSelection {
  std::size_t k = 1;
  Vector predictions;  // LOOCV predictions at the selected k
  Vector mae_by_k;     // index k−1
};

/// Picks k ∈ {1, …, min(k_max, n−1)} minimising LOOCV MAE, ties to the
/// smaller k.
KnnSelection knn_select_k(const Dataset& d, std::size_t k_max = 25,
                          DistanceMetric metric = DistanceMetric::Euclidean);

/// ŷ = [1, x_te]·x_LS.
double linreg_fit_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                          std::span<const double> x_te);

/// Intercept first, then one weight per regressor.
Vector linreg_fit(const DenseMatrix& X_tr, std::span<const double> Y_tr);

struct TreeConfig {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 2;
};

class RegressionTree {
 public:
  static RegressionTree fit(const DenseMatrix& X, std::span<const double> Y,
                            const TreeConfig& config);

  double predict(std::span<const double> x) const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t depth() const noexcept;

 private:
  struct Node {
    double value = 0.0;  // mean regressand at the node
    std::size_t feature = 0;
    double threshold = 0.0;
    int left = -1;  // -1 marks a leaf
    int right = -1;
  };
  std::vector<Node> nodes_;
  std::size_t cols_ = 0;

  int grow(const DenseMatrix& X, std::span<const double> Y,
           std::vector<std::size_t>& rows, std::size_t depth, const TreeConfig& cfg);
};

double dtree_fit_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                         std::span<const double> x_te, const TreeConfig& config);

}  // namespace amr

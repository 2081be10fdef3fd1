#pragma once

// Hybrid regressor: per-instance arithmetic-method models are evaluated on the
// neighbours admitted by the δ rule, then blended with the neighbours' mean
// regressand through α.

#include <cstddef>
#include <span>
#include <vector>

#include "amr/dataset.hpp"
#include "amr/matrix.hpp"

namespace amr {

// Immutable after construction; safe to share across threads.
class AmrModel {
 public:
  AmrModel(DenseMatrix coefficients, DenseMatrix regressors, Vector regressands);

  const DenseMatrix& coefficients() const noexcept { return A_; }
  const DenseMatrix& regressors() const noexcept { return X_; }
  const Vector& regressands() const noexcept { return Y_; }

  std::size_t size() const noexcept { return Y_.size(); }
  std::size_t cols() const noexcept { return X_.cols(); }

 private:
  DenseMatrix A_;
  DenseMatrix X_;
  Vector Y_;
};

/// One coefficient row per training instance. Throws DegenerateInstance
/// tagged with the row index when a row cannot be decomposed.
AmrModel build_model(const DenseMatrix& X_tr, std::span<const double> Y_tr);

struct HyperParams {
  double alpha = 1.0;
  double beta = 0.0;
  double delta = 1.0;

  /// β is derived as 1 − α. Throws InvalidArgument outside α ∈ (0,1],
  /// δ ∈ [1,10].
  static HyperParams make(double alpha, double delta);
};

// Mean averages the per-neighbour terms by k; LiteralSum keeps raw sums.
enum class Aggregation { Mean, LiteralSum };

double manhattan_distance(std::span<const double> u, std::span<const double> v);

struct NeighborSet {
  std::vector<std::size_t> indices;  // ascending
  double dist_min = 0.0;
};

/// All stored rows with distance ≤ δ·dist_min.
NeighborSet select_neighbors(const AmrModel& model, std::span<const double> x_te,
                             double delta);

struct PredictionTrace {
  double y_hat = 0.0;
  double y_hat_ama = 0.0;
  double y_hat_knn = 0.0;
  std::size_t k = 0;
  double dist_min = 0.0;
};

PredictionTrace predict(const AmrModel& model, std::span<const double> x_te,
                        const HyperParams& params,
                        Aggregation aggregation = Aggregation::Mean);

struct GridSearchResult {
  double mae_op = 0.0;
  double mse_op = 0.0;
  double rmse_op = 0.0;
  double r2_op = 0.0;
  double alpha_op = 0.0;
  double beta_op = 0.0;
  double delta_op = 0.0;
  std::size_t k_op = 0;         // rounded mean neighbour count at the optimum
  std::size_t k_last_fold = 0;  // neighbour count of the final fold
  double et = 0.0;              // seconds
};

struct GridPoint {
  double alpha = 0.0;
  double delta = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
};

struct GridSearchRun {
  GridSearchResult result;
  Vector predictions;               // LOOCV predictions at the optimum, row order
  std::vector<std::size_t> fold_k;  // neighbour count per fold at the optimum
  std::vector<GridPoint> surface;   // every evaluated point, scan order
};

struct GridOptions {
  Aggregation aggregation = Aggregation::Mean;
  unsigned threads = 1;
};

/// 0.1, 0.2, …, 1.0
std::vector<double> default_alpha_grid();
/// 1.0, 1.1, …, 10.0
std::vector<double> default_delta_grid();

/// Full LOOCV for every (δ, α) pair, δ-major and α-minor in ascending order.
/// The optimum is replaced whenever MAE ≤ the best so far, so ties go to the
/// later point in the scan.
GridSearchRun grid_search_loocv(const Dataset& dataset,
                                std::span<const double> alpha_grid,
                                std::span<const double> delta_grid,
                                const GridOptions& options = {});

}  // namespace amr

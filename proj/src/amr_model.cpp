#include "amr/amr_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "amr/ama.hpp"
#include "amr/error.hpp"
#include "amr/metrics.hpp"

namespace amr {

AmrModel::AmrModel(DenseMatrix coefficients, DenseMatrix regressors, Vector regressands)
    : A_(std::move(coefficients)), X_(std::move(regressors)), Y_(std::move(regressands)) {
  if (A_.rows() != X_.rows() || X_.rows() != Y_.size() || A_.cols() != X_.cols())
    throw Error(ErrorKind::LengthMismatch, "model matrices have inconsistent shapes");
}

AmrModel build_model(const DenseMatrix& X_tr, std::span<const double> Y_tr) {
  if (X_tr.rows() != Y_tr.size())
    throw Error(ErrorKind::LengthMismatch, "training regressors and regressands differ in length");
  DenseMatrix A(X_tr.rows(), X_tr.cols());
  for (std::size_t q = 0; q < X_tr.rows(); ++q) {
    try {
      const auto d = fit_instance(X_tr.row(q), Y_tr[q]);
      std::copy(d.a.begin(), d.a.end(), A.row(q).begin());
    } catch (const Error& e) {
      e.rethrow_with_index(q, "training row");
    }
  }
  return AmrModel(std::move(A), X_tr, Vector(Y_tr.begin(), Y_tr.end()));
}

HyperParams HyperParams::make(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(delta >= 1.0 && delta <= 10.0))
    throw Error(ErrorKind::InvalidArgument, "delta must lie in [1, 10]");
  return HyperParams{alpha, 1.0 - alpha, delta};
}

double manhattan_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::LengthMismatch, "distance between unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
  return s;
}

NeighborSet select_neighbors(const AmrModel& model, std::span<const double> x_te,
                             double delta) {
  if (model.size() == 0) throw Error(ErrorKind::EmptyModel, "model has no stored rows");
  if (x_te.size() != model.cols())
    throw Error(ErrorKind::LengthMismatch, "test vector length differs from model columns");
  if (!(delta >= 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must be at least 1");

  Vector dist(model.size());
  NeighborSet out;
  out.dist_min = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < model.size(); ++q) {
    dist[q] = manhattan_distance(x_te, model.regressors().row(q));
    out.dist_min = std::min(out.dist_min, dist[q]);
  }
  const double threshold = delta * out.dist_min;
  for (std::size_t q = 0; q < model.size(); ++q)
    if (dist[q] <= threshold) out.indices.push_back(q);
  return out;
}

PredictionTrace predict(const AmrModel& model, std::span<const double> x_te,
                        const HyperParams& params, Aggregation aggregation) {
  const auto nb = select_neighbors(model, x_te, params.delta);
  double sum_ama = 0.0;
  double sum_knn = 0.0;
  for (std::size_t q : nb.indices) {
    sum_ama += reconstruct(model.coefficients().row(q), x_te);
    sum_knn += model.regressands()[q];
  }
  PredictionTrace t;
  t.k = nb.indices.size();
  t.dist_min = nb.dist_min;
  if (aggregation == Aggregation::Mean) {
    t.y_hat_ama = sum_ama / static_cast<double>(t.k);
    t.y_hat_knn = sum_knn / static_cast<double>(t.k);
  } else {
    t.y_hat_ama = sum_ama;
    t.y_hat_knn = sum_knn;
  }
  t.y_hat = params.alpha * t.y_hat_ama + params.beta * t.y_hat_knn;
  return t;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int i = 10; i <= 100; ++i) g.push_back(i / 10.0);
  return g;
}

namespace {

std::vector<double> checked_sorted(std::span<const double> grid, double lo, bool lo_open,
                                   double hi, const char* name) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, std::string(name) + " grid is empty");
  std::vector<double> g(grid.begin(), grid.end());
  for (double v : g) {
    const bool lo_ok = lo_open ? v > lo : v >= lo;
    if (!lo_ok || !(v <= hi))
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " grid value out of range");
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// Everything about a LOOCV pass that does not depend on (α, δ): the fold-l
// model is the full model with row l removed, so coefficients, distances and
// per-neighbour AMA terms are computed once and shared by all grid points.
struct FoldCache {
  std::size_t n = 0;
  Vector dist;      // n×n, dist[l*n + q] = |x_l − x_q|₁
  Vector ama;       // n×n, ama[l*n + q] = a_q · x_l
  Vector dist_min;  // per fold, over q ≠ l
};

FoldCache build_cache(const Dataset& d) {
  const std::size_t n = d.rows();
  FoldCache c;
  c.n = n;
  DenseMatrix A(n, d.cols());
  for (std::size_t q = 0; q < n; ++q) {
    try {
      const auto dec = fit_instance(d.X.row(q), d.y[q]);
      std::copy(dec.a.begin(), dec.a.end(), A.row(q).begin());
    } catch (const Error& e) {
      // The first fold that trains on row q is fold 0, or fold 1 when q == 0.
      e.rethrow_with_index(q == 0 ? 1 : 0, "fold");
    }
  }
  c.dist.assign(n * n, 0.0);
  c.ama.assign(n * n, 0.0);
  c.dist_min.assign(n, std::numeric_limits<double>::infinity());
  for (std::size_t l = 0; l < n; ++l) {
    const auto xl = d.X.row(l);
    for (std::size_t q = 0; q < n; ++q) {
      if (q == l) continue;
      const double dq = manhattan_distance(xl, d.X.row(q));
      c.dist[l * n + q] = dq;
      c.ama[l * n + q] = reconstruct(A.row(q), xl);
      c.dist_min[l] = std::min(c.dist_min[l], dq);
    }
  }
  return c;
}

struct DeltaSlice {
  std::vector<GridPoint> points;                  // one per α
  std::vector<Vector> predictions;                // per α
  std::vector<std::size_t> fold_k;                // independent of α
};

DeltaSlice evaluate_delta(const Dataset& d, const FoldCache& c, double delta,
                          std::span<const double> alphas, Aggregation agg) {
  const std::size_t n = c.n;
  Vector ama_term(n), knn_term(n);
  DeltaSlice s;
  s.fold_k.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double threshold = delta * c.dist_min[l];
    double sum_ama = 0.0, sum_knn = 0.0;
    std::size_t k = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == l || c.dist[l * n + q] > threshold) continue;
      sum_ama += c.ama[l * n + q];
      sum_knn += d.y[q];
      ++k;
    }
    s.fold_k[l] = k;
    if (agg == Aggregation::Mean) {
      ama_term[l] = sum_ama / static_cast<double>(k);
      knn_term[l] = sum_knn / static_cast<double>(k);
    } else {
      ama_term[l] = sum_ama;
      knn_term[l] = sum_knn;
    }
  }
  Vector pred(n);
  for (double alpha : alphas) {
    const auto hp = HyperParams::make(alpha, delta);
    for (std::size_t l = 0; l < n; ++l)
      pred[l] = hp.alpha * ama_term[l] + hp.beta * knn_term[l];
    const auto m = compute_metrics(d.y, pred);
    s.points.push_back(GridPoint{alpha, delta, m.mae, m.mse, m.rmse, m.r2});
    s.predictions.push_back(pred);
  }
  return s;
}

}  // namespace

GridSearchRun grid_search_loocv(const Dataset& dataset, std::span<const double> alpha_grid,
                                std::span<const double> delta_grid,
                                const GridOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  dataset.validate();
  const auto alphas = checked_sorted(alpha_grid, 0.0, true, 1.0, "alpha");
  const auto deltas = checked_sorted(delta_grid, 1.0, false, 10.0, "delta");

  const FoldCache cache = build_cache(dataset);

  std::vector<DeltaSlice> slices(deltas.size());
  const unsigned threads = std::max(
      1u, std::min<unsigned>(options.threads, static_cast<unsigned>(deltas.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < deltas.size(); ++i)
      slices[i] = evaluate_delta(dataset, cache, deltas[i], alphas, options.aggregation);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < deltas.size(); i += threads)
          slices[i] = evaluate_delta(dataset, cache, deltas[i], alphas, options.aggregation);
      });
  }

  // Sequential scan reproduces the "update when MAE ≤ best" rule exactly.
  GridSearchRun run;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_d = 0, best_a = 0;
  bool found = false;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    for (std::size_t j = 0; j < slices[i].points.size(); ++j) {
      const auto& p = slices[i].points[j];
      run.surface.push_back(p);
      if (p.mae <= best) {
        best = p.mae;
        best_d = i;
        best_a = j;
        found = true;
      }
    }
  }
  if (!found) throw Error(ErrorKind::NonConvergence, "no grid point produced a finite MAE");

  const auto& p = slices[best_d].points[best_a];
  auto& r = run.result;
  r.mae_op = p.mae;
  r.mse_op = p.mse;
  r.rmse_op = p.rmse;
  r.r2_op = p.r2;
  r.alpha_op = p.alpha;
  r.beta_op = 1.0 - p.alpha;
  r.delta_op = p.delta;
  run.fold_k = slices[best_d].fold_k;
  run.predictions = slices[best_d].predictions[best_a];
  double ksum = 0.0;
  for (auto k : run.fold_k) ksum += static_cast<double>(k);
  r.k_op = static_cast<std::size_t>(std::llround(ksum / static_cast<double>(run.fold_k.size())));
  r.k_last_fold = run.fold_k.back();
  r.et = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

}  // namespace amr

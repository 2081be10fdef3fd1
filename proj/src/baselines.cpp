#include "amr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amr/amr_model.hpp"
#include "amr/error.hpp"
#include "amr/linalg.hpp"
#include "amr/metrics.hpp"

namespace amr {

namespace {

double distance(std::span<const double> u, std::span<const double> v, DistanceMetric m) {
  if (m == DistanceMetric::Manhattan) return manhattan_distance(u, v);
  if (u.size() != v.size()) throw Error(ErrorKind::LengthMismatch, "distance between unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Row indices ordered by distance to x, stable so ties keep index order.
std::vector<std::size_t> ranked_rows(const DenseMatrix& X, std::span<const double> x,
                                     DistanceMetric m, std::size_t skip) {
  std::vector<double> d(X.rows());
  std::vector<std::size_t> idx;
  idx.reserve(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    if (r == skip) continue;
    d[r] = distance(x, X.row(r), m);
    idx.push_back(r);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  return idx;
}

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

}  // namespace

double knn_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                   std::span<const double> x_te, const KnnConfig& config) {
  if (config.k == 0) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (X_tr.rows() != Y_tr.size())
    throw Error(ErrorKind::LengthMismatch, "training regressors and regressands differ in length");
  if (X_tr.rows() < config.k)
    throw Error(ErrorKind::InsufficientData, "fewer training rows than k");
  const auto idx = ranked_rows(X_tr, x_te, config.metric, kNoSkip);
  double s = 0.0;
  for (std::size_t i = 0; i < config.k; ++i) s += Y_tr[idx[i]];
  return s / static_cast<double>(config.k);
}

KnnSelection knn_select_k(const Dataset& d, std::size_t k_max, DistanceMetric metric) {
  d.validate();
  const std::size_t n = d.rows();
  const std::size_t kk = std::min(k_max, n - 1);
  if (kk == 0) throw Error(ErrorKind::InsufficientData, "k-NN selection needs k_max ≥ 1");

  // preds[k−1][l]: mean of the k nearest neighbours of row l excluding itself.
  std::vector<Vector> preds(kk, Vector(n));
  for (std::size_t l = 0; l < n; ++l) {
    const auto idx = ranked_rows(d.X, d.X.row(l), metric, l);
    double s = 0.0;
    for (std::size_t k = 1; k <= kk; ++k) {
      s += d.y[idx[k - 1]];
      preds[k - 1][l] = s / static_cast<double>(k);
    }
  }
  KnnSelection out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= kk; ++k) {
    const double m = mae(d.y, preds[k - 1]);
    out.mae_by_k.push_back(m);
    if (m < best) {
      best = m;
      out.k = k;
    }
  }
  out.predictions = preds[out.k - 1];
  return out;
}

Vector linreg_fit(const DenseMatrix& X_tr, std::span<const double> Y_tr) {
  if (X_tr.rows() != Y_tr.size())
    throw Error(ErrorKind::LengthMismatch, "training regressors and regressands differ in length");
  DenseMatrix design(X_tr.rows(), X_tr.cols() + 1);
  for (std::size_t r = 0; r < X_tr.rows(); ++r) {
    design(r, 0) = 1.0;
    const auto row = X_tr.row(r);
    std::copy(row.begin(), row.end(), design.row(r).begin() + 1);
  }
  return least_squares(design, Y_tr);
}

double linreg_fit_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                          std::span<const double> x_te) {
  if (x_te.size() != X_tr.cols())
    throw Error(ErrorKind::LengthMismatch, "test vector length differs from training columns");
  const Vector w = linreg_fit(X_tr, Y_tr);
  double y = w[0];
  for (std::size_t j = 0; j < x_te.size(); ++j) y += w[j + 1] * x_te[j];
  return y;
}

RegressionTree RegressionTree::fit(const DenseMatrix& X, std::span<const double> Y,
                                   const TreeConfig& config) {
  if (config.min_leaf == 0) throw Error(ErrorKind::InvalidArgument, "min_leaf must be positive");
  if (X.rows() != Y.size())
    throw Error(ErrorKind::LengthMismatch, "training regressors and regressands differ in length");
  if (X.rows() == 0 || X.rows() < config.min_leaf)
    throw Error(ErrorKind::InsufficientData, "fewer training rows than min_leaf");
  RegressionTree t;
  t.cols_ = X.cols();
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), 0);
  t.grow(X, Y, rows, 0, config);
  return t;
}

int RegressionTree::grow(const DenseMatrix& X, std::span<const double> Y,
                         std::vector<std::size_t>& rows, std::size_t depth,
                         const TreeConfig& cfg) {
  const auto id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});

  const double cnt = static_cast<double>(rows.size());
  double mean = 0.0;
  for (auto r : rows) mean += Y[r];
  mean /= cnt;
  double sse = 0.0;
  for (auto r : rows) sse += (Y[r] - mean) * (Y[r] - mean);
  nodes_[id].value = mean;

  if (depth >= cfg.max_depth || rows.size() < 2 * cfg.min_leaf || sse == 0.0) return id;

  // Minimise left SSE + right SSE; sums are taken around the node mean to
  // keep the one-pass formula well conditioned.
  double best_cost = sse - 1e-12 * std::max(1.0, sse);
  bool have = false;
  std::size_t best_f = 0;
  double best_thr = 0.0;
  std::vector<std::size_t> order(rows);
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
    double ls = 0.0, lss = 0.0;
    double ts = 0.0, tss = 0.0;
    for (auto r : order) {
      const double c = Y[r] - mean;
      ts += c;
      tss += c * c;
    }
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const double c = Y[order[i]] - mean;
      ls += c;
      lss += c * c;
      const std::size_t nl = i + 1, nr = order.size() - nl;
      const double xv = X(order[i], f), xn = X(order[i + 1], f);
      if (xv == xn || nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
      const double rs = ts - ls, rss = tss - lss;
      const double cost = (lss - ls * ls / static_cast<double>(nl)) +
                          (rss - rs * rs / static_cast<double>(nr));
      if (cost < best_cost) {
        best_cost = cost;
        best_f = f;
        best_thr = 0.5 * (xv + xn);
        have = true;
      }
    }
  }
  if (!have) return id;

  std::vector<std::size_t> left, right;
  for (auto r : rows) (X(r, best_f) <= best_thr ? left : right).push_back(r);
  nodes_[id].feature = best_f;
  nodes_[id].threshold = best_thr;
  const int l = grow(X, Y, left, depth + 1, cfg);
  const int r = grow(X, Y, right, depth + 1, cfg);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double RegressionTree::predict(std::span<const double> x) const {
  if (x.size() != cols_)
    throw Error(ErrorKind::LengthMismatch, "test vector length differs from training columns");
  int id = 0;
  while (nodes_[id].left >= 0)
    id = x[nodes_[id].feature] <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
  return nodes_[id].value;
}

std::size_t RegressionTree::depth() const noexcept {
  // Nodes are stored in pre-order; walk with an explicit stack.
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[id].left >= 0) {
      stack.push_back({nodes_[id].left, d + 1});
      stack.push_back({nodes_[id].right, d + 1});
    }
  }
  return best;
}

double dtree_fit_predict(const DenseMatrix& X_tr, std::span<const double> Y_tr,
                         std::span<const double> x_te, const TreeConfig& config) {
  return RegressionTree::fit(X_tr, Y_tr, config).predict(x_te);
}

}  // namespace amr

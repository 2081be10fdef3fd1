#include "amr/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "amr/ama.hpp"
#include "amr/error.hpp"
#include "amr/random.hpp"

namespace amr {

Vector least_squares(const DenseMatrix& A, std::span<const double> b) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (m == 0 || n == 0) throw Error(ErrorKind::EmptyVector, "empty design matrix");
  if (b.size() != m) throw Error(ErrorKind::LengthMismatch, "rhs length differs from row count");
  if (m < n) throw Error(ErrorKind::RankDeficient, "fewer rows than columns");

  // Columns are equilibrated to unit norm first so the relative pivot test
  // does not depend on feature units: solve for z = D⁻¹x with A·D.
  Vector scale(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    Vector col(m);
    for (std::size_t r = 0; r < m; ++r) col[r] = A(r, c);
    const double nc = norm2(col);
    if (nc == 0.0)
      throw Error(ErrorKind::RankDeficient, "design matrix has an all-zero column", c);
    scale[c] = 1.0 / nc;
  }

  // Augmented normal system [AᵀA | Aᵀb] in scaled coordinates.
  DenseMatrix N(n, n + 1);
  for (std::size_t r = 0; r < m; ++r) {
    const auto row = A.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = row[i] * scale[i];
      for (std::size_t j = i; j < n; ++j) N(i, j) += ri * row[j] * scale[j];
      N(i, n) += ri * b[r];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) N(i, j) = N(j, i);

  std::vector<double> pivots;
  pivots.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(N(r, k)) > std::abs(N(best, k))) best = r;
    if (best != k)
      for (std::size_t c = k; c <= n; ++c) std::swap(N(k, c), N(best, c));
    const double piv = N(k, k);
    pivots.push_back(std::abs(piv));
    const double largest = *std::max_element(pivots.begin(), pivots.end());
    if (piv == 0.0 || std::abs(piv) < kRankPivotTolerance * largest)
      throw Error(ErrorKind::RankDeficient, "design matrix is not of full column rank",
                  k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = N(r, k) / piv;
      if (f == 0.0) continue;
      for (std::size_t c = k; c <= n; ++c) N(r, c) -= f * N(k, c);
    }
  }

  Vector x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = N(k, n);
    for (std::size_t c = k + 1; c < n; ++c) s -= N(k, c) * x[c];
    x[k] = s / N(k, k);
  }
  for (std::size_t c = 0; c < n; ++c) x[c] *= scale[c];
  return x;
}

double spectral_norm(const DenseMatrix& A, std::size_t max_iter) {
  if (!A.all_finite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  const std::size_t n = A.cols();
  if (n == 0 || A.rows() == 0) return 0.0;

  Rng rng(split_seed(0x5eed, "spectral-norm"));
  Vector v(n);
  for (auto& e : v) e = rng.uniform(0.5, 1.5);
  double nv = norm2(v);
  for (auto& e : v) e /= nv;

  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector w = A.multiply_transposed(A.multiply(v));
    const double next = dot(v, w);  // Rayleigh quotient of AᵀA
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(next - lambda) <= 1e-15 * std::abs(next)) {
      // One more Rayleigh quotient at the normalised iterate.
      const double rq = dot(v, A.multiply_transposed(A.multiply(v)));
      return std::sqrt(std::max(rq, next));
    }
    lambda = next;
  }
  throw Error(ErrorKind::NonConvergence, "power iteration did not converge");
}

Vector ama_left_operator(std::span<const double> a_row) {
  // L·b = solve_row(a, b), and the map is linear in b, so L = solve_row(a, 1).
  return solve_row(a_row, 1.0);
}

Vector row_pseudoinverse(std::span<const double> a_row) {
  if (a_row.empty()) throw Error(ErrorKind::EmptyVector, "empty row");
  const double ss = dot(a_row, a_row);
  if (ss == 0.0) throw Error(ErrorKind::DegenerateInstance, "all-zero row has no pseudoinverse");
  Vector p(a_row.begin(), a_row.end());
  for (auto& e : p) e /= ss;
  return p;
}

BoundReport make_bound_report(double lhs, double rhs) noexcept {
  BoundReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = lhs <= rhs + 1e-9 * std::max(1.0, rhs);
  return r;
}

BoundReport residual_bound_check(const DenseMatrix& A, std::span<const double> b,
                                 std::span<const double> x_cand) {
  if (x_cand.size() != A.cols())
    throw Error(ErrorKind::LengthMismatch, "candidate length differs from column count");
  const Vector x_ls = least_squares(A, b);
  const double lhs = norm2(subtract(A.multiply(x_cand), b));
  const double rhs = spectral_norm(A) * norm2(subtract(x_cand, x_ls)) +
                     norm2(subtract(A.multiply(x_ls), b));
  return make_bound_report(lhs, rhs);
}

BoundReport deviation_bound_check(std::span<const double> a_row, double b) {
  const Vector x_ama = solve_row(a_row, b);
  const Vector pinv = row_pseudoinverse(a_row);
  Vector x_mp(pinv);
  for (auto& e : x_mp) e *= b;
  const Vector L = ama_left_operator(a_row);
  // L − A⁺ is n×1, so its spectral norm is the Euclidean norm of the column.
  const double op = norm2(subtract(L, pinv));
  return make_bound_report(norm2(subtract(x_ama, x_mp)), op * std::abs(b));
}

namespace {

// Random vector scaled to have Euclidean norm exactly `target`.
Vector random_direction(Rng& rng, std::size_t n, double target) {
  Vector d(n);
  double nd = 0.0;
  do {
    for (auto& e : d) e = rng.normal();
    nd = norm2(d);
  } while (nd == 0.0);
  for (auto& e : d) e *= target / nd;
  return d;
}

}  // namespace

StabilityProbe stability_probe(const DenseMatrix& A, std::span<const double> b,
                               double eta_A, double eta_b, std::size_t trials,
                               std::uint64_t seed) {
  if (A.rows() != 1)
    throw Error(ErrorKind::InvalidArgument, "stability probe takes a single-equation system");
  if (b.size() != 1) throw Error(ErrorKind::LengthMismatch, "rhs must have one entry");
  if (eta_A < 0.0 || eta_b < 0.0 || !(eta_A + eta_b > 0.0))
    throw Error(ErrorKind::InvalidArgument, "perturbation budget must be positive");
  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "trials must be positive");

  const auto a = A.row(0);
  const Vector base = solve_row(a, b[0]);
  StabilityProbe out;
  out.operator_norm = norm2(ama_left_operator(a));
  out.trials = trials;

  Rng rng(split_seed(seed, "stability-probe"));
  for (std::size_t t = 0; t < trials; ++t) {
    // For a 1×n matrix the spectral norm equals the row's Euclidean norm.
    Vector da = eta_A > 0.0 ? random_direction(rng, a.size(), eta_A * (1.0 - rng.uniform()))
                            : Vector(a.size(), 0.0);
    const double db = eta_b > 0.0 ? (rng.uniform() < 0.5 ? -1.0 : 1.0) * eta_b *
                                        (1.0 - rng.uniform())
                                  : 0.0;
    Vector pa(a.begin(), a.end());
    for (std::size_t j = 0; j < pa.size(); ++j) pa[j] += da[j];
    Vector px;
    try {
      px = solve_row(pa, b[0] + db);
    } catch (const Error& e) {
      e.rethrow_with_index(t, "trial");
    }
    out.max_ratio = std::max(out.max_ratio, norm2(subtract(px, base)) / (eta_A + eta_b));
  }
  return out;
}

double stability_constant(std::span<const double> a_row, double b, double eta_A) {
  if (a_row.empty()) throw Error(ErrorKind::EmptyVector, "empty row");
  const auto p = static_cast<double>(a_row.size());
  double op = 0.0;
  double deriv = 0.0;
  for (double a : a_row) {
    const double lo = std::abs(a) - eta_A;
    if (a == 0.0 || !(lo > 0.0)) return INFINITY;
    op += 1.0 / (p * lo * p * lo);
    deriv = std::max(deriv, 1.0 / (std::abs(a) * lo));
  }
  // |1/(a+d) − 1/a| = |d| / (|a|·|a+d|) ≤ |d| / (|a|·(|a| − η_A)).
  return std::sqrt(op) + std::abs(b) / p * deriv;
}

double optimal_alpha(std::span<const double> y, std::span<const double> u,
                     std::span<const double> v) {
  if (y.size() != u.size() || y.size() != v.size())
    throw Error(ErrorKind::LengthMismatch, "y, u, v must have equal lengths");
  if (y.empty()) throw Error(ErrorKind::EmptyVector, "no samples");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = u[i] - v[i];
    num += (y[i] - v[i]) * d;
    den += d * d;
  }
  if (den == 0.0)
    throw Error(ErrorKind::IdenticalPredictors, "u and v coincide; every blend is equivalent");
  return num / den;
}

double empirical_risk(std::span<const double> y, std::span<const double> u,
                      std::span<const double> v, double alpha) {
  if (y.size() != u.size() || y.size() != v.size())
    throw Error(ErrorKind::LengthMismatch, "y, u, v must have equal lengths");
  if (y.empty()) throw Error(ErrorKind::EmptyVector, "no samples");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = alpha * u[i] + (1.0 - alpha) * v[i] - y[i];
    s += e * e;
  }
  return s / static_cast<double>(y.size());
}

}  // namespace amr

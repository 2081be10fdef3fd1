#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "amr/error.hpp"
#include "amr/linalg.hpp"
#include "amr/random.hpp"

using namespace amr;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
  DenseMatrix A(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) A(r, c) = rng.uniform(-1.0, 1.0);
  return A;
}

Vector random_vector(Rng& rng, std::size_t n) {
  Vector v(n);
  for (auto& e : v) e = rng.uniform(-1.0, 1.0);
  return v;
}

// Pseudoinverse solution through a full SVD, independent of the normal equations.
Vector svd_oracle(const DenseMatrix& A, const Vector& b) {
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r)
    for (std::size_t c = 0; c < A.cols(); ++c) M(r, c) = A(r, c);
  Eigen::VectorXd rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd x = svd.solve(rhs);
  return Vector(x.data(), x.data() + x.size());
}

}  // namespace

TEST_CASE("least_squares examples") {
  auto x = least_squares(DenseMatrix{{1}, {2}}, Vector{2, 4});
  REQUIRE(x.size() == 1);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));
  x = least_squares(DenseMatrix::identity(3), Vector{1, 2, 3});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
  CHECK(x[2] == doctest::Approx(3.0));
  x = least_squares(DenseMatrix{{1}, {1}}, Vector{0, 2});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("least_squares errors") {
  try {
    least_squares(DenseMatrix{{1, 2}, {2, 4}, {3, 6}}, Vector{1, 2, 3});
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
  CHECK_THROWS_AS(least_squares(DenseMatrix{{1, 0}, {0, 0}}, Vector{1, 1}), Error);
  CHECK_THROWS_AS(least_squares(DenseMatrix{{1}, {2}}, Vector{1}), Error);
}

TEST_CASE("least_squares agrees with the SVD pseudoinverse") {
  Rng rng(split_seed(11, "ls-oracle"));
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + rng.below(10);
    const std::size_t n = 1 + rng.below(m);
    const auto A = random_matrix(rng, m, n);
    const auto b = random_vector(rng, m);
    const auto x = least_squares(A, b);
    const auto o = svd_oracle(A, b);
    CHECK(norm2(subtract(x, o)) <= 1e-8 * std::max(1.0, norm2(o)));
  }
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(DenseMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(DenseMatrix{{3, 0}, {0, 4}}) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(spectral_norm(DenseMatrix{{0, 0}, {0, 0}}) == 0.0);
}

TEST_CASE("spectral_norm is transpose invariant and matches the SVD") {
  Rng rng(split_seed(11, "spectral"));
  for (int t = 0; t < 50; ++t) {
    const auto A = random_matrix(rng, 1 + rng.below(8), 1 + rng.below(8));
    const double s = spectral_norm(A);
    CHECK(std::abs(s - spectral_norm(A.transpose())) <= 1e-8 * s);
    Eigen::MatrixXd M(A.rows(), A.cols());
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < A.cols(); ++c) M(r, c) = A(r, c);
    const double ref = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
    CHECK(std::abs(s - ref) <= 1e-8 * ref);
  }
}

TEST_CASE("ama_left_operator examples") {
  auto L = ama_left_operator(Vector{2, 2});
  CHECK(L == Vector{0.25, 0.25});
  CHECK(dot(Vector{2, 2}, L) == 1.0);
  CHECK(ama_left_operator(Vector{1}) == Vector{1});
  CHECK(ama_left_operator(Vector{4, 0}) == Vector{0.25, 0});
}

TEST_CASE("row pseudoinverse") {
  const auto P = row_pseudoinverse(Vector{1, 3});
  CHECK(P[0] == doctest::Approx(0.1));
  CHECK(P[1] == doctest::Approx(0.3));
  CHECK_THROWS_AS(row_pseudoinverse(Vector{0, 0}), Error);
}

TEST_CASE("residual bound examples") {
  auto r = residual_bound_check(DenseMatrix::identity(2), Vector{1, 1}, Vector{0, 0});
  CHECK(r.lhs == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.rhs == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.holds);
  CHECK(std::abs(r.slack) <= 1e-12);

  const DenseMatrix A{{1, 0}, {0, 1}, {1, 1}};
  const Vector b{1, 2, 0};
  r = residual_bound_check(A, b, least_squares(A, b));
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
}

TEST_CASE("residual bound on random perturbed candidates") {
  Rng rng(split_seed(11, "residual"));
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + rng.below(7);
    const std::size_t n = 1 + rng.below(m);
    const auto A = random_matrix(rng, m, n);
    const auto b = random_vector(rng, m);
    auto x = least_squares(A, b);
    auto dir = random_vector(rng, n);
    const double nd = norm2(dir);
    for (std::size_t i = 0; i < n; ++i) x[i] += dir[i] / nd;
    CHECK(residual_bound_check(A, b, x).holds);
  }
}

TEST_CASE("deviation bound examples") {
  auto r = deviation_bound_check(Vector{1}, 3.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.holds);
  r = deviation_bound_check(Vector{1, 1}, 2.0);
  CHECK(r.lhs == 0.0);
  r = deviation_bound_check(Vector{1, 3}, 6.0);
  CHECK(r.lhs > 0.0);
  CHECK(r.holds);
}

TEST_CASE("deviation bound on random rows") {
  Rng rng(split_seed(11, "deviation"));
  for (int t = 0; t < 100; ++t) {
    Vector a(1 + rng.below(8));
    const bool equal = t % 4 == 0;
    const double mag = rng.uniform(0.1, 10.0);
    for (auto& e : a) e = (equal ? mag : rng.uniform(0.1, 10.0)) * (rng.uniform() < 0.5 ? -1 : 1);
    const auto r = deviation_bound_check(a, rng.uniform(-100, 100));
    CHECK(r.holds);
    if (equal) CHECK(r.lhs <= 1e-12 * std::max(1.0, r.rhs));
  }
}

TEST_CASE("stability probe") {
  CHECK_THROWS_AS(stability_probe(DenseMatrix{{1, 1}}, Vector{2}, 0.0, 0.0, 10, 1), Error);
  CHECK_THROWS_AS(stability_probe(DenseMatrix{{1, 1}}, Vector{2}, 0.1, 0.1, 0, 1), Error);
  CHECK_THROWS_AS(stability_probe(DenseMatrix{{1, 1}, {1, 2}}, Vector{2, 3}, 0.1, 0.1, 5, 1), Error);

  const auto p = stability_probe(DenseMatrix{{1, 1}}, Vector{2}, 0.0, 0.1, 200, 5);
  CHECK(p.operator_norm == doctest::Approx(std::sqrt(0.5)));
  CHECK(p.max_ratio <= std::sqrt(0.5) + 1e-9);
  CHECK(p.max_ratio > 0.0);

  Rng rng(split_seed(11, "stability"));
  for (int t = 0; t < 100; ++t) {
    Vector a(4);
    for (auto& e : a) e = rng.uniform(0.5, 5.0) * (rng.uniform() < 0.5 ? -1 : 1);
    const double b = rng.uniform(-10, 10);
    const auto q = stability_probe(DenseMatrix(1, 4, a), Vector{b}, 0.0, 0.01, 20, t);
    CHECK(std::isfinite(q.max_ratio));
    const auto s = stability_probe(DenseMatrix(1, 4, a), Vector{b}, 0.01, 0.01, 20, t);
    CHECK(s.max_ratio <= stability_constant(a, b, 0.01) * (1 + 1e-9));
  }
}

TEST_CASE("stability probe is deterministic under a seed") {
  const auto a = stability_probe(DenseMatrix{{1, 2, 3}}, Vector{4}, 0.01, 0.02, 30, 77);
  const auto b = stability_probe(DenseMatrix{{1, 2, 3}}, Vector{4}, 0.01, 0.02, 30, 77);
  CHECK(a.max_ratio == b.max_ratio);
}

TEST_CASE("optimal_alpha examples") {
  CHECK(optimal_alpha(Vector{1, 2}, Vector{1, 2}, Vector{0, 0}) == 1.0);
  CHECK(optimal_alpha(Vector{0, 0}, Vector{1, -1}, Vector{-1, 1}) == 0.5);
  CHECK(optimal_alpha(Vector{2, 4}, Vector{3, 5}, Vector{1, 3}) == 0.5);
  try {
    optimal_alpha(Vector{1, 2}, Vector{3, 3}, Vector{3, 3});
    FAIL("expected IdenticalPredictors");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IdenticalPredictors);
  }
}

TEST_CASE("empirical_risk examples") {
  CHECK(empirical_risk(Vector{1, 2}, Vector{1, 2}, Vector{5, 5}, 1.0) == 0.0);
  CHECK(empirical_risk(Vector{1, 2}, Vector{5, 5}, Vector{1, 2}, 0.0) == 0.0);
  CHECK(empirical_risk(Vector{0}, Vector{2}, Vector{0}, 0.5) == 1.0);
}

TEST_CASE("optimal_alpha dominates a fine grid") {
  Rng rng(split_seed(11, "alpha-grid"));
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(30);
    const auto y = random_vector(rng, n), u = random_vector(rng, n), v = random_vector(rng, n);
    const double r_hat = empirical_risk(y, u, v, optimal_alpha(y, u, v));
    double best = INFINITY;
    for (int i = 0; i <= 100; ++i) best = std::min(best, empirical_risk(y, u, v, i / 100.0));
    CHECK(r_hat <= best + 1e-12);
  }
}

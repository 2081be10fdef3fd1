#include "amr/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "amr/error.hpp"

namespace amr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_)
    throw Error(ErrorKind::LengthMismatch,
                "matrix entry count does not equal rows*cols");
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_)
      throw Error(ErrorKind::LengthMismatch, "ragged matrix initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_)
    throw Error(ErrorKind::LengthMismatch, "matrix-vector size mismatch");
  Vector out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = dot(row(r), x);
  return out;
}

Vector DenseMatrix::multiply_transposed(std::span<const double> y) const {
  if (y.size() != rows_)
    throw Error(ErrorKind::LengthMismatch, "matrixᵀ-vector size mismatch");
  Vector out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto rr = row(r);
    for (std::size_t c = 0; c < cols_; ++c) out[c] += rr[c] * y[r];
  }
  return out;
}

DenseMatrix DenseMatrix::without_row(std::size_t r) const {
  std::vector<double> e;
  e.reserve((rows_ - 1) * cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == r) continue;
    const auto rr = row(i);
    e.insert(e.end(), rr.begin(), rr.end());
  }
  return DenseMatrix(rows_ - 1, cols_, std::move(e));
}

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_)
    throw Error(ErrorKind::LengthMismatch, "appended row has wrong length");
  entries_.insert(entries_.end(), values.begin(), values.end());
  ++rows_;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, "dot product of unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation keeps huge/tiny entries from over/underflowing.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double t = x / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, "vector difference of unequal lengths");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace amr

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace amr {

using Vector = std::vector<double>;

// Row-major dense matrix of finite reals.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return entries_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return entries_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const noexcept {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) noexcept {
    return {entries_.data() + r * cols_, cols_};
  }

  std::span<const double> entries() const noexcept { return entries_; }

  DenseMatrix transpose() const;
  Vector multiply(std::span<const double> x) const;
  // Aᵀ·y without materialising the transpose.
  Vector multiply_transposed(std::span<const double> y) const;

  DenseMatrix without_row(std::size_t r) const;
  void append_row(std::span<const double> values);

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Vector subtract(std::span<const double> a, std::span<const double> b);

}  // namespace amr

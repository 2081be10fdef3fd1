#pragma once

// Arithmetic method: a single linear equation a·x = y is solved by giving
// every active term (nonzero coefficient) an equal share y/p of the target.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "amr/matrix.hpp"

namespace amr {

struct AmaDecomposition {
  Vector a;
  Vector x;
  double y = 0.0;
  double y_hat = 0.0;
  std::size_t p = 0;  // active dimensions
};

// How the per-term divisor is chosen. `TotalCount` divides by the number of
// active terms so the products sum to y; `Literal` divides term j by its
// 1-based index j, which makes ŷ = y·H_i. Literal exists for diagnostics only.
enum class IndexDivisor { TotalCount, Literal };

std::size_t active_count(std::span<const double> v) noexcept;

/// Forward direction: given coefficients a and target y, return x with
/// x[j] = y/(p·a[j]) on active entries and 0 elsewhere.
Vector solve_row(std::span<const double> a, double y,
                 IndexDivisor divisor = IndexDivisor::TotalCount);

/// ŷ = Σ a[j]·x[j], accumulated left to right.
double reconstruct(std::span<const double> a, std::span<const double> x);

/// Inverse direction used for model building: coefficients from an observed
/// regressor vector and its regressand.
AmaDecomposition fit_instance(std::span<const double> x, double y);

struct ValidationRecord {
  std::size_t i = 0;
  double y = 0.0;
  double y_hat = 0.0;
  double t = 0.0;    // seconds
  double eps = 0.0;  // percent
};

double percentage_error(double y, double y_hat) noexcept;

struct ValidationOptions {
  double lo = -1000.0;
  double hi = 1000.0;
  double min_abs_y = 1e-3;
  IndexDivisor divisor = IndexDivisor::TotalCount;
  unsigned threads = 1;
};

/// Runs the random draw / solve / reconstruct loop once per checkpoint
/// dimension. Records come back in ascending-i order and, apart from `t`,
/// depend only on `seed` and the checkpoint list.
std::vector<ValidationRecord> ama_validate(std::span<const std::size_t> checkpoints,
                                           std::uint64_t seed,
                                           const ValidationOptions& opts = {});

void write_validation_csv(std::ostream& out,
                          std::span<const ValidationRecord> records);

}  // namespace amr

#pragma once

// Least-squares machinery and numerical checks of the arithmetic method's
// relation to the Moore-Penrose solution.

#include <cstddef>
#include <cstdint>
#include <span>

#include "amr/matrix.hpp"

namespace amr {

inline constexpr double kRankPivotTolerance = 1e-10;

/// x_LS = (AᵀA)⁻¹Aᵀb. Throws RankDeficient when a pivot of the normal
/// matrix falls below 1e-10 of the largest pivot.
Vector least_squares(const DenseMatrix& A, std::span<const double> b);

/// Largest singular value via power iteration on AᵀA.
double spectral_norm(const DenseMatrix& A, std::size_t max_iter = 10'000);

/// Column operator L with x_AMA = L·b for the single-equation case.
Vector ama_left_operator(std::span<const double> a_row);

/// Moore-Penrose pseudoinverse of a 1×n row: aᵀ/(a·aᵀ).
Vector row_pseudoinverse(std::span<const double> a_row);

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack = 0.0;  // rhs − lhs
};

BoundReport make_bound_report(double lhs, double rhs) noexcept;

/// ‖A·x − b‖ ≤ ‖A‖₂‖x − x_LS‖ + ‖A·x_LS − b‖.
BoundReport residual_bound_check(const DenseMatrix& A, std::span<const double> b,
                                 std::span<const double> x_cand);

/// ‖x_AMA − A⁺b‖ ≤ ‖L − A⁺‖₂·|b| for a single row.
BoundReport deviation_bound_check(std::span<const double> a_row, double b);

struct StabilityProbe {
  double max_ratio = 0.0;      // max ‖Δx‖ / (η_A + η_b)
  double operator_norm = 0.0;  // ‖L_AMA‖₂ at the unperturbed row
  std::size_t trials = 0;
};

/// Random perturbations with ‖ΔA‖₂ ≤ eta_A and ‖Δb‖₂ ≤ eta_b applied to a
/// single-row system. A must have exactly one row.
StabilityProbe stability_probe(const DenseMatrix& A, std::span<const double> b,
                               double eta_A, double eta_b, std::size_t trials,
                               std::uint64_t seed);

/// Finite Lipschitz constant C for the single-row arithmetic solution:
/// ‖x(a+Δa, b+Δb) − x(a, b)‖ ≤ C·(η_A + η_b) whenever ‖Δa‖ ≤ η_A < min|a_j|.
/// C = ‖L(a)‖ evaluated at the worst shrunken row plus a bound on the
/// coefficient-derivative term. Returns +inf when the bound does not apply
/// (a zero coefficient, or η_A ≥ min|a_j|).
double stability_constant(std::span<const double> a_row, double b, double eta_A);

/// Minimiser of mean((α·u + (1−α)·v − y)²).
double optimal_alpha(std::span<const double> y, std::span<const double> u,
                     std::span<const double> v);

double empirical_risk(std::span<const double> y, std::span<const double> u,
                      std::span<const double> v, double alpha);

}  // namespace amr

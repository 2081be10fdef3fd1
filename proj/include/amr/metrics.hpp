#pragma once

#include <span>

namespace amr {

double mae(std::span<const double> actual, std::span<const double> predicted);
double mse(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// 1 − SS_res/SS_tot. Throws ConstantTarget when SS_tot == 0.
double r_squared(std::span<const double> actual, std::span<const double> predicted);

/// Same as r_squared, but a constant target yields 1 for a perfect fit and
/// 0 otherwise instead of throwing.
double r_squared_finite(std::span<const double> actual, std::span<const double> predicted);

struct MetricSet {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double et = 0.0;  // seconds
};

MetricSet compute_metrics(std::span<const double> actual,
                          std::span<const double> predicted, double et_seconds = 0.0);

}  // namespace amr

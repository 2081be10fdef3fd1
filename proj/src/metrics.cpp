#include "amr/metrics.hpp"

#include <cmath>

#include "amr/error.hpp"

namespace amr {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size())
    throw Error(ErrorKind::LengthMismatch, "actual and predicted lengths differ");
  if (a.empty()) throw Error(ErrorKind::EmptyVector, "no observations");
}

struct SumsOfSquares {
  double res = 0.0;
  double tot = 0.0;
};

SumsOfSquares sums_of_squares(std::span<const double> a, std::span<const double> p) {
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  SumsOfSquares s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - p[i];
    const double d = a[i] - mean;
    s.res += e * e;
    s.tot += d * d;
  }
  return s;
}

}  // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs(actual[i] - predicted[i]);
  return s / static_cast<double>(actual.size());
}

double mse(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    s += e * e;
  }
  return s / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  return std::sqrt(mse(actual, predicted));
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  if (actual.size() < 2)
    throw Error(ErrorKind::InsufficientData, "R² needs at least two observations");
  const auto s = sums_of_squares(actual, predicted);
  if (s.tot == 0.0) throw Error(ErrorKind::ConstantTarget, "actual values are constant");
  return 1.0 - s.res / s.tot;
}

double r_squared_finite(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  const auto s = sums_of_squares(actual, predicted);
  if (s.tot == 0.0) return s.res == 0.0 ? 1.0 : 0.0;
  return 1.0 - s.res / s.tot;
}

MetricSet compute_metrics(std::span<const double> actual,
                          std::span<const double> predicted, double et_seconds) {
  MetricSet m;
  m.mae = mae(actual, predicted);
  m.mse = mse(actual, predicted);
  m.rmse = std::sqrt(m.mse);
  m.r2 = r_squared_finite(actual, predicted);
  m.et = et_seconds;
  return m;
}

}  // namespace amr

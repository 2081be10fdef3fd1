#include "amr/dataset.hpp"

#include <cmath>

#include "amr/error.hpp"

namespace amr {

void Dataset::validate() const {
  if (X.rows() != y.size())
    throw Error(ErrorKind::LengthMismatch, "regressor rows and regressand length differ");
  if (X.rows() < 2) throw Error(ErrorKind::InsufficientData, "dataset needs at least 2 rows");
  if (X.cols() < 1) throw Error(ErrorKind::InsufficientData, "dataset needs at least 1 regressor");
  if (!feature_names.empty() && feature_names.size() != X.cols())
    throw Error(ErrorKind::LengthMismatch, "feature name count differs from column count");
  if (!X.all_finite()) throw Error(ErrorKind::InvalidArgument, "regressors contain non-finite values");
  for (double v : y)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "regressand contains non-finite values");
}

Dataset Dataset::select_features(const std::vector<std::size_t>& columns) const {
  Dataset out;
  out.name = name;
  out.target_name = target_name;
  out.y = y;
  std::vector<double> e;
  e.reserve(rows() * columns.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c : columns) {
      if (c >= cols()) throw Error(ErrorKind::UnknownColumn, "feature index out of range", c);
      e.push_back(X(r, c));
    }
  out.X = DenseMatrix(rows(), columns.size(), std::move(e));
  for (std::size_t c : columns)
    out.feature_names.push_back(c < feature_names.size() ? feature_names[c]
                                                         : "feature_" + std::to_string(c + 1));
  return out;
}

Dataset Dataset::permute_rows(const std::vector<std::size_t>& order) const {
  if (order.size() != rows()) throw Error(ErrorKind::LengthMismatch, "permutation has wrong length");
  Dataset out = *this;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto src = X.row(order[r]);
    auto dst = out.X.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    out.y[r] = y[order[r]];
  }
  return out;
}

}  // namespace amr

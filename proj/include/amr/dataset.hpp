#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "amr/matrix.hpp"

namespace amr {

// Numeric regression data after preprocessing: X is n×m, y has n entries.
struct Dataset {
  DenseMatrix X;
  Vector y;
  std::vector<std::string> feature_names;
  std::string target_name = "target";
  std::string name;

  std::size_t rows() const noexcept { return X.rows(); }
  std::size_t cols() const noexcept { return X.cols(); }

  // Throws InvalidArgument on non-finite entries, n < 2, m < 1 or
  // inconsistent shapes.
  void validate() const;

  Dataset select_features(const std::vector<std::size_t>& columns) const;
  Dataset permute_rows(const std::vector<std::size_t>& order) const;
};

}  // namespace amr

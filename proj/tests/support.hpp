#pragma once

#include <cstdint>
#include <string>

#include "amr/dataset.hpp"
#include "amr/random.hpp"

namespace amr::testing {

// Small dense dataset: features in [-5, 5], target linear plus noise. Entries
// are kept away from zero so every row has an exact AMA decomposition.
inline Dataset random_dataset(Rng& rng, std::size_t n, std::size_t m,
                              const std::string& name = "synthetic") {
  Dataset d;
  d.name = name;
  d.X = DenseMatrix(n, m);
  d.y.resize(n);
  Vector w(m);
  for (auto& e : w) e = rng.uniform(-2.0, 2.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      double v = rng.uniform(0.2, 5.0);
      if (rng.uniform() < 0.5) v = -v;
      d.X(r, c) = v;
      s += w[c] * v;
    }
    d.y[r] = s + rng.normal();
  }
  for (std::size_t c = 0; c < m; ++c) d.feature_names.push_back("f" + std::to_string(c));
  return d;
}

}  // namespace amr::testing

#pragma once

#include "epiclust/types.hpp"

#include <algorithm>
#include <vector>

namespace epiclust {

/// Symmetric matrix of pairwise Euclidean distances between rows of X.
inline MatrixXd pairwise_distances(const MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  if (n < 2) throw std::invalid_argument("pairwise_distances: need at least 2 rows");
  MatrixXd D = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (X.row(i) - X.row(j)).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

/// Median of the strictly positive pairwise distances ("median heuristic"
/// bandwidth). Falls back to 1 when all rows coincide.
inline double median_pairwise_distance(const MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = (X.row(i) - X.row(j)).norm();
      if (v > 0.0) d.push_back(v);
    }
  if (d.empty()) return 1.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  return d[mid];
}

}  // namespace epiclust

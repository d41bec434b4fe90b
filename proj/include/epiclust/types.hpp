#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiclust {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when a numerical routine cannot complete (rank deficiency,
/// failed factorization, degenerate statistics). Distinct from
/// std::invalid_argument, which signals a violated precondition.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shared evaluation grid t_1 < ... < t_m.
struct Grid {
  std::vector<double> points;

  int size() const { return static_cast<int>(points.size()); }
  double front() const { return points.front(); }
  double back() const { return points.back(); }
  double span() const { return points.back() - points.front(); }

  bool operator==(const Grid& other) const { return points == other.points; }
};

inline Grid make_grid(std::vector<double> points) {
  if (points.size() < 4)
    throw std::invalid_argument("grid: need at least 4 sample locations");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]))
      throw std::invalid_argument("grid: non-finite sample location");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw std::invalid_argument("grid: locations must be strictly increasing");
  }
  return Grid{std::move(points)};
}

/// m equispaced locations covering [a, b].
inline Grid uniform_grid(int m, double a, double b) {
  if (m < 4) throw std::invalid_argument("grid: need at least 4 sample locations");
  if (!(b > a)) throw std::invalid_argument("grid: empty interval");
  std::vector<double> pts(m);
  for (int i = 0; i < m; ++i)
    pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1);
  return Grid{std::move(pts)};
}

/// n curves observed on a shared grid; row i holds curve i.
/// Labels, when present, carry the true class of each curve.
struct FunctionalSample {
  MatrixXd values;  // n x m
  Grid grid;
  std::optional<std::vector<int>> labels;

  int n() const { return static_cast<int>(values.rows()); }
  int m() const { return static_cast<int>(values.cols()); }
};

inline FunctionalSample make_sample(MatrixXd values, Grid grid,
                                    std::optional<std::vector<int>> labels = std::nullopt) {
  if (values.rows() < 2)
    throw std::invalid_argument("sample: need at least 2 curves");
  if (values.cols() != grid.size())
    throw std::invalid_argument("sample: curve length does not match grid");
  if (labels && static_cast<int>(labels->size()) != values.rows())
    throw std::invalid_argument("sample: label vector length does not match curve count");
  return FunctionalSample{std::move(values), std::move(grid), std::move(labels)};
}

/// Cluster assignment for n items into k groups, ids in [0, k).
struct Partition {
  std::vector<int> assign;
  int k = 0;

  int n() const { return static_cast<int>(assign.size()); }
};

}  // namespace epiclust

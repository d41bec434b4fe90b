#pragma once

#include "epiclust/types.hpp"

#include <Eigen/Eigenvalues>

namespace epiclust {

/// Trapezoidal quadrature weights for a (possibly non-uniform) grid.
inline VectorXd trapezoid_weights(const Grid& grid) {
  const int m = grid.size();
  VectorXd w(m);
  w[0] = (grid.points[1] - grid.points[0]) / 2.0;
  w[m - 1] = (grid.points[m - 1] - grid.points[m - 2]) / 2.0;
  for (int j = 1; j < m - 1; ++j) w[j] = (grid.points[j + 1] - grid.points[j - 1]) / 2.0;
  return w;
}

/// Empirical functional PCA: eigenpairs of the grid-discretized covariance
/// kernel under trapezoidal quadrature. Eigenfunctions are orthonormal in
/// the weighted inner product and eigenvalues sorted descending.
struct FPCADecomposition {
  VectorXd eigenvalues;    // descending, non-negative (clamped at 0)
  MatrixXd eigenfunctions; // column l = phi_l evaluated on the grid
  VectorXd mean;
  VectorXd weights;

  int components() const { return static_cast<int>(eigenvalues.size()); }

  double inner(const VectorXd& f, const VectorXd& g) const {
    return (f.array() * g.array() * weights.array()).sum();
  }
};

inline FPCADecomposition fpca(const FunctionalSample& sample) {
  const int n = sample.n();
  const int m = sample.m();
  if (n < 2) throw std::invalid_argument("fpca: need at least 2 curves");

  FPCADecomposition out;
  out.weights = trapezoid_weights(sample.grid);
  out.mean = sample.values.colwise().mean().transpose();

  const MatrixXd centered = sample.values.rowwise() - out.mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  // symmetrized eigenproblem: W^(1/2) C W^(1/2) u = lambda u, phi = W^(-1/2) u
  const VectorXd sqrt_w = out.weights.cwiseSqrt();
  const MatrixXd B = sqrt_w.asDiagonal() * cov * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw numerical_error("fpca: eigensolver failed");

  out.eigenvalues.resize(m);
  out.eigenfunctions.resize(m, m);
  for (int l = 0; l < m; ++l) {
    out.eigenvalues[l] = std::max(es.eigenvalues()[m - 1 - l], 0.0);
    out.eigenfunctions.col(l) = es.eigenvectors().col(m - 1 - l).cwiseQuotient(sqrt_w);
  }
  return out;
}

}  // namespace epiclust

#pragma once

#include "epiclust/kernels.hpp"
#include "epiclust/kmeans.hpp"
#include "epiclust/types.hpp"

#include <Eigen/Eigenvalues>

namespace epiclust {

struct SpectralOptions {
  int kmeans_restarts = 10;
  int kmeans_max_iter = 100;
  std::uint64_t seed = 0;
};

/// Ng-Jordan-Weiss spectral clustering: affinity with zero diagonal,
/// symmetric-normalized Laplacian, top-k eigenvector embedding with
/// row normalization, then Euclidean k-means on the embedding.
inline Partition spectral_cluster(const MatrixXd& X, int k, const KernelSpec& spec,
                                  const SpectralOptions& opts = {}) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw std::invalid_argument("spectral_cluster: k must lie in [1, n]");

  MatrixXd A = kernel_matrix(X, spec);
  A.diagonal().setZero();

  VectorXd deg = A.rowwise().sum();
  VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;

  const MatrixXd M = inv_sqrt.asDiagonal() * A * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw numerical_error("spectral_cluster: eigensolver failed");

  // eigenvalues come out ascending; take the top-k columns
  MatrixXd embed(n, k);
  for (int c = 0; c < k; ++c) embed.col(c) = es.eigenvectors().col(n - 1 - c);
  for (int i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }

  KMeansOptions km;
  km.restarts = opts.kmeans_restarts;
  km.max_iter = opts.kmeans_max_iter;
  km.seed = opts.seed;
  return kmeans(embed, k, km).partition;
}

}  // namespace epiclust

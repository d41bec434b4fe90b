#pragma once

#include "epiclust/distance.hpp"
#include "epiclust/hierarchical.hpp"
#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <Eigen/Cholesky>

#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace epiclust {

enum class InitKind {
  RandomPartition,
  Forgy,
  KMeansPlusPlus,
  Ward,            // one pass of Ward.D2 hierarchical clustering
  KMeansOneStep,   // a single Lloyd iteration from a Forgy draw
  KernelKMeans     // only meaningful for kernel k-means
};

enum class KMeansMetric { Euclidean, Mahalanobis };

struct KMeansOptions {
  int max_iter = 100;
  int restarts = 10;
  InitKind init = InitKind::KMeansPlusPlus;
  KMeansMetric metric = KMeansMetric::Euclidean;
  std::uint64_t seed = 0;
  std::optional<MatrixXd> initial_centers;  // overrides init when set
};

struct KMeansResult {
  Partition partition;
  double objective = 0.0;
  int iterations = 0;
  MatrixXd centers;
  std::vector<double> objective_trace;  // objective after every Lloyd update
};

/// k-means++ seeding: first center uniform, each next center drawn with
/// probability proportional to squared distance to the nearest chosen one.
inline std::vector<int> kmeanspp_init(const MatrixXd& X, int k, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw std::invalid_argument("kmeanspp_init: k must lie in [1, n]");
  std::vector<int> centers;
  centers.reserve(k);
  centers.push_back(rng.uniform_int(n));
  VectorXd d2 = (X.rowwise() - X.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    int chosen = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        u -= d2[i];
        if (u <= 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = n - 1;
    } else {
      // all mass sits on chosen centers already; take the first unused row
      std::vector<bool> used(n, false);
      for (int c : centers) used[c] = true;
      for (int i = 0; i < n; ++i)
        if (!used[i]) {
          chosen = i;
          break;
        }
      if (chosen < 0) chosen = rng.uniform_int(n);
    }
    centers.push_back(chosen);
    d2 = d2.cwiseMin((X.rowwise() - X.row(chosen)).rowwise().squaredNorm());
  }
  return centers;
}

inline std::vector<int> kmeanspp_init(const MatrixXd& X, int k, std::uint64_t seed) {
  Rng rng(seed);
  return kmeanspp_init(X, k, rng);
}

namespace detail {

inline std::vector<int> forgy_rows(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
  idx.resize(k);
  return idx;
}

inline MatrixXd initial_centers(const MatrixXd& X, int k, InitKind init, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  switch (init) {
    case InitKind::Forgy: {
      const auto idx = forgy_rows(n, k, rng);
      MatrixXd C(k, X.cols());
      for (int c = 0; c < k; ++c) C.row(c) = X.row(idx[c]);
      return C;
    }
    case InitKind::KMeansPlusPlus: {
      const auto idx = kmeanspp_init(X, k, rng);
      MatrixXd C(k, X.cols());
      for (int c = 0; c < k; ++c) C.row(c) = X.row(idx[c]);
      return C;
    }
    case InitKind::RandomPartition: {
      std::vector<int> assign(n);
      std::vector<int> count(k, 0);
      for (int i = 0; i < n; ++i) {
        assign[i] = rng.uniform_int(k);
        ++count[assign[i]];
      }
      for (int c = 0; c < k; ++c)
        if (count[c] == 0) {
          int victim = rng.uniform_int(n);
          while (count[assign[victim]] <= 1) victim = (victim + 1) % n;
          --count[assign[victim]];
          assign[victim] = c;
          ++count[c];
        }
      MatrixXd C = MatrixXd::Zero(k, X.cols());
      for (int i = 0; i < n; ++i) C.row(assign[i]) += X.row(i);
      for (int c = 0; c < k; ++c) C.row(c) /= count[c];
      return C;
    }
    case InitKind::Ward: {
      const Partition p = cut(hcluster(pairwise_distances(X), LinkageKind::WardD2), k);
      MatrixXd C = MatrixXd::Zero(k, X.cols());
      std::vector<int> count(k, 0);
      for (int i = 0; i < n; ++i) {
        C.row(p.assign[i]) += X.row(i);
        ++count[p.assign[i]];
      }
      for (int c = 0; c < k; ++c) C.row(c) /= count[c];
      return C;
    }
    case InitKind::KMeansOneStep: {
      MatrixXd C = initial_centers(X, k, InitKind::Forgy, rng);
      std::vector<int> assign(n, 0);
      for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = (X.row(i) - C.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            assign[i] = c;
          }
        }
      }
      MatrixXd C2 = MatrixXd::Zero(k, X.cols());
      std::vector<int> count(k, 0);
      for (int i = 0; i < n; ++i) {
        C2.row(assign[i]) += X.row(i);
        ++count[assign[i]];
      }
      for (int c = 0; c < k; ++c)
        if (count[c] > 0) C2.row(c) /= count[c];
        else C2.row(c) = C.row(c);
      return C2;
    }
    case InitKind::KernelKMeans:
      throw std::invalid_argument("kmeans: kernel-kmeans initialization needs a kernel matrix");
  }
  throw std::invalid_argument("kmeans: unknown initialization");
}

inline KMeansResult lloyd(const MatrixXd& X, int k, MatrixXd centers, int max_iter) {
  const int n = static_cast<int>(X.rows());
  KMeansResult res;
  res.partition.k = k;
  std::vector<int> assign(n, -1), prev(n, -2), count(k, 0);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // assignment step (ties go to the smallest cluster id)
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = (X.row(i) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      assign[i] = arg;
    }

    // repair empty clusters: seed each with the point farthest from its center
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) ++count[assign[i]];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[assign[i]] <= 1) continue;
        const double d = (X.row(i) - centers.row(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) throw numerical_error("kmeans: cannot repair empty cluster");
      --count[assign[far]];
      assign[far] = c;
      ++count[c];
    }

    // update step
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(assign[i]) += X.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= count[c];

    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += (X.row(i) - centers.row(assign[i])).squaredNorm();
    res.objective_trace.push_back(obj);

    if (assign == prev) break;
    prev = assign;
  }

  res.partition.assign = assign;
  res.objective = res.objective_trace.back();
  res.iterations = iter;
  res.centers = std::move(centers);
  return res;
}

}  // namespace detail

/// Rows whitened so Euclidean geometry on the output equals Mahalanobis
/// geometry on the input: z = L^-1 x with cov = L L^T. The covariance gets a
/// small ridge before factorization to survive near-collinear features.
inline MatrixXd mahalanobis_whiten(const MatrixXd& X) {
  const int p = static_cast<int>(X.cols());
  const MatrixXd centered = X.rowwise() - X.colwise().mean();
  MatrixXd cov = centered.transpose() * centered / static_cast<double>(X.rows() - 1);
  cov.diagonal().array() += 1e-8 * cov.trace() / p;
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw numerical_error("kmeans: covariance not positive definite after regularization");
  return llt.matrixL().solve(X.transpose()).transpose();
}

/// Lloyd k-means, restarted (best objective kept), deterministic under seed.
inline KMeansResult kmeans(const MatrixXd& X, int k, const KMeansOptions& opts = {}) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must lie in [1, n]");

  MatrixXd data = opts.metric == KMeansMetric::Mahalanobis ? mahalanobis_whiten(X) : X;

  Rng rng(opts.seed);
  if (opts.initial_centers) {
    if (opts.initial_centers->rows() != k || opts.initial_centers->cols() != data.cols())
      throw std::invalid_argument("kmeans: initial_centers has wrong shape");
    return detail::lloyd(data, k, *opts.initial_centers, opts.max_iter);
  }

  KMeansResult best;
  bool have = false;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    MatrixXd centers = detail::initial_centers(data, k, opts.init, rng);
    KMeansResult res = detail::lloyd(data, k, std::move(centers), opts.max_iter);
    if (!have || res.objective < best.objective) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

}  // namespace epiclust

#pragma once

#include "epiclust/fpca.hpp"
#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace epiclust {

/// Distance choice for functional k-means: plain L2 quadrature or the
/// truncated Mahalanobis distance d_K built from the leading K empirical
/// principal components.
struct FKMeansDistance {
  enum class Kind { L2, TruncatedMahalanobis };
  Kind kind = Kind::L2;
  int components = 2;  // the K of d_K

  static FKMeansDistance l2() { return {}; }
  static FKMeansDistance truncated(int K) {
    FKMeansDistance d;
    d.kind = Kind::TruncatedMahalanobis;
    d.components = K;
    return d;
  }
};

struct FKMeansOptions {
  int max_iter = 100;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct FKMeansResult {
  Partition partition;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
};

/// L2 distance between two curves by trapezoidal quadrature.
inline double l2_distance(const VectorXd& a, const VectorXd& b, const VectorXd& weights) {
  return std::sqrt(((a - b).array().square() * weights.array()).sum());
}

namespace detail {

inline FKMeansResult fkmeans_lloyd(const MatrixXd& X, int k,
                                   const std::function<double(const VectorXd&, const VectorXd&)>& d2,
                                   std::vector<int> seeds, int max_iter) {
  const int n = static_cast<int>(X.rows());
  MatrixXd centers(k, X.cols());
  for (int c = 0; c < k; ++c) centers.row(c) = X.row(seeds[c]);

  FKMeansResult res;
  res.partition.k = k;
  std::vector<int> assign(n, -1), prev(n, -2), count(k, 0);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = d2(X.row(i).transpose(), centers.row(c).transpose());
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      assign[i] = arg;
    }

    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) ++count[assign[i]];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[assign[i]] <= 1) continue;
        const double d = d2(X.row(i).transpose(), centers.row(assign[i]).transpose());
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) throw numerical_error("fkmeans: cannot repair empty cluster");
      --count[assign[far]];
      assign[far] = c;
      ++count[c];
    }

    // centroids are pointwise means of the member curves
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(assign[i]) += X.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= count[c];

    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += d2(X.row(i).transpose(), centers.row(assign[i]).transpose());
    res.objective_trace.push_back(obj);

    if (assign == prev) break;
    prev = assign;
  }

  res.partition.assign = assign;
  res.objective = res.objective_trace.back();
  res.iterations = iter;
  return res;
}

inline std::vector<int> fkmeans_pp_seeds(
    const MatrixXd& X, int k, const std::function<double(const VectorXd&, const VectorXd&)>& d2,
    Rng& rng) {
  const int n = static_cast<int>(X.rows());
  std::vector<int> seeds;
  seeds.push_back(rng.uniform_int(n));
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = d2(X.row(i).transpose(), X.row(seeds[0]).transpose());
  while (static_cast<int>(seeds.size()) < k) {
    double total = 0.0;
    for (double v : dist) total += v;
    int chosen = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        u -= dist[i];
        if (u <= 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = n - 1;
    } else {
      chosen = rng.uniform_int(n);
    }
    seeds.push_back(chosen);
    for (int i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], d2(X.row(i).transpose(), X.row(chosen).transpose()));
  }
  return seeds;
}

}  // namespace detail

/// Functional k-means: Lloyd iterations with pointwise-mean centroids under
/// either the L2 or the truncated Mahalanobis distance. The FPCA behind d_K
/// is computed once from the full sample.
inline FKMeansResult fkmeans(const FunctionalSample& sample, int k, const FKMeansDistance& dist,
                             const FKMeansOptions& opts = {}) {
  const int n = sample.n();
  if (k < 1 || k > n) throw std::invalid_argument("fkmeans: k must lie in [1, n]");

  std::function<double(const VectorXd&, const VectorXd&)> d2;
  FPCADecomposition pca;
  const VectorXd weights = trapezoid_weights(sample.grid);

  if (dist.kind == FKMeansDistance::Kind::L2) {
    d2 = [weights](const VectorXd& a, const VectorXd& b) {
      return ((a - b).array().square() * weights.array()).sum();
    };
  } else {
    pca = fpca(sample);
    const int K = dist.components;
    if (K < 1 || K > pca.components())
      throw std::invalid_argument("fkmeans: component count out of range");
    for (int l = 0; l < K; ++l)
      if (pca.eigenvalues[l] < 1e-12 * pca.eigenvalues[0])
        throw numerical_error("fkmeans: K exceeds the numerically positive spectrum");
    const MatrixXd phi = pca.eigenfunctions.leftCols(K);
    const VectorXd lambda = pca.eigenvalues.head(K);
    d2 = [phi, lambda, weights, K](const VectorXd& a, const VectorXd& b) {
      const VectorXd diff = a - b;
      double acc = 0.0;
      for (int l = 0; l < K; ++l) {
        const double score = (diff.array() * phi.col(l).array() * weights.array()).sum();
        acc += score * score / lambda[l];
      }
      return acc;
    };
  }

  Rng rng(opts.seed);
  FKMeansResult best;
  bool have = false;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    auto seeds = detail::fkmeans_pp_seeds(sample.values, k, d2, rng);
    auto res = detail::fkmeans_lloyd(sample.values, k, d2, std::move(seeds), opts.max_iter);
    if (!have || res.objective < best.objective) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

}  // namespace epiclust

#pragma once

#include "epiclust/distance.hpp"
#include "epiclust/kmeans.hpp"
#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <vector>

namespace epiclust {

/// Kernel choice for kernel k-means and spectral clustering.
///  gaussian:   k(x,y) = exp(-|x-y|^2 / (2 sigma^2))
///  polynomial: k(x,y) = (scale <x,y> + offset)^degree
///  linear:     k(x,y) = <x,y>
struct KernelSpec {
  enum class Kind { Gaussian, Polynomial, Linear };
  Kind kind = Kind::Gaussian;
  double sigma = 1.0;
  int degree = 2;
  double scale = 1.0;
  double offset = 1.0;

  static KernelSpec gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel: sigma must be positive");
    KernelSpec s;
    s.kind = Kind::Gaussian;
    s.sigma = sigma;
    return s;
  }
  static KernelSpec polynomial(int degree, double scale = 1.0, double offset = 1.0) {
    if (degree < 1) throw std::invalid_argument("kernel: degree must be >= 1");
    KernelSpec s;
    s.kind = Kind::Polynomial;
    s.degree = degree;
    s.scale = scale;
    s.offset = offset;
    return s;
  }
  static KernelSpec linear() {
    KernelSpec s;
    s.kind = Kind::Linear;
    return s;
  }

  const char* name() const {
    switch (kind) {
      case Kind::Gaussian: return "gaussian";
      case Kind::Polynomial: return "polynomial";
      case Kind::Linear: return "linear";
    }
    return "?";
  }
};

inline void require_psd(const MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K, Eigen::EigenvaluesOnly);
  const double max_ev = es.eigenvalues().maxCoeff();
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -1e-8 * std::max(max_ev, 0.0))
    throw std::invalid_argument("kernel matrix is not positive semidefinite");
}

/// Gram matrix of the rows of X. Gaussian and linear kernels are PSD by
/// construction; polynomial kernels are verified.
inline MatrixXd kernel_matrix(const MatrixXd& X, const KernelSpec& spec) {
  const int n = static_cast<int>(X.rows());
  MatrixXd K(n, n);
  switch (spec.kind) {
    case KernelSpec::Kind::Gaussian: {
      const double denom = 2.0 * spec.sigma * spec.sigma;
      for (int i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
          const double v = std::exp(-(X.row(i) - X.row(j)).squaredNorm() / denom);
          K(i, j) = v;
          K(j, i) = v;
        }
      }
      break;
    }
    case KernelSpec::Kind::Linear:
      K = X * X.transpose();
      break;
    case KernelSpec::Kind::Polynomial: {
      K = (spec.scale * (X * X.transpose()).array() + spec.offset).pow(spec.degree).matrix();
      K = ((K + K.transpose()) / 2.0).eval();
      require_psd(K);
      break;
    }
  }
  return K;
}

struct KernelKMeansOptions {
  int max_iter = 100;
  int restarts = 10;
  InitKind init = InitKind::KMeansPlusPlus;
  std::uint64_t seed = 0;
  bool check_psd = true;
};

struct KernelKMeansResult {
  Partition partition;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
};

namespace detail {

// feature-space squared distance of point i to the mean of cluster c,
// computed from kernel entries only
struct KernelDistances {
  const MatrixXd& K;
  int k;
  std::vector<double> cluster_self;  // (1/|c|^2) sum_{j,l in c} K_jl
  MatrixXd point_to_cluster;         // (1/|c|) sum_{j in c} K_ij

  KernelDistances(const MatrixXd& K_, int k_) : K(K_), k(k_) {}

  void refresh(const std::vector<int>& assign) {
    const int n = static_cast<int>(K.rows());
    std::vector<double> count(k, 0.0);
    for (int i = 0; i < n; ++i) count[assign[i]] += 1.0;
    point_to_cluster = MatrixXd::Zero(n, k);
    for (int j = 0; j < n; ++j) point_to_cluster.col(assign[j]) += K.col(j);
    cluster_self.assign(k, 0.0);
    for (int j = 0; j < n; ++j) cluster_self[assign[j]] += point_to_cluster(j, assign[j]);
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0.0) {
        point_to_cluster.col(c) /= count[c];
        cluster_self[c] /= count[c] * count[c];
      }
    }
  }

  double d2(int i, int c) const { return K(i, i) - 2.0 * point_to_cluster(i, c) + cluster_self[c]; }
};

inline std::vector<int> kernel_seed_assignment(const MatrixXd& K, int k, InitKind init, Rng& rng) {
  const int n = static_cast<int>(K.rows());
  auto d2_points = [&](int i, int j) { return K(i, i) - 2.0 * K(i, j) + K(j, j); };

  std::vector<int> seeds;
  switch (init) {
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
      return assign;
    }
    case InitKind::Forgy: {
      seeds = forgy_rows(n, k, rng);
      break;
    }
    case InitKind::KernelKMeans:
    case InitKind::KMeansPlusPlus: {
      // k-means++ in the feature space induced by the kernel
      seeds.push_back(rng.uniform_int(n));
      std::vector<double> dist(n);
      for (int i = 0; i < n; ++i) dist[i] = d2_points(i, seeds[0]);
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
          std::vector<bool> used(n, false);
          for (int s : seeds) used[s] = true;
          for (int i = 0; i < n; ++i)
            if (!used[i]) {
              chosen = i;
              break;
            }
          if (chosen < 0) chosen = rng.uniform_int(n);
        }
        seeds.push_back(chosen);
        for (int i = 0; i < n; ++i) dist[i] = std::min(dist[i], d2_points(i, chosen));
      }
      break;
    }
    default:
      throw std::invalid_argument("kernel_kmeans: unsupported initialization");
  }

  std::vector<int> assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = d2_points(i, seeds[c]);
      if (d < best) {
        best = d;
        assign[i] = c;
      }
    }
  }
  return assign;
}

inline KernelKMeansResult kernel_lloyd(const MatrixXd& K, int k, std::vector<int> assign,
                                       int max_iter) {
  const int n = static_cast<int>(K.rows());
  KernelKMeansResult res;
  res.partition.k = k;
  KernelDistances kd(K, k);
  std::vector<int> prev(n, -1), count(k, 0);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    kd.refresh(assign);
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = kd.d2(i, c);
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      next[i] = arg;
    }

    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) ++count[next[i]];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[next[i]] <= 1) continue;
        const double d = kd.d2(i, next[i]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) throw numerical_error("kernel_kmeans: cannot repair empty cluster");
      --count[next[far]];
      next[far] = c;
      ++count[c];
    }

    kd.refresh(next);
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += std::max(kd.d2(i, next[i]), 0.0);
    res.objective_trace.push_back(obj);

    const bool stable = next == assign;
    assign = std::move(next);
    if (stable) break;
  }

  res.partition.assign = std::move(assign);
  res.objective = res.objective_trace.back();
  res.iterations = iter;
  return res;
}

}  // namespace detail

/// Dhillon-style kernel k-means on a precomputed kernel matrix.
inline KernelKMeansResult kernel_kmeans(const MatrixXd& K, int k,
                                        const KernelKMeansOptions& opts = {}) {
  const int n = static_cast<int>(K.rows());
  if (K.cols() != n) throw std::invalid_argument("kernel_kmeans: kernel matrix must be square");
  if (k < 1 || k > n) throw std::invalid_argument("kernel_kmeans: k must lie in [1, n]");
  if (!K.isApprox(K.transpose(), 1e-10))
    throw std::invalid_argument("kernel_kmeans: kernel matrix must be symmetric");
  if (opts.check_psd) require_psd(K);

  Rng rng(opts.seed);
  KernelKMeansResult best;
  bool have = false;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    auto assign = detail::kernel_seed_assignment(K, k, opts.init, rng);
    auto res = detail::kernel_lloyd(K, k, std::move(assign), opts.max_iter);
    if (!have || res.objective < best.objective) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

}  // namespace epiclust

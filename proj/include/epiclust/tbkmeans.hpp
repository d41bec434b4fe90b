#pragma once

#include "epiclust/kmeans.hpp"
#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace epiclust {

/// Configuration of the test-based k-means: ANOVA window size (odd, in grid
/// points), rejection threshold gamma, and the iteration cap.
struct TBConfig {
  int window = 5;
  double gamma = 1.65;
  int max_iter = 50;

  void validate() const {
    if (window < 3 || window % 2 == 0)
      throw std::invalid_argument("tb: window must be an odd integer >= 3");
    if (!(gamma > 0.0)) throw std::invalid_argument("tb: gamma must be positive");
  }
};

namespace detail {

struct TBPair {
  double T = 0.0;
  double W = 0.0;
  bool degenerate = false;
};

// Parallelism statistic: one-way ANOVA over window-augmented cells of the
// residual stream xi = curve - center, standardized by the difference-based
// variance estimate tau. The stream length r plays the sample-size role.
inline double tb_T_impl(const VectorXd& xi, int window) {
  const int r = static_cast<int>(xi.size());
  const int half = (window - 1) / 2;

  double grand_sum = 0.0;
  long long total = 0;
  std::vector<double> cell_mean(r, 0.0);
  std::vector<int> cell_size(r, 0);
  for (int j = 0; j < r; ++j) {
    const int lo = std::max(0, j - half);
    const int hi = std::min(r - 1, j + half);
    double acc = 0.0;
    for (int s = lo; s <= hi; ++s) acc += xi[s];
    cell_size[j] = hi - lo + 1;
    cell_mean[j] = acc / cell_size[j];
    grand_sum += acc;
    total += cell_size[j];
  }
  const double grand_mean = grand_sum / static_cast<double>(total);

  double mst = 0.0, mse = 0.0;
  for (int j = 0; j < r; ++j) {
    mst += cell_size[j] * (cell_mean[j] - grand_mean) * (cell_mean[j] - grand_mean);
    const int lo = std::max(0, j - half);
    const int hi = std::min(r - 1, j + half);
    for (int s = lo; s <= hi; ++s) mse += (xi[s] - cell_mean[j]) * (xi[s] - cell_mean[j]);
  }
  mst /= r - 1;
  mse /= static_cast<double>(total - r);

  double tau2 = 0.0;
  for (int s = 1; s + 2 < r; ++s) {
    const double d1 = xi[s] - xi[s - 1];
    const double d2 = xi[s + 2] - xi[s + 1];
    tau2 += d1 * d1 * d2 * d2;
  }
  tau2 /= 4.0 * (r - 3);

  const double numer = std::sqrt(static_cast<double>(r)) * (mst - mse);
  const double m = window;
  const double denom = std::sqrt(tau2) * std::sqrt(2.0 * m * (2.0 * m - 1.0) / (3.0 * (m - 1.0)));
  if (denom == 0.0) return numer == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(numer / denom);
}

inline TBPair tb_pair(const VectorXd& curve, const VectorXd& center, const TBConfig& config) {
  const int r = static_cast<int>(curve.size());
  TBPair out;
  out.T = tb_T_impl(curve - center, config.window);

  const double mean_x = curve.mean();
  const double mean_c = center.mean();
  const double var_x = (curve.array() - mean_x).square().sum() / (r - 1);
  const double var_c = (center.array() - mean_c).square().sum() / (r - 1);
  const double denom = std::sqrt((var_x + var_c) / r);
  if (denom == 0.0) {
    out.degenerate = true;
    out.W = mean_x == mean_c ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    out.W = std::abs(mean_x - mean_c) / denom;
  }
  return out;
}

}  // namespace detail

/// Parallelism test statistic T between a curve and a cluster center.
inline double tb_parallelism_T(const VectorXd& curve, const VectorXd& center,
                               const TBConfig& config = {}) {
  config.validate();
  if (curve.size() != center.size())
    throw std::invalid_argument("tb: curve and center must share the grid");
  if (static_cast<int>(curve.size()) < config.window + 4)
    throw std::invalid_argument("tb: grid too short for the configured window");
  return detail::tb_T_impl(curve - center, config.window);
}

/// Mean-equality test statistic W between a curve and a cluster center.
/// A pair with zero variance on both sides has no scale to test against.
inline double tb_mean_W(const VectorXd& curve, const VectorXd& center) {
  if (curve.size() != center.size())
    throw std::invalid_argument("tb: curve and center must share the grid");
  const auto pair = detail::tb_pair(curve, center, TBConfig{});
  if (pair.degenerate) throw numerical_error("tb: degenerate-pair (zero variance in W)");
  return pair.W;
}

/// Allocation scores for one curve against every center: the three-branch
/// combination of T and W, selected from how many centers pass each test.
inline std::vector<double> tb_allocation_scores(const std::vector<double>& T,
                                                const std::vector<double>& W, double gamma) {
  const int k = static_cast<int>(T.size());
  int count_T = 0, count_W = 0;
  double max_T = 0.0, max_W = 0.0;
  for (int p = 0; p < k; ++p) {
    if (T[p] < gamma) ++count_T;
    if (W[p] < gamma) ++count_W;
    max_T = std::max(max_T, T[p]);
    max_W = std::max(max_W, W[p]);
  }

  std::vector<double> psi(k);
  if (count_T >= 2 && count_W <= 1) {
    psi = W;
  } else if (count_W >= 2 && count_T <= 1) {
    psi = T;
  } else {
    for (int p = 0; p < k; ++p) {
      const double t_part = max_T > 0.0 ? T[p] / max_T : 0.0;
      const double w_part = max_W > 0.0 ? W[p] / max_W : 0.0;
      psi[p] = 0.5 * t_part + 0.5 * w_part;
    }
  }
  return psi;
}

struct TBKMeansResult {
  Partition partition;
  int iterations = 0;
  bool oscillated = false;
};

/// Test-based k-means: allocate every curve by the combined statistic Psi,
/// recompute centers as pointwise means, iterate to a fixpoint (with
/// oscillation detection) or the iteration cap.
inline TBKMeansResult tb_kmeans(const FunctionalSample& sample, int k, InitKind init,
                                const TBConfig& config, std::uint64_t seed) {
  config.validate();
  const int n = sample.n();
  const int r = sample.m();
  if (k < 1 || k > n) throw std::invalid_argument("tb_kmeans: k must lie in [1, n]");
  if (r < config.window + 4)
    throw std::invalid_argument("tb_kmeans: grid too short for the configured window");

  Rng rng(seed);
  MatrixXd centers;
  switch (init) {
    case InitKind::RandomPartition:
    case InitKind::Forgy: {
      const auto rows = detail::forgy_rows(n, k, rng);
      centers.resize(k, r);
      for (int c = 0; c < k; ++c) centers.row(c) = sample.values.row(rows[c]);
      break;
    }
    case InitKind::KMeansOneStep:
      centers = detail::initial_centers(sample.values, k, InitKind::KMeansOneStep, rng);
      break;
    case InitKind::Ward:
      centers = detail::initial_centers(sample.values, k, InitKind::Ward, rng);
      break;
    case InitKind::KMeansPlusPlus:
      centers = detail::initial_centers(sample.values, k, InitKind::KMeansPlusPlus, rng);
      break;
    default:
      throw std::invalid_argument("tb_kmeans: unsupported initialization");
  }

  TBKMeansResult res;
  res.partition.k = k;
  std::vector<int> assign(n, -1);
  std::vector<std::vector<int>> history;

  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    long long degenerate_pairs = 0;
    std::vector<double> T(k), W(k);
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p < k; ++p) {
        const auto pair =
            detail::tb_pair(sample.values.row(i).transpose(), centers.row(p).transpose(), config);
        T[p] = pair.T;
        W[p] = pair.W;
        if (pair.degenerate) ++degenerate_pairs;
      }
      const auto psi = tb_allocation_scores(T, W, config.gamma);
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < k; ++p)
        if (psi[p] < best) {
          best = psi[p];
          arg = p;
        }
      assign[i] = arg;
    }
    if (degenerate_pairs == static_cast<long long>(n) * k)
      throw numerical_error("tb_kmeans: every (curve, center) pair is degenerate");

    // keep k clusters: an empty cluster takes the worst-fitting curve
    std::vector<int> count(k, 0);
    for (int a : assign) ++count[a];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[assign[i]] <= 1) continue;
        const double d = (sample.values.row(i) - centers.row(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) throw numerical_error("tb_kmeans: cannot repair empty cluster");
      --count[assign[far]];
      assign[far] = c;
      ++count[c];
    }

    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(assign[i]) += sample.values.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= count[c];

    bool seen = false;
    for (const auto& past : history)
      if (past == assign) {
        seen = true;
        break;
      }
    if (seen) {
      res.oscillated = history.back() != assign;
      break;
    }
    history.push_back(assign);
  }

  res.partition.assign = assign;
  res.iterations = iter;
  return res;
}

}  // namespace epiclust

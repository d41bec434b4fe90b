#pragma once

#include "epiclust/distance.hpp"
#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

namespace epiclust {

namespace detail {

// contingency table: rows = predicted clusters (compacted), cols = classes
inline std::vector<std::vector<long long>> contingency(const std::vector<int>& pred,
                                                       const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("validation: partition and labels differ in length");
  std::map<int, int> cluster_ix, class_ix;
  for (int c : pred)
    if (!cluster_ix.count(c)) cluster_ix[c] = static_cast<int>(cluster_ix.size());
  for (int t : truth)
    if (!class_ix.count(t)) class_ix[t] = static_cast<int>(class_ix.size());
  std::vector<std::vector<long long>> table(cluster_ix.size(),
                                            std::vector<long long>(class_ix.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++table[cluster_ix[pred[i]]][class_ix[truth[i]]];
  return table;
}

}  // namespace detail

/// Fraction of points sitting in their cluster's majority class.
inline double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
  const auto table = detail::contingency(pred, truth);
  long long hits = 0;
  for (const auto& row : table) hits += *std::max_element(row.begin(), row.end());
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

inline double purity(const Partition& pred, const std::vector<int>& truth) {
  return purity(pred.assign, truth);
}

/// Class-weighted best-match F-measure. Every class contributes, weighted by
/// its size, the best harmonic mean of precision and recall over clusters.
inline double fmeasure(const std::vector<int>& pred, const std::vector<int>& truth) {
  const auto table = detail::contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  const std::size_t n_clusters = table.size();
  const std::size_t n_classes = table.empty() ? 0 : table[0].size();

  std::vector<long long> cluster_size(n_clusters, 0), class_size(n_classes, 0);
  for (std::size_t j = 0; j < n_clusters; ++j)
    for (std::size_t c = 0; c < n_classes; ++c) {
      cluster_size[j] += table[j][c];
      class_size[c] += table[j][c];
    }

  double total = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    double best = 0.0;
    for (std::size_t j = 0; j < n_clusters; ++j) {
      if (table[j][c] == 0) continue;
      const double precision = static_cast<double>(table[j][c]) / cluster_size[j];
      const double recall = static_cast<double>(table[j][c]) / class_size[c];
      best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
    total += static_cast<double>(class_size[c]) / n * best;
  }
  return total;
}

inline double fmeasure(const Partition& pred, const std::vector<int>& truth) {
  return fmeasure(pred.assign, truth);
}

/// Fraction of item pairs on which the two groupings agree (paired together
/// in both or separated in both).
inline double rand_index(const std::vector<int>& pred, const std::vector<int>& truth) {
  const std::size_t n = pred.size();
  if (n != truth.size())
    throw std::invalid_argument("validation: partition and labels differ in length");
  if (n < 2) throw std::invalid_argument("rand_index: need at least 2 items");

  const auto table = detail::contingency(pred, truth);
  auto choose2 = [](long long v) { return v * (v - 1) / 2; };

  long long same_both = 0, same_pred = 0, same_truth = 0;
  std::vector<long long> col_sums(table[0].size(), 0);
  for (const auto& row : table) {
    long long row_sum = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      same_both += choose2(row[c]);
      row_sum += row[c];
      col_sums[c] += row[c];
    }
    same_pred += choose2(row_sum);
  }
  for (long long s : col_sums) same_truth += choose2(s);

  const long long pairs = choose2(static_cast<long long>(n));
  const long long agreements = pairs + 2 * same_both - same_pred - same_truth;
  return static_cast<double>(agreements) / static_cast<double>(pairs);
}

inline double rand_index(const Partition& pred, const std::vector<int>& truth) {
  return rand_index(pred.assign, truth);
}

inline double rand_index(const Partition& a, const Partition& b) {
  return rand_index(a.assign, b.assign);
}

/// External validation record for one clustering run.
struct EvalReport {
  double purity = 0.0;
  double fmeasure = 0.0;
  double rand = 0.0;
  double time_seconds = 0.0;
};

inline EvalReport evaluate(const Partition& pred, const std::vector<int>& truth,
                           double time_seconds = 0.0) {
  return EvalReport{purity(pred, truth), fmeasure(pred, truth), rand_index(pred, truth),
                    time_seconds};
}

struct SilhouetteResult {
  VectorXd values;  // per-point s(x_i) in [-1, 1]
  double mean = 0.0;
};

/// Silhouette s(x) = (b - a) / max(a, b) from a precomputed distance matrix.
/// Points in singleton clusters score 0.
inline SilhouetteResult silhouette(const MatrixXd& D, const Partition& part) {
  const int n = static_cast<int>(D.rows());
  if (part.n() != n) throw std::invalid_argument("silhouette: partition size mismatch");
  if (part.k < 2) throw std::invalid_argument("silhouette: need at least 2 clusters");

  std::vector<int> count(part.k, 0);
  for (int a : part.assign) {
    if (a < 0 || a >= part.k) throw std::invalid_argument("silhouette: cluster id out of range");
    ++count[a];
  }
  for (int c = 0; c < part.k; ++c)
    if (count[c] == 0) throw std::invalid_argument("silhouette: empty cluster");

  SilhouetteResult res;
  res.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const int own = part.assign[i];
    if (count[own] == 1) {
      res.values[i] = 0.0;
      continue;
    }
    std::vector<double> sum(part.k, 0.0);
    for (int j = 0; j < n; ++j)
      if (j != i) sum[part.assign[j]] += D(i, j);

    const double a = sum[own] / (count[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < part.k; ++c) {
      if (c == own) continue;
      b = std::min(b, sum[c] / count[c]);
    }
    const double denom = std::max(a, b);
    res.values[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  res.mean = res.values.mean();
  return res;
}

inline SilhouetteResult silhouette_of(const MatrixXd& X, const Partition& part) {
  return silhouette(pairwise_distances(X), part);
}

/// Result of silhouette-guided cluster-count selection.
struct KSelection {
  std::vector<int> candidates;
  std::vector<double> mean_silhouettes;  // NaN for candidates that failed
  int chosen = 0;
};

/// Runs the supplied clustering at every candidate k and picks the k with the
/// greatest mean silhouette (ties resolved to the smallest candidate).
/// Candidates whose clustering fails are recorded as missing.
inline KSelection select_k(const MatrixXd& X,
                           const std::function<Partition(const MatrixXd&, int, std::uint64_t)>& method,
                           std::vector<int> candidates, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (candidates.empty()) candidates = {2, 3, 4, 5, 6};
  for (int k : candidates)
    if (k < 2 || k > n - 1)
      throw std::invalid_argument("select_k: candidates must lie in [2, n-1]");

  const MatrixXd D = pairwise_distances(X);
  KSelection sel;
  sel.candidates = candidates;
  sel.mean_silhouettes.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int k = candidates[i];
    try {
      const Partition part = method(X, k, derive_seed(seed, static_cast<std::uint64_t>(k)));
      sel.mean_silhouettes[i] = silhouette(D, part).mean;
    } catch (const std::exception&) {
      // candidate skipped, recorded as missing
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  int chosen = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = sel.mean_silhouettes[i];
    if (std::isnan(s)) continue;
    if (s > best || (s == best && candidates[i] < chosen)) {
      best = s;
      chosen = candidates[i];
    }
  }
  if (chosen < 0) throw numerical_error("select_k: every candidate failed");
  sel.chosen = chosen;
  return sel;
}

}  // namespace epiclust

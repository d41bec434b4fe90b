#pragma once

#include "epiclust/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace epiclust {

enum class LinkageKind { Single, Complete, Average, Centroid, WardD2 };

inline const char* to_string(LinkageKind l) {
  switch (l) {
    case LinkageKind::Single: return "single";
    case LinkageKind::Complete: return "complete";
    case LinkageKind::Average: return "average";
    case LinkageKind::Centroid: return "centroid";
    case LinkageKind::WardD2: return "ward.D2";
  }
  return "?";
}

/// One agglomeration step. Node ids: 0..n-1 are leaves, n+t is the cluster
/// created by merge t.
struct Merge {
  int left;
  int right;
  double height;
};

struct Dendrogram {
  int n = 0;
  std::vector<Merge> merges;
};

/// Lance-Williams agglomeration on a distance matrix. Centroid and Ward.D2
/// update squared distances internally and report square-rooted heights
/// (the ward.D2 semantics of R's hclust). Centroid heights may invert.
inline Dendrogram hcluster(const MatrixXd& D, LinkageKind linkage) {
  const int n = static_cast<int>(D.rows());
  if (n < 2 || D.cols() != n) throw std::invalid_argument("hcluster: bad distance matrix");

  const bool squared = linkage == LinkageKind::Centroid || linkage == LinkageKind::WardD2;
  MatrixXd W = squared ? MatrixXd(D.array().square()) : D;

  std::vector<int> node_id(n), size(n, 1);
  std::iota(node_id.begin(), node_id.end(), 0);
  std::vector<bool> active(n, true);

  Dendrogram dend;
  dend.n = n;
  dend.merges.reserve(n - 1);

  for (int step = 0; step < n - 1; ++step) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (W(i, j) < best) {
          best = W(i, j);
          bi = i;
          bj = j;
        }
      }
    }

    const double ni = size[bi], nj = size[bj];
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double dki = W(bi, k), dkj = W(bj, k), dij = W(bi, bj);
      double merged = 0.0;
      switch (linkage) {
        case LinkageKind::Single: merged = std::min(dki, dkj); break;
        case LinkageKind::Complete: merged = std::max(dki, dkj); break;
        case LinkageKind::Average: merged = (ni * dki + nj * dkj) / (ni + nj); break;
        case LinkageKind::Centroid:
          merged = (ni * dki + nj * dkj) / (ni + nj) - ni * nj * dij / ((ni + nj) * (ni + nj));
          break;
        case LinkageKind::WardD2: {
          const double nk = size[k];
          merged = ((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / (ni + nj + nk);
          break;
        }
      }
      W(bi, k) = merged;
      W(k, bi) = merged;
    }

    dend.merges.push_back({node_id[bi], node_id[bj], squared ? std::sqrt(std::max(best, 0.0)) : best});
    node_id[bi] = n + step;
    size[bi] += size[bj];
    active[bj] = false;
  }
  return dend;
}

/// Cut to k clusters by discarding the k-1 tallest merges (stable on ties)
/// and applying the rest with union-find. Cluster ids follow first
/// occurrence by row index.
inline Partition cut(const Dendrogram& dend, int k) {
  const int n = dend.n;
  if (k < 1 || k > n) throw std::invalid_argument("cut: k must lie in [1, n]");

  std::vector<int> order(dend.merges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dend.merges[a].height < dend.merges[b].height;
  });

  // representative leaf of every node (leaf or merge result)
  std::vector<int> rep(n + dend.merges.size());
  for (int i = 0; i < n; ++i) rep[i] = i;
  for (std::size_t t = 0; t < dend.merges.size(); ++t)
    rep[n + t] = std::min(rep[dend.merges[t].left], rep[dend.merges[t].right]);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (int t = 0; t < n - k; ++t) {
    const Merge& mg = dend.merges[order[t]];
    const int a = find(rep[mg.left]);
    const int b = find(rep[mg.right]);
    parent[std::max(a, b)] = std::min(a, b);
  }

  Partition part;
  part.assign.assign(n, -1);
  part.k = k;
  int next = 0;
  std::vector<int> label_of_root(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (label_of_root[r] < 0) label_of_root[r] = next++;
    part.assign[i] = label_of_root[r];
  }
  return part;
}

}  // namespace epiclust

#pragma once

#include "epiclust/bspline.hpp"
#include "epiclust/types.hpp"

#include <Eigen/LU>

#include <array>
#include <string>
#include <vector>

namespace epiclust {

enum class IndexKind { EI, HI, MEI, MHI };

enum class DataSource { Data, D1, D2 };

inline const char* to_string(IndexKind k) {
  switch (k) {
    case IndexKind::EI: return "EI";
    case IndexKind::HI: return "HI";
    case IndexKind::MEI: return "MEI";
    case IndexKind::MHI: return "MHI";
  }
  return "?";
}

inline const char* to_string(DataSource s) {
  switch (s) {
    case DataSource::Data: return "_";
    case DataSource::D1: return "d";
    case DataSource::D2: return "d2";
  }
  return "?";
}

/// Epigraph/hypograph indexes of every curve with respect to the sample.
///
/// EI(x_i)  = 1 - (1/n) #{j : x_j >= x_i at every grid point}
/// HI(x_i)  =     (1/n) #{j : x_j <= x_i at every grid point}
/// MEI(x_i) = 1 - (1/(n m)) sum_j #{t : x_j(t) >= x_i(t)}
/// MHI(x_i) =     (1/(n m)) sum_j #{t : x_j(t) <= x_i(t)}
///
/// Comparisons are inclusive, so every curve counts inside its own epigraph
/// and hypograph. Time is measured by uniform grid-point counting: each grid
/// point carries weight 1/m.
inline VectorXd compute_index(IndexKind kind, const FunctionalSample& sample) {
  const int n = sample.n();
  const int m = sample.m();
  if (n < 1) throw std::invalid_argument("compute_index: empty sample");
  const MatrixXd& X = sample.values;

  VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    long long count = 0;  // curves (EI/HI) or curve-point pairs (MEI/MHI)
    for (int j = 0; j < n; ++j) {
      switch (kind) {
        case IndexKind::EI:
          count += (X.row(j).array() >= X.row(i).array()).all() ? 1 : 0;
          break;
        case IndexKind::HI:
          count += (X.row(j).array() <= X.row(i).array()).all() ? 1 : 0;
          break;
        case IndexKind::MEI:
          count += (X.row(j).array() >= X.row(i).array()).count();
          break;
        case IndexKind::MHI:
          count += (X.row(j).array() <= X.row(i).array()).count();
          break;
      }
    }
    switch (kind) {
      case IndexKind::EI: out[i] = 1.0 - static_cast<double>(count) / n; break;
      case IndexKind::HI: out[i] = static_cast<double>(count) / n; break;
      case IndexKind::MEI:
        out[i] = 1.0 - static_cast<double>(count) / (static_cast<double>(n) * m);
        break;
      case IndexKind::MHI:
        out[i] = static_cast<double>(count) / (static_cast<double>(n) * m);
        break;
    }
  }
  return out;
}

/// A combination of data sources and index families. Sources are kept in
/// canonical (_, d, d2) order; columns are emitted source-major, EI then HI
/// then MEI within a source. MHI is never a column (it is MEI + 1/n).
struct ComboSpec {
  std::vector<DataSource> sources;
  bool with_eihi = false;
  bool with_mei = false;

  int num_columns() const {
    return static_cast<int>(sources.size()) * (2 * (with_eihi ? 1 : 0) + (with_mei ? 1 : 0));
  }

  std::string sources_token() const {
    std::string s;
    for (DataSource src : sources) s += to_string(src);
    return s;
  }

  std::string family_token() const {
    if (with_eihi && with_mei) return "EIHIMEI";
    if (with_eihi) return "EIHI";
    return "MEI";
  }

  /// Combination name in the (b).(c) format, e.g. "_dd2.EIHIMEI".
  std::string name() const { return sources_token() + "." + family_token(); }
};

inline ComboSpec make_combo(std::vector<DataSource> sources, bool eihi, bool mei) {
  if (sources.empty()) throw std::invalid_argument("combo: needs at least one data source");
  if (!eihi && !mei) throw std::invalid_argument("combo: needs at least one index family");
  for (std::size_t i = 1; i < sources.size(); ++i)
    if (!(static_cast<int>(sources[i]) > static_cast<int>(sources[i - 1])))
      throw std::invalid_argument("combo: sources must be in (_, d, d2) order without repeats");
  if (!eihi && mei && sources.size() < 2)
    throw std::invalid_argument("combo: MEI-only combinations need at least two sources");
  return ComboSpec{std::move(sources), eihi, mei};
}

inline ComboSpec parse_combo(const std::string& name) {
  const auto dot = name.rfind('.');
  if (dot == std::string::npos) throw std::invalid_argument("combo: expected (b).(c) format");
  const std::string src = name.substr(0, dot);
  const std::string fam = name.substr(dot + 1);

  std::vector<DataSource> sources;
  for (std::size_t i = 0; i < src.size();) {
    if (src[i] == '_') {
      sources.push_back(DataSource::Data);
      ++i;
    } else if (src[i] == 'd' && i + 1 < src.size() && src[i + 1] == '2') {
      sources.push_back(DataSource::D2);
      i += 2;
    } else if (src[i] == 'd') {
      sources.push_back(DataSource::D1);
      ++i;
    } else {
      throw std::invalid_argument("combo: bad source token '" + src + "'");
    }
  }
  bool eihi = false, mei = false;
  if (fam == "EIHI") eihi = true;
  else if (fam == "MEI") mei = true;
  else if (fam == "EIHIMEI") eihi = mei = true;
  else throw std::invalid_argument("combo: bad family token '" + fam + "'");
  return make_combo(std::move(sources), eihi, mei);
}

/// The 18 combinations the pipeline evaluates: EIHI and EIHIMEI on every
/// non-empty source subset, MEI alone only on the multi-source subsets.
inline std::vector<ComboSpec> enumerate_combos() {
  using S = DataSource;
  const std::vector<std::vector<S>> all = {{S::Data},          {S::D1},         {S::D2},
                                           {S::Data, S::D1},   {S::Data, S::D2}, {S::D1, S::D2},
                                           {S::Data, S::D1, S::D2}};
  std::vector<ComboSpec> combos;
  for (const auto& s : all) combos.push_back(make_combo(s, true, false));
  for (const auto& s : all) combos.push_back(make_combo(s, true, true));
  for (const auto& s : all)
    if (s.size() >= 2) combos.push_back(make_combo(s, false, true));
  return combos;
}

struct FeatureColumn {
  IndexKind kind;
  DataSource source;
};

/// n x p multivariate projection of a smoothed sample via an index combo.
struct FeatureMatrix {
  MatrixXd values;
  std::vector<FeatureColumn> columns;
  ComboSpec combo;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

inline const FunctionalSample& select_source(const SmoothedTriple& triple, DataSource src) {
  switch (src) {
    case DataSource::Data: return triple.data;
    case DataSource::D1: return triple.d1;
    case DataSource::D2: return triple.d2;
  }
  throw std::invalid_argument("unknown data source");
}

inline FeatureMatrix assemble_features(const SmoothedTriple& triple, const ComboSpec& combo) {
  const int n = triple.data.n();
  FeatureMatrix fm;
  fm.combo = combo;
  fm.values.resize(n, combo.num_columns());
  int col = 0;
  for (DataSource src : combo.sources) {
    const FunctionalSample& s = select_source(triple, src);
    if (combo.with_eihi) {
      fm.values.col(col) = compute_index(IndexKind::EI, s);
      fm.columns.push_back({IndexKind::EI, src});
      ++col;
      fm.values.col(col) = compute_index(IndexKind::HI, s);
      fm.columns.push_back({IndexKind::HI, src});
      ++col;
    }
    if (combo.with_mei) {
      fm.values.col(col) = compute_index(IndexKind::MEI, s);
      fm.columns.push_back({IndexKind::MEI, src});
      ++col;
    }
  }
  return fm;
}

/// Precomputed index vectors for every (kind, source) pair a combo can ask
/// for. Lets a grid run over all 18 combos reuse the nine O(n^2 m) passes.
struct IndexCache {
  // [source][kind] with kind restricted to EI, HI, MEI
  std::array<std::array<VectorXd, 3>, 3> vals;

  static IndexCache compute(const SmoothedTriple& triple) {
    IndexCache cache;
    const DataSource sources[] = {DataSource::Data, DataSource::D1, DataSource::D2};
    const IndexKind kinds[] = {IndexKind::EI, IndexKind::HI, IndexKind::MEI};
    for (int s = 0; s < 3; ++s)
      for (int k = 0; k < 3; ++k)
        cache.vals[s][k] = compute_index(kinds[k], select_source(triple, sources[s]));
    return cache;
  }

  const VectorXd& get(IndexKind kind, DataSource source) const {
    const int k = kind == IndexKind::EI ? 0 : kind == IndexKind::HI ? 1 : 2;
    if (kind == IndexKind::MHI) throw std::invalid_argument("IndexCache: MHI is never a column");
    return vals[static_cast<int>(source)][k];
  }
};

inline FeatureMatrix assemble_features(const SmoothedTriple& triple, const ComboSpec& combo,
                                       const IndexCache& cache) {
  const int n = triple.data.n();
  FeatureMatrix fm;
  fm.combo = combo;
  fm.values.resize(n, combo.num_columns());
  int col = 0;
  for (DataSource src : combo.sources) {
    if (combo.with_eihi) {
      fm.values.col(col) = cache.get(IndexKind::EI, src);
      fm.columns.push_back({IndexKind::EI, src});
      ++col;
      fm.values.col(col) = cache.get(IndexKind::HI, src);
      fm.columns.push_back({IndexKind::HI, src});
      ++col;
    }
    if (combo.with_mei) {
      fm.values.col(col) = cache.get(IndexKind::MEI, src);
      fm.columns.push_back({IndexKind::MEI, src});
      ++col;
    }
  }
  return fm;
}

/// Unbiased sample covariance of the columns (divisor n-1).
inline MatrixXd column_covariance(const MatrixXd& X) {
  const MatrixXd centered = X.rowwise() - X.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(X.rows() - 1);
}

struct Admissibility {
  bool ok = false;
  double det = 0.0;
  std::string reason;

  explicit operator bool() const { return ok; }
};

/// A feature matrix enters the clustering stage only when the determinant of
/// its column covariance clears 1e-5 in absolute value.
inline Admissibility admissible(const FeatureMatrix& fm) {
  constexpr double kThreshold = 1e-5;
  if (fm.n() <= fm.p())
    return {false, 0.0, "insufficient rows"};
  const double det = column_covariance(fm.values).determinant();
  if (std::abs(det) > kThreshold) return {true, det, ""};
  return {false, det, "ill-conditioned"};
}

}  // namespace epiclust

#pragma once

#include "epiclust/hierarchical.hpp"
#include "epiclust/indexes.hpp"

#include <string>

namespace epiclust {

/// The clustering strategies appearing as the (a) part of a report row.
enum class ClusterMethod { Single, Complete, Average, Centroid, WardD2, KMeans, KKMeans, Spectral };

inline const char* to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::Single: return "single";
    case ClusterMethod::Complete: return "complete";
    case ClusterMethod::Average: return "average";
    case ClusterMethod::Centroid: return "centroid";
    case ClusterMethod::WardD2: return "ward.D2";
    case ClusterMethod::KMeans: return "kmeans";
    case ClusterMethod::KKMeans: return "kkmeans";
    case ClusterMethod::Spectral: return "spc";
  }
  return "?";
}

inline ClusterMethod parse_method(const std::string& token) {
  for (ClusterMethod m : {ClusterMethod::Single, ClusterMethod::Complete, ClusterMethod::Average,
                          ClusterMethod::Centroid, ClusterMethod::WardD2, ClusterMethod::KMeans,
                          ClusterMethod::KKMeans, ClusterMethod::Spectral})
    if (token == to_string(m)) return m;
  throw std::invalid_argument("unknown clustering method '" + token + "'");
}

inline bool is_hierarchical(ClusterMethod m) {
  return m == ClusterMethod::Single || m == ClusterMethod::Complete ||
         m == ClusterMethod::Average || m == ClusterMethod::Centroid ||
         m == ClusterMethod::WardD2;
}

inline LinkageKind linkage_of(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::Single: return LinkageKind::Single;
    case ClusterMethod::Complete: return LinkageKind::Complete;
    case ClusterMethod::Average: return LinkageKind::Average;
    case ClusterMethod::Centroid: return LinkageKind::Centroid;
    case ClusterMethod::WardD2: return LinkageKind::WardD2;
    default: throw std::invalid_argument("not a hierarchical method");
  }
}

/// Full (a).(b).(c) row name, e.g. "ward.D2._d.MEI".
struct MethodName {
  ClusterMethod method;
  ComboSpec combo;

  std::string str() const { return std::string(to_string(method)) + "." + combo.name(); }
};

/// Parses from the right: the last dot-token is the index family, the one
/// before it the source set, everything left of that the method (which may
/// itself contain a dot, as in ward.D2).
inline MethodName parse_method_name(const std::string& s) {
  const auto last = s.rfind('.');
  if (last == std::string::npos || last == 0)
    throw std::invalid_argument("method name: expected (a).(b).(c), got '" + s + "'");
  const auto mid = s.rfind('.', last - 1);
  if (mid == std::string::npos)
    throw std::invalid_argument("method name: expected (a).(b).(c), got '" + s + "'");
  const std::string combo_part = s.substr(mid + 1);
  const std::string method_part = s.substr(0, mid);
  return MethodName{parse_method(method_part), parse_combo(combo_part)};
}

}  // namespace epiclust

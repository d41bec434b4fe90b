#pragma once

#include "epiclust/types.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace epiclust {

class csv_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CsvHeader { Auto, Grid, None };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim whitespace and CR
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace detail

/// Reads a rectangular numeric CSV where rows are curves. An optional header
/// row carries the grid values; a column headed `label` carries true classes.
/// Header detection (Auto): a non-numeric cell in row one, or a strictly
/// increasing all-numeric row one, means a header. Override with Grid/None.
inline FunctionalSample ingest_csv(const std::string& path, CsvHeader header = CsvHeader::Auto) {
  std::ifstream in(path);
  if (!in) throw csv_error("cannot open '" + path + "'");

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.size() < 2) throw csv_error("'" + path + "': need at least two rows");

  const std::size_t width = rows[0].size();
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != width) {
      std::ostringstream msg;
      msg << path << ": ragged row " << r + 1 << " (" << rows[r].size() << " cells, expected "
          << width << ")";
      throw csv_error(msg.str());
    }

  // decide whether row one is a header
  bool has_header = false;
  std::vector<double> first_numeric(width);
  bool first_all_numeric = true;
  for (std::size_t c = 0; c < width; ++c)
    if (!detail::parse_double(rows[0][c], first_numeric[c])) first_all_numeric = false;

  switch (header) {
    case CsvHeader::Grid: has_header = true; break;
    case CsvHeader::None: has_header = false; break;
    case CsvHeader::Auto: {
      if (!first_all_numeric) {
        has_header = true;
      } else {
        bool increasing = true;
        for (std::size_t c = 1; c < width; ++c)
          if (!(first_numeric[c] > first_numeric[c - 1])) increasing = false;
        has_header = increasing;
      }
      break;
    }
  }

  int label_col = -1;
  if (has_header)
    for (std::size_t c = 0; c < width; ++c)
      if (rows[0][c] == "label") label_col = static_cast<int>(c);

  const std::size_t first_data = has_header ? 1 : 0;
  const int n = static_cast<int>(rows.size() - first_data);
  const int m = static_cast<int>(width) - (label_col >= 0 ? 1 : 0);
  if (n < 2) throw csv_error("'" + path + "': need at least two curves");
  if (m < 4) throw csv_error("'" + path + "': need at least four grid columns");

  // grid: numeric header cells, or 0..m-1 when absent or non-numeric
  std::vector<double> grid_points;
  if (has_header) {
    bool numeric_header = true;
    for (std::size_t c = 0; c < width; ++c) {
      if (static_cast<int>(c) == label_col) continue;
      double v;
      if (!detail::parse_double(rows[0][c], v)) {
        numeric_header = false;
        break;
      }
      grid_points.push_back(v);
    }
    if (!numeric_header) grid_points.clear();
  }
  if (grid_points.empty())
    for (int c = 0; c < m; ++c) grid_points.push_back(static_cast<double>(c));

  MatrixXd values(n, m);
  std::vector<int> labels(n);
  std::map<std::string, int> label_codes;
  for (int r = 0; r < n; ++r) {
    const auto& row = rows[r + first_data];
    int col_out = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (static_cast<int>(c) == label_col) {
        double numeric;
        if (detail::parse_double(row[c], numeric)) {
          labels[r] = static_cast<int>(numeric);
        } else {
          auto [it, inserted] = label_codes.emplace(row[c], static_cast<int>(label_codes.size()));
          labels[r] = it->second;
        }
        continue;
      }
      double v;
      if (!detail::parse_double(row[c], v)) {
        std::ostringstream msg;
        msg << path << ": non-numeric cell at row " << r + first_data + 1 << ", column " << c + 1
            << " ('" << row[c] << "')";
        throw csv_error(msg.str());
      }
      values(r, col_out++) = v;
    }
  }

  FunctionalSample sample{std::move(values), make_grid(std::move(grid_points)), std::nullopt};
  if (label_col >= 0) sample.labels = std::move(labels);
  return sample;
}

/// Writes a sample in the same layout ingest_csv reads: grid header, one row
/// per curve, trailing `label` column when labels exist.
inline void write_sample_csv(const FunctionalSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw csv_error("cannot write '" + path + "'");
  out << std::setprecision(17);
  for (int j = 0; j < sample.m(); ++j) {
    if (j) out << ",";
    out << sample.grid.points[j];
  }
  if (sample.labels) out << ",label";
  out << "\n";
  for (int i = 0; i < sample.n(); ++i) {
    for (int j = 0; j < sample.m(); ++j) {
      if (j) out << ",";
      out << sample.values(i, j);
    }
    if (sample.labels) out << "," << (*sample.labels)[i];
    out << "\n";
  }
}

}  // namespace epiclust

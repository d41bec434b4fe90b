#pragma once

#include "epiclust/types.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace epiclust {

namespace detail {

inline const char* svg_color(int group) {
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  return palette[group % 8];
}

struct SvgFrame {
  double x0, x1, y0, y1;
  static constexpr double W = 640, H = 420, pad = 40;

  double px(double x) const { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); }
  double py(double y) const { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); }
};

inline void svg_open(std::ostream& out) {
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << SvgFrame::W << "' height='"
      << SvgFrame::H << "' viewBox='0 0 " << SvgFrame::W << " " << SvgFrame::H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
}

}  // namespace detail

/// Curves colored by label (single color when unlabeled).
inline void write_curves_svg(const FunctionalSample& sample, const std::string& path) {
  using detail::SvgFrame;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  SvgFrame f{sample.grid.front(), sample.grid.back(), sample.values.minCoeff(),
             sample.values.maxCoeff()};
  if (f.y0 == f.y1) f.y1 = f.y0 + 1.0;

  detail::svg_open(out);
  for (int i = 0; i < sample.n(); ++i) {
    out << "<polyline fill='none' stroke='"
        << detail::svg_color(sample.labels ? (*sample.labels)[i] : 0)
        << "' stroke-width='1' stroke-opacity='0.6' points='";
    for (int j = 0; j < sample.m(); ++j)
      out << f.px(sample.grid.points[j]) << "," << f.py(sample.values(i, j)) << " ";
    out << "'/>\n";
  }
  out << "</svg>\n";
}

/// 2-D scatter of two feature columns, colored by label.
inline void write_scatter_svg(const MatrixXd& X, int col_x, int col_y,
                              const std::vector<int>* labels, const std::string& x_name,
                              const std::string& y_name, const std::string& path) {
  using detail::SvgFrame;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  SvgFrame f{X.col(col_x).minCoeff(), X.col(col_x).maxCoeff(), X.col(col_y).minCoeff(),
             X.col(col_y).maxCoeff()};
  if (f.x0 == f.x1) f.x1 = f.x0 + 1.0;
  if (f.y0 == f.y1) f.y1 = f.y0 + 1.0;

  detail::svg_open(out);
  for (int i = 0; i < X.rows(); ++i)
    out << "<circle cx='" << f.px(X(i, col_x)) << "' cy='" << f.py(X(i, col_y))
        << "' r='3' fill='" << detail::svg_color(labels ? (*labels)[i] : 0)
        << "' fill-opacity='0.75'/>\n";
  out << "<text x='" << SvgFrame::W / 2 << "' y='" << SvgFrame::H - 8
      << "' text-anchor='middle' font-size='12'>" << x_name << "</text>\n"
      << "<text x='12' y='" << SvgFrame::H / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 12 " << SvgFrame::H / 2
      << ")'>" << y_name << "</text>\n";
  out << "</svg>\n";
}

}  // namespace epiclust

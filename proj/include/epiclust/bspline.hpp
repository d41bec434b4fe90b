#pragma once

#include "epiclust/types.hpp"

#include <Eigen/QR>

#include <sstream>
#include <vector>

namespace epiclust {

/// Cubic B-spline basis on an open uniform knot vector spanning a grid.
/// The boundary knots are repeated degree+1 times and the interior knots are
/// equispaced, so num_basis = interior_knots + degree + 1.
class BSplineBasis {
 public:
  static constexpr int kDegree = 3;

  BSplineBasis(double t0, double t1, int num_basis)
      : t0_(t0), t1_(t1), num_basis_(num_basis) {
    const int n_knots = num_basis_ + kDegree + 1;
    knots_.resize(n_knots);
    for (int i = 0; i <= kDegree; ++i) {
      knots_[i] = t0_;
      knots_[n_knots - 1 - i] = t1_;
    }
    const int n_interior = num_basis_ - kDegree - 1;
    for (int i = 0; i < n_interior; ++i)
      knots_[kDegree + 1 + i] = t0_ + (t1_ - t0_) * (i + 1) / (n_interior + 1);
  }

  int num_basis() const { return num_basis_; }
  int interior_knots() const { return num_basis_ - kDegree - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double domain_lo() const { return t0_; }
  double domain_hi() const { return t1_; }

  /// B_{i,3}(x) by Cox-de Boor recursion; the rightmost nonempty interval is
  /// treated as closed so the basis sums to one on the whole of [t0, t1].
  double eval(int i, double x) const { return eval_rec(i, kDegree, x); }

  double eval_d1(int i, double x) const {
    return kDegree * (safe_ratio(eval_rec(i, kDegree - 1, x), knots_[i + kDegree] - knots_[i]) -
                      safe_ratio(eval_rec(i + 1, kDegree - 1, x),
                                 knots_[i + kDegree + 1] - knots_[i + 1]));
  }

  double eval_d2(int i, double x) const {
    return kDegree * (safe_ratio(eval_d1_low(i, x), knots_[i + kDegree] - knots_[i]) -
                      safe_ratio(eval_d1_low(i + 1, x), knots_[i + kDegree + 1] - knots_[i + 1]));
  }

  /// Design matrix: rows are grid points, columns are basis functions.
  MatrixXd design(const Grid& grid, int deriv = 0) const {
    MatrixXd B(grid.size(), num_basis_);
    for (int r = 0; r < grid.size(); ++r)
      for (int c = 0; c < num_basis_; ++c)
        B(r, c) = deriv == 0   ? eval(c, grid.points[r])
                  : deriv == 1 ? eval_d1(c, grid.points[r])
                               : eval_d2(c, grid.points[r]);
    return B;
  }

 private:
  static double safe_ratio(double num, double den) { return den != 0.0 ? num / den : 0.0; }

  // derivative of the degree-2 basis, used inside eval_d2
  double eval_d1_low(int i, double x) const {
    const int p = kDegree - 1;
    return p * (safe_ratio(eval_rec(i, p - 1, x), knots_[i + p] - knots_[i]) -
                safe_ratio(eval_rec(i + 1, p - 1, x), knots_[i + p + 1] - knots_[i + 1]));
  }

  double eval_rec(int i, int p, double x) const {
    if (i < 0 || i + p + 1 >= static_cast<int>(knots_.size())) return 0.0;
    if (p == 0) {
      const double lo = knots_[i], hi = knots_[i + 1];
      if (lo == hi) return 0.0;
      if (x >= lo && x < hi) return 1.0;
      if (x == t1_ && hi == t1_) return 1.0;
      return 0.0;
    }
    double acc = 0.0;
    const double dl = knots_[i + p] - knots_[i];
    if (dl != 0.0) acc += (x - knots_[i]) / dl * eval_rec(i, p - 1, x);
    const double dr = knots_[i + p + 1] - knots_[i + 1];
    if (dr != 0.0) acc += (knots_[i + p + 1] - x) / dr * eval_rec(i + 1, p - 1, x);
    return acc;
  }

  double t0_, t1_;
  int num_basis_;
  std::vector<double> knots_;
};

inline BSplineBasis make_basis(const Grid& grid, int num_basis) {
  if (num_basis < 4 || num_basis > grid.size()) {
    std::ostringstream msg;
    msg << "make_basis: num_basis must lie in [4, " << grid.size() << "], got " << num_basis;
    throw std::invalid_argument(msg.str());
  }
  return BSplineBasis(grid.front(), grid.back(), num_basis);
}

/// Default basis dimension: max(4, floor(m/3)). Always user-overridable.
inline int default_basis_size(int m) { return std::max(4, m / 3); }

/// Smoothed sample together with its first and second derivatives, all
/// evaluated on the original grid. The derivatives come from the fitted
/// spline coefficients, not from finite differences.
struct SmoothedTriple {
  FunctionalSample data;
  FunctionalSample d1;
  FunctionalSample d2;
};

/// Least-squares fit of every curve onto the basis (QR factorization), then
/// evaluation of the fit and its derivatives on the input grid. Labels and
/// grid carry over untouched.
inline SmoothedTriple smooth(const FunctionalSample& sample, const BSplineBasis& basis) {
  if (basis.domain_lo() != sample.grid.front() || basis.domain_hi() != sample.grid.back())
    throw std::invalid_argument("smooth: basis domain does not match sample grid");
  if (basis.num_basis() > sample.m())
    throw std::invalid_argument("smooth: more basis functions than grid points");

  const MatrixXd B = basis.design(sample.grid, 0);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(B);
  if (qr.rank() < basis.num_basis()) {
    std::ostringstream msg;
    msg << "smooth: rank-deficient design matrix (rank " << qr.rank() << " of "
        << basis.num_basis() << ")";
    throw numerical_error(msg.str());
  }

  // coefficients, one column per curve
  const MatrixXd coef = qr.solve(sample.values.transpose());

  SmoothedTriple out;
  out.data = FunctionalSample{(B * coef).transpose(), sample.grid, sample.labels};
  out.d1 = FunctionalSample{(basis.design(sample.grid, 1) * coef).transpose(), sample.grid,
                            sample.labels};
  out.d2 = FunctionalSample{(basis.design(sample.grid, 2) * coef).transpose(), sample.grid,
                            sample.labels};
  return out;
}

inline SmoothedTriple smooth(const FunctionalSample& sample, int num_basis = 0) {
  if (num_basis == 0) num_basis = default_basis_size(sample.m());
  return smooth(sample, make_basis(sample.grid, num_basis));
}

}  // namespace epiclust

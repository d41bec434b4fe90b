#pragma once

#include "epiclust/rng.hpp"
#include "epiclust/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>
#include <vector>

namespace epiclust {

/// Exponential covariance c(s,t) = scale * exp(-|s-t| / length).
struct GPKernelSpec {
  double scale;
  double length;
};

namespace detail {

inline Eigen::LLT<MatrixXd> cholesky_with_jitter(MatrixXd C, double scale) {
  Eigen::LLT<MatrixXd> llt(C);
  double jitter = 1e-10 * scale;
  while (llt.info() != Eigen::Success && jitter <= 1e-6 * scale) {
    MatrixXd Cj = C;
    Cj.diagonal().array() += jitter;
    llt.compute(Cj);
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success)
    throw numerical_error("sample_gp: covariance Cholesky failed even with jitter");
  return llt;
}

}  // namespace detail

/// Draws `count` paths of a Gaussian process on the grid: row = mean + L z,
/// with L the (jitter-regularized) Cholesky factor of the covariance matrix
/// and z i.i.d. standard normal.
inline MatrixXd sample_gp(const VectorXd& mean, const GPKernelSpec& kernel, const Grid& grid,
                          int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_gp: count must be positive");
  const int m = grid.size();
  if (mean.size() != m) throw std::invalid_argument("sample_gp: mean length does not match grid");

  MatrixXd C(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      C(i, j) = kernel.scale * std::exp(-std::abs(grid.points[i] - grid.points[j]) / kernel.length);

  const auto llt = detail::cholesky_with_jitter(std::move(C), kernel.scale);
  const MatrixXd L = llt.matrixL();

  Rng rng(seed);
  MatrixXd out(count, m);
  VectorXd z(m);
  for (int r = 0; r < count; ++r) {
    for (int i = 0; i < m; ++i) z[i] = rng.normal();
    out.row(r) = (mean + L * z).transpose();
  }
  return out;
}

namespace detail {

inline VectorXd mean_on_grid(const Grid& grid, double (*f)(double)) {
  VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = f(grid.points[i]);
  return v;
}

inline double mean_peak_left(double t) { return 30.0 * std::pow(t, 1.5) * (1.0 - t); }
inline double mean_peak_right(double t) { return 30.0 * std::pow(t, 1.5) * (1.0 - t) * (1.0 - t); }

// orthonormal basis of L^2[0,1] driving the Karhunen-Loeve models
inline double kl_basis(int k, double t) {
  if (k == 1) return 1.0;
  if (k % 2 == 0) return std::sqrt(2.0) * std::sin(k * 3.14159265358979323846 * t);
  return std::sqrt(2.0) * std::cos((k - 1) * 3.14159265358979323846 * t);
}

inline double kl_rho(int k) {
  return k <= 3 ? 1.0 / (k + 1.0) : 1.0 / ((k + 1.0) * (k + 1.0));
}

}  // namespace detail

/// Models 1-9: Gaussian processes with the exponential covariance on 30
/// equispaced points over [0,1]. Models 2-4 shift the mean, 5-6 rescale the
/// noise, 7-8 swap in the rougher h(t) process, 8-9 change the mean shape.
inline FunctionalSample gen_model_1_9(int id, int count, std::uint64_t seed) {
  if (id < 1 || id > 9) throw std::invalid_argument("gen_model_1_9: id must lie in [1, 9]");
  const Grid grid = uniform_grid(30, 0.0, 1.0);
  const GPKernelSpec e_kernel{0.3, 0.3};
  const GPKernelSpec h_kernel{0.5, 0.2};

  VectorXd mean = detail::mean_on_grid(grid, detail::mean_peak_left);
  GPKernelSpec kernel = e_kernel;
  double amplitude = 1.0;
  switch (id) {
    case 1: break;
    case 2: mean.array() += 0.5; break;
    case 3: mean.array() += 0.75; break;
    case 4: mean.array() += 1.0; break;
    case 5: amplitude = 2.0; break;
    case 6: amplitude = 0.25; break;
    case 7: kernel = h_kernel; break;
    case 8:
      mean = detail::mean_on_grid(grid, detail::mean_peak_right);
      kernel = h_kernel;
      break;
    case 9: mean = detail::mean_on_grid(grid, detail::mean_peak_right); break;
  }

  MatrixXd noise = sample_gp(VectorXd::Zero(grid.size()), kernel, grid, count, seed);
  MatrixXd values = (amplitude * noise).rowwise() + mean.transpose();
  return FunctionalSample{std::move(values), grid, std::nullopt};
}

/// Models 10-12: 100-term Karhunen-Loeve expansions on 150 equispaced points
/// over [0,1], differing only in the mean curve.
inline FunctionalSample gen_model_10_12(int id, int count, std::uint64_t seed) {
  if (id < 10 || id > 12) throw std::invalid_argument("gen_model_10_12: id must lie in [10, 12]");
  constexpr int kTerms = 100;
  const Grid grid = uniform_grid(150, 0.0, 1.0);
  const int m = grid.size();

  MatrixXd theta(kTerms, m);
  VectorXd sqrt_rho(kTerms);
  for (int k = 1; k <= kTerms; ++k) {
    sqrt_rho[k - 1] = std::sqrt(detail::kl_rho(k));
    for (int j = 0; j < m; ++j) theta(k - 1, j) = detail::kl_basis(k, grid.points[j]);
  }

  VectorXd mean(m);
  for (int j = 0; j < m; ++j) {
    const double t = grid.points[j];
    mean[j] = t * (1.0 - t);
  }
  if (id == 11)
    for (int k = 1; k <= 3; ++k) mean += sqrt_rho[k - 1] * theta.row(k - 1).transpose();
  if (id == 12)
    for (int k = 4; k <= kTerms; ++k) mean += sqrt_rho[k - 1] * theta.row(k - 1).transpose();

  Rng rng(seed);
  MatrixXd values(count, m);
  VectorXd z(kTerms);
  for (int r = 0; r < count; ++r) {
    for (int k = 0; k < kTerms; ++k) z[k] = rng.normal();
    values.row(r) = (mean + theta.transpose() * (sqrt_rho.cwiseProduct(z))).transpose();
  }
  return FunctionalSample{std::move(values), grid, std::nullopt};
}

/// Models 13-21: deterministic shapes on 100 equispaced points over
/// [0, pi/3]. Each curve draws one vertical shift (a ~ U(-1/4, 1/4) or
/// b ~ U(-1/2, 1/2)) and adds observation noise eps ~ N(2, 0.4^2) at every
/// grid point.
inline FunctionalSample gen_model_13_21(int id, int count, std::uint64_t seed) {
  if (id < 13 || id > 21) throw std::invalid_argument("gen_model_13_21: id must lie in [13, 21]");
  constexpr double kPi = 3.14159265358979323846;
  const Grid grid = uniform_grid(100, 0.0, kPi / 3.0);
  const int m = grid.size();

  VectorXd shape(m);
  for (int j = 0; j < m; ++j) {
    const double t = grid.points[j];
    const double t3 = t * t * t;
    switch (id) {
      case 13: shape[j] = std::sin(1.3 * t) / 1.3 + t3 + 0.3; break;
      case 14: shape[j] = std::sin(1.3 * t) / 1.2 + t3 + 1.0; break;
      case 15: shape[j] = std::sin(1.3 * t) / 4.0 + t3 + 0.2; break;
      case 16: shape[j] = std::sin(1.5 * kPi * t) + std::cos(kPi * t * t) + 1.1; break;
      case 17: shape[j] = std::sin(1.7 * kPi * t) + std::cos(kPi * t * t) + 1.5; break;
      case 18: shape[j] = std::sin(1.9 * kPi * t) + std::cos(kPi * t * t) + 2.2; break;
      case 19: shape[j] = std::exp(1.1 * t) / 1.8 - t3; break;
      case 20: shape[j] = std::exp(1.4 * t) / 1.7 - t3; break;
      case 21: shape[j] = std::exp(1.5 * t) / 1.5 - t3; break;
    }
  }

  const bool uses_b = id >= 16 && id <= 18;
  Rng rng(seed);
  MatrixXd values(count, m);
  for (int r = 0; r < count; ++r) {
    const double offset = uses_b ? rng.uniform(-0.5, 0.5) : rng.uniform(-0.25, 0.25);
    for (int j = 0; j < m; ++j) values(r, j) = shape[j] + offset + rng.normal(2.0, 0.4);
  }
  return FunctionalSample{std::move(values), grid, std::nullopt};
}

inline FunctionalSample gen_model(int id, int count, std::uint64_t seed) {
  if (id >= 1 && id <= 9) return gen_model_1_9(id, count, seed);
  if (id >= 10 && id <= 12) return gen_model_10_12(id, count, seed);
  if (id >= 13 && id <= 21) return gen_model_13_21(id, count, seed);
  throw std::invalid_argument("gen_model: id must lie in [1, 21]");
}

/// A named scenario: which models, how many curves per group, plus the
/// default combination driving cluster-count selection.
struct ScenarioSpec {
  std::string name;
  std::vector<int> models;
  int per_group = 50;
  std::string default_combo;

  int k() const { return static_cast<int>(models.size()); }
  int n() const { return per_group * k(); }
};

inline const std::vector<ScenarioSpec>& scenario_catalog() {
  static const std::vector<ScenarioSpec> catalog = {
      {"S 1-2", {1, 2}, 50, "_d.MEI"},
      {"S 1-3", {1, 3}, 50, "_.EIHI"},
      {"S 1-4", {1, 4}, 50, "_.EIHI"},
      {"S 1-5", {1, 5}, 50, "_.EIHI"},
      {"S 1-6", {1, 6}, 50, "_.EIHI"},
      {"S 1-7", {1, 7}, 50, "_.EIHI"},
      {"S 1-8", {1, 8}, 50, "_dd2.MEI"},
      {"S 1-9", {1, 9}, 50, "_d2.MEI"},
      {"S 10-11", {10, 11}, 50, "dd2.MEI"},
      {"S 10-12", {10, 12}, 50, "dd2.MEI"},
      {"S 13-14-15", {13, 14, 15}, 50, "_dd2.MEI"},
      {"S 16-17-18", {16, 17, 18}, 50, "_d2.MEI"},
      {"S 19-20-21", {19, 20, 21}, 50, "dd2.MEI"},
  };
  return catalog;
}

inline const ScenarioSpec& scenario_by_name(const std::string& name) {
  for (const auto& s : scenario_catalog())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

/// Concatenates one group per model with labels 0, 1, ... in group order.
/// Group sub-seeds are derived from the master seed, so adding groups never
/// perturbs earlier ones.
inline FunctionalSample gen_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.models.empty()) throw std::invalid_argument("gen_scenario: no models");
  std::vector<FunctionalSample> groups;
  groups.reserve(spec.models.size());
  for (std::size_t g = 0; g < spec.models.size(); ++g)
    groups.push_back(gen_model(spec.models[g], spec.per_group, derive_seed(seed, g)));

  const Grid& grid = groups.front().grid;
  for (const auto& gsample : groups)
    if (!(gsample.grid == grid))
      throw std::invalid_argument("gen_scenario: models live on different grids");

  MatrixXd values(spec.n(), grid.size());
  std::vector<int> labels(spec.n());
  int row = 0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i = 0; i < spec.per_group; ++i, ++row) {
      values.row(row) = groups[g].values.row(i);
      labels[row] = static_cast<int>(g);
    }
  return FunctionalSample{std::move(values), grid, std::move(labels)};
}

inline FunctionalSample gen_scenario(const std::string& name, std::uint64_t seed) {
  return gen_scenario(scenario_by_name(name), seed);
}

}  // namespace epiclust

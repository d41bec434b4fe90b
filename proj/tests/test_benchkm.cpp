#include <catch2/catch_amalgamated.hpp>

#include "epiclust/fkmeans.hpp"
#include "epiclust/fpca.hpp"
#include "epiclust/metrics.hpp"
#include "epiclust/simgen.hpp"
#include "epiclust/tbkmeans.hpp"

#include <cmath>

using namespace epiclust;

namespace {

FunctionalSample constant_groups(int per_group, double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  const Grid grid = uniform_grid(30, 0.0, 1.0);
  MatrixXd values(2 * per_group, 30);
  std::vector<int> labels(2 * per_group);
  for (int i = 0; i < 2 * per_group; ++i) {
    const double level = (i < per_group ? lo : hi) + 0.05 * rng.normal();
    labels[i] = i < per_group ? 0 : 1;
    for (int j = 0; j < 30; ++j) values(i, j) = level + 0.02 * rng.normal();
  }
  return FunctionalSample{values, grid, labels};
}

// transcription of the parallelism statistic, kept textually independent of
// the implementation (plain loops, 1-based indexing like the displayed formula)
double T_oracle(const std::vector<double>& xi, int m) {
  const int r = static_cast<int>(xi.size());
  const int half = (m - 1) / 2;
  std::vector<std::vector<double>> cells(r);
  for (int j = 0; j < r; ++j)
    for (int s = std::max(0, j - half); s <= std::min(r - 1, j + half); ++s)
      cells[j].push_back(xi[s]);

  double grand = 0.0;
  int total = 0;
  for (const auto& cell : cells)
    for (double v : cell) {
      grand += v;
      ++total;
    }
  grand /= total;

  double mst = 0.0, mse = 0.0;
  for (const auto& cell : cells) {
    double mean = 0.0;
    for (double v : cell) mean += v;
    mean /= static_cast<double>(cell.size());
    mst += static_cast<double>(cell.size()) * (mean - grand) * (mean - grand);
    for (double v : cell) mse += (v - mean) * (v - mean);
  }
  mst /= r - 1;
  mse /= total - r;

  double tau2 = 0.0;
  for (int s = 2; s <= r - 2; ++s) {  // 1-based in the formula
    const double a = xi[s - 1] - xi[s - 2];
    const double b = xi[s + 1] - xi[s];
    tau2 += a * a * b * b;
  }
  tau2 /= 4.0 * (r - 3);

  return std::abs(std::sqrt(static_cast<double>(r)) * (mst - mse) /
                  (std::sqrt(tau2) * std::sqrt(2.0 * m * (2.0 * m - 1) / (3.0 * (m - 1)))));
}

}  // namespace

TEST_CASE("fpca eigenfunctions are orthonormal under grid quadrature") {
  const FunctionalSample s = gen_model(1, 40, 17);
  const FPCADecomposition pca = fpca(s);

  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      const double ip = pca.inner(pca.eigenfunctions.col(a), pca.eigenfunctions.col(b));
      CHECK(ip == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-8));
    }
  for (int l = 1; l < pca.components(); ++l)
    CHECK(pca.eigenvalues[l] <= pca.eigenvalues[l - 1] + 1e-12);
  CHECK(pca.eigenvalues.minCoeff() >= 0.0);
}

TEST_CASE("fpca reconstructs sample curves from the full spectrum") {
  const FunctionalSample s = gen_model(1, 25, 18);
  const FPCADecomposition pca = fpca(s);

  for (int i = 0; i < 5; ++i) {
    const VectorXd centered = s.values.row(i).transpose() - pca.mean;
    VectorXd recon = VectorXd::Zero(s.m());
    for (int l = 0; l < pca.components(); ++l) {
      if (pca.eigenvalues[l] < 1e-12 * pca.eigenvalues[0]) break;
      recon += pca.inner(centered, pca.eigenfunctions.col(l)) * pca.eigenfunctions.col(l);
    }
    CHECK((recon - centered).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("L2 distance of sin vs zero matches the analytic integral") {
  const Grid grid = uniform_grid(1000, 0.0, 1.0);
  VectorXd sin_curve(1000), zero = VectorXd::Zero(1000);
  for (int j = 0; j < 1000; ++j)
    sin_curve[j] = std::sin(2.0 * 3.14159265358979323846 * grid.points[j]);
  CHECK(l2_distance(sin_curve, zero, trapezoid_weights(grid)) ==
        Catch::Approx(std::sqrt(0.5)).margin(1e-3));
}

TEST_CASE("duplicate curves are at distance zero under both metrics") {
  const FunctionalSample s = gen_model(1, 10, 3);
  const VectorXd w = trapezoid_weights(s.grid);
  CHECK(l2_distance(s.values.row(2).transpose(), s.values.row(2).transpose(), w) == 0.0);

  const FPCADecomposition pca = fpca(s);
  const VectorXd diff = VectorXd::Zero(s.m());
  double acc = 0.0;
  for (int l = 0; l < 3; ++l) {
    const double score = pca.inner(diff, pca.eigenfunctions.col(l));
    acc += score * score / pca.eigenvalues[l];
  }
  CHECK(acc == 0.0);
}

TEST_CASE("fkmeans recovers constant-level groups under both distances") {
  const FunctionalSample s = constant_groups(15, 0.0, 10.0, 21);
  for (const auto& dist : {FKMeansDistance::l2(), FKMeansDistance::truncated(2)}) {
    FKMeansOptions opts;
    opts.seed = 5;
    const auto res = fkmeans(s, 2, dist, opts);
    CHECK(rand_index(res.partition, *s.labels) == 1.0);
  }
}

TEST_CASE("fkmeans objective is non-increasing and d_K rejects a flat spectrum") {
  const FunctionalSample s = gen_scenario("S 1-4", 9);
  FKMeansOptions opts;
  opts.seed = 2;
  opts.restarts = 1;
  for (const auto& dist : {FKMeansDistance::l2(), FKMeansDistance::truncated(3)}) {
    const auto res = fkmeans(s, 2, dist, opts);
    for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
      CHECK(res.objective_trace[t] <= res.objective_trace[t - 1] + 1e-9);
  }

  // rank-1 sample: second eigenvalue is numerically zero
  const Grid grid = uniform_grid(20, 0.0, 1.0);
  MatrixXd flat(6, 20);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 20; ++j) flat(i, j) = i * grid.points[j];
  const FunctionalSample rank1{flat, grid, std::nullopt};
  CHECK_THROWS_AS(fkmeans(rank1, 2, FKMeansDistance::truncated(5), opts), numerical_error);
}

TEST_CASE("d_K behaves like a pseudo-metric") {
  const FunctionalSample s = gen_model(1, 20, 55);
  const FPCADecomposition pca = fpca(s);
  const int K = 3;
  auto dk = [&](int i, int j) {
    const VectorXd diff = (s.values.row(i) - s.values.row(j)).transpose();
    double acc = 0.0;
    for (int l = 0; l < K; ++l) {
      const double score = pca.inner(diff, pca.eigenfunctions.col(l));
      acc += score * score / pca.eigenvalues[l];
    }
    return std::sqrt(acc);
  };

  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const int a = rng.uniform_int(20), b = rng.uniform_int(20), c = rng.uniform_int(20);
    CHECK(dk(a, a) == 0.0);
    CHECK(dk(a, b) == Catch::Approx(dk(b, a)));
    CHECK(dk(a, c) <= dk(a, b) + dk(b, c) + 1e-9);
  }
}

TEST_CASE("W vanishes on identical curves and grows with a mean shift") {
  const Grid grid = uniform_grid(100, 0.0, 1.0);
  VectorXd curve(100);
  Rng rng(12);
  for (int j = 0; j < 100; ++j) curve[j] = std::sin(4.0 * grid.points[j]) + 0.1 * rng.normal();

  CHECK(tb_mean_W(curve, curve) == 0.0);

  // constant shift: T stays small (parallel), W scales like sqrt(r) * shift
  const VectorXd shifted = curve.array() + 1.0;
  const TBConfig config;
  const double T_shift = tb_parallelism_T(shifted, curve, config);
  const double W_shift = tb_mean_W(shifted, curve);
  CHECK(T_shift < config.gamma);
  const double pooled = std::sqrt((2.0 * (curve.array() - curve.mean()).square().sum() / 99.0) / 100.0);
  CHECK(W_shift == Catch::Approx(1.0 / pooled).epsilon(1e-9));
  CHECK(W_shift > 10.0);

  // degenerate pair: both sides constant
  const VectorXd c1 = VectorXd::Constant(100, 2.0);
  CHECK_THROWS_AS(tb_mean_W(c1, c1), numerical_error);
}

TEST_CASE("T matches an independent transcription on random residual streams") {
  Rng rng(314);
  const TBConfig config;
  double mean_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> xi(100);
    VectorXd curve(100), center = VectorXd::Zero(100);
    for (int j = 0; j < 100; ++j) {
      xi[j] = rng.normal();
      curve[j] = xi[j];
    }
    const double mine = tb_parallelism_T(curve, center, config);
    const double oracle = T_oracle(xi, config.window);
    CHECK(mine == Catch::Approx(oracle).margin(1e-10));
    mean_gap += mine - oracle;
  }
  CHECK(std::abs(mean_gap / 1000.0) <= 0.1);
}

TEST_CASE("allocation scores follow the three displayed branches") {
  const double gamma = 1.65;

  SECTION("parallel to several centers, means discriminate: use W") {
    const std::vector<double> T = {0.5, 0.8, 3.0};  // two below gamma
    const std::vector<double> W = {0.2, 5.0, 9.0};  // one below gamma
    CHECK(tb_allocation_scores(T, W, gamma) == W);
  }

  SECTION("means equal at several centers, parallelism discriminates: use T") {
    const std::vector<double> T = {0.5, 4.0, 5.0};  // one below gamma
    const std::vector<double> W = {0.3, 0.9, 7.0};  // two below gamma
    CHECK(tb_allocation_scores(T, W, gamma) == T);
  }

  SECTION("otherwise blend the normalized statistics") {
    const std::vector<double> T = {0.5, 1.0, 4.0};  // two below
    const std::vector<double> W = {0.3, 0.9, 7.0};  // two below
    const auto psi = tb_allocation_scores(T, W, gamma);
    for (int p = 0; p < 3; ++p)
      CHECK(psi[p] == Catch::Approx(0.5 * T[p] / 4.0 + 0.5 * W[p] / 7.0));
  }
}

TEST_CASE("tb_kmeans basics") {
  SECTION("k = 1 is the trivial cluster") {
    const FunctionalSample s = constant_groups(5, 0.0, 1.0, 2);
    const auto res = tb_kmeans(s, 1, InitKind::Forgy, TBConfig{}, 3);
    for (int a : res.partition.assign) CHECK(a == 0);
  }

  SECTION("assignments are invariant under a common shift") {
    const FunctionalSample s = gen_scenario("S 13-14-15", 77);
    FunctionalSample shifted = s;
    shifted.values.array() += 42.0;
    for (InitKind init : {InitKind::Forgy, InitKind::KMeansPlusPlus, InitKind::Ward}) {
      const auto a = tb_kmeans(s, 3, init, TBConfig{}, 11);
      const auto b = tb_kmeans(shifted, 3, init, TBConfig{}, 11);
      CHECK(rand_index(a.partition, b.partition) == 1.0);
    }
  }

  SECTION("three parallel families are recovered") {
    // Models 13-15 shape with small noise: vertically offset parallel groups
    Rng rng(31);
    const Grid grid = uniform_grid(100, 0.0, 1.0);
    MatrixXd values(60, 100);
    std::vector<int> labels(60);
    for (int i = 0; i < 60; ++i) {
      const int g = i / 20;
      labels[i] = g;
      const double offset = 3.0 * g + 0.05 * rng.normal();
      for (int j = 0; j < 100; ++j)
        values(i, j) = std::sin(3.0 * grid.points[j]) + offset + 0.05 * rng.normal();
    }
    const FunctionalSample s{values, grid, labels};
    double mean_ri = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto res = tb_kmeans(s, 3, InitKind::KMeansPlusPlus, TBConfig{}, seed);
      mean_ri += rand_index(res.partition, labels);
    }
    CHECK(mean_ri / 10.0 >= 0.9);
  }
}

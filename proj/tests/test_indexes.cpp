#include <catch2/catch_amalgamated.hpp>

#include "epiclust/indexes.hpp"
#include "epiclust/rng.hpp"

#include <set>

using namespace epiclust;

namespace {

FunctionalSample nested_sample() {
  // three strictly nested curves x1 < x2 < x3 everywhere
  const Grid grid = uniform_grid(5, 0.0, 1.0);
  MatrixXd values(3, 5);
  for (int j = 0; j < 5; ++j) {
    values(0, j) = 0.0 + 0.1 * j;
    values(1, j) = 1.0 + 0.1 * j;
    values(2, j) = 2.0 + 0.1 * j;
  }
  return FunctionalSample{values, grid, std::nullopt};
}

FunctionalSample random_sample(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd values(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) values(i, j) = rng.normal();
  return FunctionalSample{values, uniform_grid(m, 0.0, 1.0), std::nullopt};
}

// brute-force transcription of the MEI definition, O(n^2 m) double loop
VectorXd mei_oracle(const FunctionalSample& s) {
  const int n = s.n(), m = s.m();
  VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    long long above = 0;
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < m; ++t)
        if (s.values(j, t) >= s.values(i, t)) ++above;
    out[i] = 1.0 - static_cast<double>(above) / (static_cast<double>(n) * m);
  }
  return out;
}

}  // namespace

TEST_CASE("nested curves have the rank closed forms") {
  const FunctionalSample s = nested_sample();

  const VectorXd ei = compute_index(IndexKind::EI, s);
  const VectorXd hi = compute_index(IndexKind::HI, s);
  const VectorXd mei = compute_index(IndexKind::MEI, s);
  const VectorXd mhi = compute_index(IndexKind::MHI, s);

  CHECK(ei[0] == 0.0);
  CHECK(ei[1] == Catch::Approx(1.0 / 3.0));
  CHECK(ei[2] == Catch::Approx(2.0 / 3.0));
  CHECK(hi[0] == Catch::Approx(1.0 / 3.0));
  CHECK(hi[1] == Catch::Approx(2.0 / 3.0));
  CHECK(hi[2] == 1.0);

  // no crossings: modified versions coincide with the plain ones
  CHECK((mei - ei).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mhi - hi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("MEI matches the brute-force count exactly") {
  const FunctionalSample s = random_sample(5, 7, 1234);
  const VectorXd mei = compute_index(IndexKind::MEI, s);
  const VectorXd oracle = mei_oracle(s);
  CHECK((mei - oracle).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("MHI - MEI = 1/n on tie-free samples") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 3 + static_cast<int>(seed % 8);
    const FunctionalSample s = random_sample(n, 11, 500 + seed);
    const VectorXd mei = compute_index(IndexKind::MEI, s);
    const VectorXd mhi = compute_index(IndexKind::MHI, s);
    CHECK(((mhi - mei).array() - 1.0 / n).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("indexes stay inside [0, 1] and the minimum curve has EI 0") {
  const FunctionalSample s = random_sample(12, 9, 77);
  FunctionalSample with_min = s;
  with_min.values.row(0) = s.values.colwise().minCoeff();

  for (IndexKind k : {IndexKind::EI, IndexKind::HI, IndexKind::MEI, IndexKind::MHI}) {
    const VectorXd v = compute_index(k, with_min);
    CHECK(v.minCoeff() >= 0.0);
    CHECK(v.maxCoeff() <= 1.0);
  }
  CHECK(compute_index(IndexKind::EI, with_min)[0] == 0.0);
}

TEST_CASE("adding a common curve leaves every index unchanged") {
  const FunctionalSample s = random_sample(8, 10, 4321);
  FunctionalSample shifted = s;
  for (int j = 0; j < s.m(); ++j) {
    const double g = std::sin(2.0 * j) + 0.3 * j;
    shifted.values.col(j).array() += g;
  }
  for (IndexKind k : {IndexKind::EI, IndexKind::HI, IndexKind::MEI, IndexKind::MHI}) {
    CHECK((compute_index(k, s) - compute_index(k, shifted)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("strictly increasing transforms leave every index unchanged") {
  const FunctionalSample s = random_sample(8, 10, 999);
  FunctionalSample warped = s;
  warped.values = warped.values.unaryExpr([](double v) { return std::exp(0.5 * v) + v; });
  for (IndexKind k : {IndexKind::EI, IndexKind::HI, IndexKind::MEI, IndexKind::MHI}) {
    CHECK((compute_index(k, s) - compute_index(k, warped)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("combo parsing and printing round-trip") {
  for (const char* name : {"_.EIHI", "d.EIHI", "d2.EIHI", "_d.MEI", "dd2.MEI", "_dd2.EIHIMEI",
                           "_d2.EIHIMEI", "_dd2.MEI"}) {
    CHECK(parse_combo(name).name() == name);
  }
  CHECK_THROWS_AS(parse_combo("d.MEI"), std::invalid_argument);       // single-source MEI
  CHECK_THROWS_AS(parse_combo("d_.EIHI"), std::invalid_argument);     // out of canonical order
  CHECK_THROWS_AS(parse_combo("_.BOGUS"), std::invalid_argument);
  CHECK_THROWS_AS(parse_combo("EIHI"), std::invalid_argument);
}

TEST_CASE("the combination catalog holds exactly the eighteen sets") {
  const auto combos = enumerate_combos();
  REQUIRE(combos.size() == 18);

  std::set<std::string> names;
  for (const auto& c : combos) names.insert(c.name());
  CHECK(names.size() == 18);
  CHECK(names.count("_.EIHI") == 1);
  CHECK(names.count("dd2.MEI") == 1);
  CHECK(names.count("_dd2.EIHIMEI") == 1);

  for (const auto& name : names) {
    const ComboSpec c = parse_combo(name);
    if (!c.with_eihi) CHECK(c.sources.size() >= 2);  // no single-source MEI rows
  }
}

TEST_CASE("feature columns follow the documented order and match compute_index") {
  const Grid grid = uniform_grid(6, 0.0, 1.0);
  MatrixXd base(4, 6);
  Rng rng(5150);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) base(i, j) = rng.normal();

  SmoothedTriple triple;
  triple.data = FunctionalSample{base, grid, std::nullopt};
  triple.d1 = FunctionalSample{2.0 * base, grid, std::nullopt};
  triple.d2 = FunctionalSample{-base, grid, std::nullopt};

  const FeatureMatrix fm = assemble_features(triple, parse_combo("_dd2.EIHIMEI"));
  REQUIRE(fm.p() == 9);
  const std::vector<std::pair<IndexKind, DataSource>> expected = {
      {IndexKind::EI, DataSource::Data}, {IndexKind::HI, DataSource::Data},
      {IndexKind::MEI, DataSource::Data}, {IndexKind::EI, DataSource::D1},
      {IndexKind::HI, DataSource::D1},   {IndexKind::MEI, DataSource::D1},
      {IndexKind::EI, DataSource::D2},   {IndexKind::HI, DataSource::D2},
      {IndexKind::MEI, DataSource::D2}};
  for (int c = 0; c < 9; ++c) {
    CHECK(fm.columns[c].kind == expected[c].first);
    CHECK(fm.columns[c].source == expected[c].second);
    const VectorXd direct =
        compute_index(expected[c].first, select_source(triple, expected[c].second));
    CHECK((fm.values.col(c) - direct).cwiseAbs().maxCoeff() == 0.0);
  }

  const FeatureMatrix two = assemble_features(triple, parse_combo("dd2.MEI"));
  REQUIRE(two.p() == 2);
  CHECK(two.columns[0].source == DataSource::D1);
  CHECK(two.columns[1].source == DataSource::D2);
  CHECK(two.columns[0].kind == IndexKind::MEI);
}

TEST_CASE("admissibility follows the covariance determinant rule") {
  FeatureMatrix fm;
  fm.combo = parse_combo("_d.MEI");

  SECTION("independent unit-variance columns pass") {
    // +-1 columns: zero correlation, rescaled to unbiased variance 1
    MatrixXd v(4, 2);
    v << 1, 1, 1, -1, -1, 1, -1, -1;
    fm.values = v * std::sqrt(3.0 / 4.0);
    const auto adm = admissible(fm);
    CHECK(adm.ok);
    CHECK(adm.det == Catch::Approx(1.0));
  }

  SECTION("constant column fails") {
    MatrixXd v(5, 2);
    v.col(0).setConstant(0.5);
    v.col(1) << 0.1, 0.9, 0.4, 0.2, 0.7;
    fm.values = v;
    const auto adm = admissible(fm);
    CHECK_FALSE(adm.ok);
    CHECK(adm.reason == "ill-conditioned");
  }

  SECTION("duplicated column fails") {
    Rng rng(31);
    MatrixXd v(6, 2);
    for (int i = 0; i < 6; ++i) v(i, 0) = rng.uniform();
    v.col(1) = v.col(0);
    fm.values = v;
    CHECK_FALSE(admissible(fm).ok);
  }

  SECTION("too few rows are flagged") {
    fm.values = MatrixXd::Random(2, 2);
    const auto adm = admissible(fm);
    CHECK_FALSE(adm.ok);
    CHECK(adm.reason == "insufficient rows");
  }
}

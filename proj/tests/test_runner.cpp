#include <catch2/catch_amalgamated.hpp>

#include "epiclust/csv.hpp"
#include "epiclust/names.hpp"
#include "epiclust/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace epiclust;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("method names round-trip, including dotted tokens") {
  for (const char* name :
       {"kmeans._d.MEI", "ward.D2._dd2.EIHIMEI", "single._.EIHI", "kkmeans.dd2.MEI",
        "spc._d2.MEI", "centroid.dd2.EIHIMEI", "average.d.EIHI", "complete._d2.EIHIMEI"}) {
    CHECK(parse_method_name(name).str() == name);
  }
  CHECK_THROWS_AS(parse_method_name("bogus._.EIHI"), std::invalid_argument);
  CHECK_THROWS_AS(parse_method_name("kmeans"), std::invalid_argument);
  CHECK_THROWS_AS(parse_method_name("kmeans._.XYZ"), std::invalid_argument);
}

TEST_CASE("csv ingestion handles the documented layouts") {
  SECTION("growth-style file: numeric increasing header, 93 curves") {
    TempFile tmp("epiclust_growth.csv");
    {
      std::ofstream out(tmp.path);
      for (int j = 0; j < 31; ++j) out << (j ? "," : "") << 1.0 + 17.0 * j / 30.0;
      out << "\n";
      for (int i = 0; i < 93; ++i) {
        for (int j = 0; j < 31; ++j) out << (j ? "," : "") << 70.0 + i + 3.0 * j;
        out << "\n";
      }
    }
    const FunctionalSample s = ingest_csv(tmp.path);
    CHECK(s.n() == 93);
    CHECK(s.m() == 31);
    CHECK(s.grid.front() == 1.0);
    CHECK(s.grid.back() == 18.0);
    CHECK_FALSE(s.labels.has_value());
  }

  SECTION("label column is extracted and removed from the grid") {
    TempFile tmp("epiclust_labeled.csv");
    {
      std::ofstream out(tmp.path);
      out << "0,1,2,3,label\n";
      out << "0.0,0.5,1.0,1.5,0\n";
      out << "2.0,2.5,3.0,3.5,1\n";
      out << "4.0,4.5,5.0,5.5,1\n";
    }
    const FunctionalSample s = ingest_csv(tmp.path);
    CHECK(s.n() == 3);
    CHECK(s.m() == 4);
    REQUIRE(s.labels.has_value());
    CHECK(*s.labels == std::vector<int>{0, 1, 1});
  }

  SECTION("ragged rows are rejected with the row number") {
    TempFile tmp("epiclust_ragged.csv");
    {
      std::ofstream out(tmp.path);
      out << "1,2,3,4\n5,6,7,8\n9,10,11\n";
    }
    CHECK_THROWS_WITH(ingest_csv(tmp.path), Catch::Matchers::ContainsSubstring("row 3"));
  }

  SECTION("non-numeric cells are rejected with the location") {
    TempFile tmp("epiclust_nonnum.csv");
    {
      std::ofstream out(tmp.path);
      out << "1,2,3,4\n5,oops,7,8\n1,2,3,4\n";
    }
    CHECK_THROWS_WITH(ingest_csv(tmp.path, CsvHeader::None),
                      Catch::Matchers::ContainsSubstring("column 2"));
  }

  SECTION("samples round-trip through write and ingest") {
    const FunctionalSample s = gen_scenario("S 1-2", 5);
    TempFile tmp("epiclust_roundtrip.csv");
    write_sample_csv(s, tmp.path);
    const FunctionalSample back = ingest_csv(tmp.path);
    CHECK(back.n() == s.n());
    CHECK(back.m() == s.m());
    REQUIRE(back.labels.has_value());
    CHECK(*back.labels == *s.labels);
    CHECK((back.values - s.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.grid.points == s.grid.points);
  }
}

TEST_CASE("the method grid holds the ten documented cells") {
  const auto grid = default_method_grid();
  REQUIRE(grid.size() == 10);
  int hier = 0, km = 0, kk = 0, sp = 0;
  for (const auto& g : grid) {
    if (is_hierarchical(g.method)) ++hier;
    if (g.method == ClusterMethod::KMeans) ++km;
    if (g.method == ClusterMethod::KKMeans) ++kk;
    if (g.method == ClusterMethod::Spectral) ++sp;
  }
  CHECK(hier == 5);
  CHECK(km == 2);
  CHECK(kk == 2);
  CHECK(sp == 1);
}

TEST_CASE("small scenario runs are deterministic and well-formed") {
  RunConfig config;
  config.scenario = "S 1-4";
  config.reps = 2;
  config.seed = 99;
  config.threads = 1;
  config.combos = {"_.EIHI", "dd2.MEI"};
  config.methods = {"kmeans", "ward.D2"};
  config.restarts = 3;

  const RunReport a = run_scenario(config);
  const RunReport b = run_scenario(config);

  REQUIRE(a.rows.size() == b.rows.size());
  // 2 combos x (kmeans euclidean + kmeans mahalanobis + ward.D2) = 6 rows
  CHECK(a.rows.size() == 6);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].full_name() == b.rows[i].full_name());
    CHECK(a.rows[i].variant == b.rows[i].variant);
    CHECK(a.rows[i].purity == b.rows[i].purity);
    CHECK(a.rows[i].rand == b.rows[i].rand);
  }

  // rows are RI-ranked with NA rows last, and every name round-trips
  bool seen_na = false;
  double prev = 2.0;
  for (const auto& row : a.rows) {
    if (row.is_na()) {
      seen_na = true;
    } else {
      CHECK_FALSE(seen_na);
      CHECK(row.rand <= prev);
      prev = row.rand;
      CHECK(row.rand >= 0.0);
      CHECK(row.rand <= 1.0);
      CHECK(row.purity >= 0.0);
      CHECK(row.purity <= 1.0);
    }
    CHECK(parse_method_name(row.full_name()).str() == row.full_name());
  }
}

TEST_CASE("combo filter narrows the report to one family") {
  RunConfig config;
  config.scenario = "S 1-2";
  config.reps = 1;
  config.seed = 4;
  config.threads = 1;
  config.combos = {"dd2.MEI"};
  config.methods = {"kmeans:euclidean"};
  config.restarts = 2;

  const RunReport report = run_scenario(config);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].combo == "dd2.MEI");
  CHECK(report.rows[0].variant == "euclidean");
}

TEST_CASE("select-k histogram counts sum to the replications") {
  RunConfig config;
  config.scenario = "S 1-4";
  config.reps = 3;
  config.seed = 11;
  config.threads = 1;
  config.restarts = 3;
  config.candidates = {2, 3, 4};

  const SelectKReport report = select_k_scenario(config);
  int total = 0;
  for (int c : report.counts) total += c;
  CHECK(total == config.reps);
  CHECK(report.combo == "_.EIHI");

  const SelectKReport again = select_k_scenario(config);
  CHECK(report.counts == again.counts);
}

TEST_CASE("bench harness covers both comparison methods") {
  RunConfig config;
  config.scenario = "S 1-4";
  config.reps = 1;
  config.seed = 21;
  config.threads = 1;

  const RunReport report = run_bench(config);
  REQUIRE(report.rows.size() == 7);
  std::vector<std::string> names;
  for (const auto& row : report.rows) names.push_back(row.method_token);
  for (const char* required : {"fkm-L2", "fkm-dK:2", "fkm-dK:3", "tbkm-kmeans++", "tbkm-hclust",
                               "tbkm-random", "tbkm-kmeans"})
    CHECK(std::find(names.begin(), names.end(), required) != names.end());

  for (const auto& row : report.rows)
    if (!row.is_na()) {
      CHECK(row.rand >= 0.0);
      CHECK(row.rand <= 1.0);
    }
}

TEST_CASE("single run on an ingested dataset reports metrics") {
  const FunctionalSample s = gen_scenario("S 1-4", 31);
  RunConfig config;
  config.seed = 8;
  config.restarts = 3;
  const SingleRunResult res = run_single(s, parse_method_name("kmeans._.EIHI"), 2, config);
  REQUIRE(res.eval.has_value());
  CHECK(res.eval->rand >= 0.0);
  CHECK(res.partition.k == 2);
  CHECK(static_cast<int>(res.partition.assign.size()) == 100);
}

TEST_CASE("report serialization") {
  RunConfig config;
  config.scenario = "S 1-2";
  config.reps = 1;
  config.seed = 2;
  config.threads = 1;
  config.combos = {"_.EIHI"};
  config.methods = {"kmeans"};
  config.restarts = 2;
  const RunReport report = run_scenario(config);

  const std::string table = format_report_table(report);
  CHECK(table.find("kmeans._.EIHI") != std::string::npos);
  CHECK(table.find("Purity") != std::string::npos);

  TempFile tmp("epiclust_report.csv");
  write_report_csv(report, tmp.path);
  std::ifstream in(tmp.path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "method,variant,combo,purity,fmeasure,rand_index,time_seconds,n_ok,note");
}

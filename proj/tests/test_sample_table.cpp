#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "fdcate/dgp.hpp"
#include "fdcate/sample_table.hpp"
#include "test_support.hpp"

using namespace fdcate;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

CsvSchema schema_c1() {
  CsvSchema s;
  s.c_cols = {"c1"};
  return s;
}

std::string load_error(const std::filesystem::path& p, const CsvSchema& s) {
  try {
    load_csv(p, s);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_csv reads a minimal well-formed file") {
  test::TempDir dir("csv");
  write_text(dir / "a.csv", "c1,x,z,y\n0.5,0,1,2.5\n-1,1,0,3\n2,1,1,-0.25\n");
  const SampleTable t = load_csv(dir / "a.csv", schema_c1());
  CHECK(t.rows() == 3);
  CHECK(t.covariate_dim() == 1);
  CHECK(t.x() == std::vector<int>{0, 1, 1});
  CHECK(t.z() == std::vector<int>{1, 0, 1});
  CHECK(t.y()[2] == -0.25);
  CHECK(t.c()(1, 0) == -1.0);
}

TEST_CASE("load_csv accepts columns in any order and ignores extra columns") {
  test::TempDir dir("csv");
  write_text(dir / "a.csv", "y,id,treat,c1,med\n1.5,7,1,0.25,0\n");
  CsvSchema s = schema_c1();
  s.x_col = "treat";
  s.z_col = "med";
  const SampleTable t = load_csv(dir / "a.csv", s);
  CHECK(t.x()[0] == 1);
  CHECK(t.z()[0] == 0);
  CHECK(t.y()[0] == 1.5);
  CHECK(t.c()(0, 0) == 0.25);
}

TEST_CASE("load_csv names the row and column of a non-binary treatment") {
  test::TempDir dir("csv");
  write_text(dir / "a.csv", "c1,x,z,y\n0,0,0,0\n0,1,0,0\n0,0,1,0\n0,1,1,0\n0,2,0,0\n0,0,0,0\n");
  const std::string msg = load_error(dir / "a.csv", schema_c1());
  CHECK(msg.find("row 5") != std::string::npos);
  CHECK(msg.find("'x'") != std::string::npos);
}

TEST_CASE("load_csv rejects missing, non-numeric and non-finite cells") {
  test::TempDir dir("csv");
  write_text(dir / "missing.csv", "c1,x,z,y\n0,0,0,1\n0,1,,1\n");
  CHECK(load_error(dir / "missing.csv", schema_c1()).find("missing value at row 2, column 'z'") != std::string::npos);
  write_text(dir / "text.csv", "c1,x,z,y\nabc,0,0,1\n");
  CHECK(load_error(dir / "text.csv", schema_c1()).find("non-numeric") != std::string::npos);
  write_text(dir / "nan.csv", "c1,x,z,y\n0,0,0,nan\n");
  CHECK(load_error(dir / "nan.csv", schema_c1()).find("non-finite") != std::string::npos);
  write_text(dir / "inf.csv", "c1,x,z,y\n0,0,0,1\n0,0,0,1e999\n");
  CHECK(load_error(dir / "inf.csv", schema_c1()).find("row 2") != std::string::npos);
  write_text(dir / "short.csv", "c1,x,z,y\n0,0,0\n");
  CHECK_FALSE(load_error(dir / "short.csv", schema_c1()).empty());
  write_text(dir / "header.csv", "c1,x,y\n0,0,1\n");
  CHECK(load_error(dir / "header.csv", schema_c1()).find("'z'") != std::string::npos);
  write_text(dir / "empty.csv", "c1,x,z,y\n");
  CHECK_FALSE(load_error(dir / "empty.csv", schema_c1()).empty());
  CHECK_THROWS_AS(load_csv(dir / "absent.csv", schema_c1()), DataError);
  CsvSchema no_c;
  CHECK_THROWS_AS(load_csv(dir / "missing.csv", no_c), DataError);
}

TEST_CASE("SampleTable enforces its invariants") {
  RowMatrix c(2, 1);
  c << 0.0, 1.0;
  CHECK_THROWS_AS(SampleTable(c, {0, 2}, {0, 1}, {0.0, 1.0}), DataError);
  CHECK_THROWS_AS(SampleTable(c, {0, 1}, {0, 1}, {0.0}), DataError);
  CHECK_THROWS_AS(SampleTable(c, {0, 1}, {0, 1}, {0.0, std::nan("")}), DataError);
  RowMatrix bad = c;
  bad(1, 0) = INFINITY;
  CHECK_THROWS_AS(SampleTable(bad, {0, 1}, {0, 1}, {0.0, 1.0}), DataError);
}

TEST_CASE("generated data round-trips through CSV bit for bit") {
  test::TempDir dir("csv");
  DgpSpec spec = test::default_spec(1000, 11);
  const SampleTable t = sample(spec).table;
  write_csv(t, dir / "d.csv");
  const SampleTable back = load_csv(dir / "d.csv", default_schema(t));
  REQUIRE(back.rows() == 1000);
  REQUIRE(back.covariate_dim() == 10);
  CHECK(std::memcmp(back.c().data(), t.c().data(), sizeof(double) * 10000) == 0);
  CHECK(std::memcmp(back.y().data(), t.y().data(), sizeof(double) * 1000) == 0);
  CHECK(back.x() == t.x());
  CHECK(back.z() == t.z());

  // Writing the reloaded table reproduces the file byte for byte.
  write_csv(back, dir / "e.csv");
  std::ifstream a(dir / "d.csv"), b(dir / "e.csv");
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("subset copies rows in the requested order") {
  const SampleTable t = sample(test::default_spec(10, 3)).table;
  const std::vector<std::size_t> idx{7, 2};
  const SampleTable s = t.subset(idx);
  CHECK(s.rows() == 2);
  CHECK(s.y()[0] == t.y()[7]);
  CHECK(s.c()(1, 4) == t.c()(2, 4));
}

TEST_CASE("make_folds balances folds and is deterministic") {
  SUBCASE("n=4, K=2") {
    const FoldPlan p = make_folds(4, 2, 99);
    CHECK(p.fold_sizes() == std::vector<std::size_t>{2, 2});
  }
  SUBCASE("n=5, K=3") {
    auto sizes = make_folds(5, 3, 99).fold_sizes();
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 2, 2});
  }
  SUBCASE("repeat call") {
    CHECK(make_folds(37, 3, 5).assignments == make_folds(37, 3, 5).assignments);
    CHECK(make_folds(37, 3, 5).assignments != make_folds(37, 3, 6).assignments);
  }
  SUBCASE("all n <= 100, K in {2,3}") {
    for (int k = 2; k <= 3; ++k) {
      for (std::size_t n = static_cast<std::size_t>(k); n <= 100; ++n) {
        const FoldPlan p = make_folds(n, k, n * 31 + static_cast<std::size_t>(k));
        const auto sizes = p.fold_sizes();
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*hi - *lo <= 1);
        CHECK(p.rows_in(0).size() + p.rows_not_in(0).size() == n);
        CHECK(make_folds(n, k, n * 31 + static_cast<std::size_t>(k)).assignments == p.assignments);
      }
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS(make_folds(2, 3, 0));
    CHECK_THROWS(make_folds(10, 1, 0));
  }
}

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "hts/errors.hpp"
#include "hts/frame.hpp"

using namespace hts;

namespace {

std::string write_temp(const std::string &name, const std::string &content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

HierarchySpec two_leaf() {
  return HierarchySpec::from_nodes(
      {{"T", 0, std::nullopt}, {"a", 1, "T"}, {"b", 1, "T"}});
}

// Weekly calendar under the fixed 52-week convention, starting 2006 week 52.
std::string dengue_calendar_csv() {
  std::string s = "year,week,a,b\n";
  int year = 2006, week = 52;
  int rows = 0;
  while (true) {
    s += std::to_string(year) + "," + std::to_string(week) + "," +
         std::to_string(rows % 7) + "," + std::to_string((rows * 3) % 11) + "\n";
    ++rows;
    if (year == 2020 && week == 52) break;
    if (++week > 52) { week = 1; ++year; }
  }
  return s;
}

}  // namespace

TEST_CASE("ingest a 2-leaf file and aggregate totals") {
  auto path = write_temp("hts_two_leaf.csv", "year,week,a,b\n2001,1,1,2\n2001,2,3,4\n");
  auto h = two_leaf();
  auto frame = ingest_csv(path, h, 52);
  REQUIRE(frame.rows() == 2);
  auto S = build_summing_matrix(h);
  auto full = aggregate_frame(frame, S);
  CHECK(full.col("T")(0) == 3.0);
  CHECK(full.col("T")(1) == 7.0);
  CHECK(check_coherence(full.values(), S, 1e-12).pass);
}

TEST_CASE("ingest errors") {
  auto h = two_leaf();
  SUBCASE("missing leaf column is named") {
    auto path = write_temp("hts_missing.csv", "year,week,a\n2001,1,1\n");
    try {
      ingest_csv(path, h, 52);
      FAIL("expected error");
    } catch (const DataError &e) {
      CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
  }
  SUBCASE("non-numeric cell") {
    auto path = write_temp("hts_nonnum.csv", "year,week,a,b\n2001,1,1,x\n");
    CHECK_THROWS_AS(ingest_csv(path, h, 52), DataError);
  }
  SUBCASE("calendar gap") {
    auto path = write_temp("hts_gap.csv", "year,week,a,b\n2001,1,1,2\n2001,3,3,4\n");
    CHECK_THROWS_AS(ingest_csv(path, h, 52), DataError);
  }
  SUBCASE("negative count") {
    auto path = write_temp("hts_neg.csv", "year,week,a,b\n2001,1,-1,2\n");
    CHECK_THROWS_AS(ingest_csv(path, h, 52), DataError);
  }
  SUBCASE("unknown column") {
    auto path = write_temp("hts_extra.csv", "year,week,a,b,zz\n2001,1,1,2,3\n");
    CHECK_THROWS_AS(ingest_csv(path, h, 52), DataError);
  }
}

TEST_CASE("missing Sri Lanka district is reported by name") {
  auto spec = HierarchySpec::load_csv(std::string(HTS_DATA_DIR) + "/sri_lanka_hierarchy.csv");
  std::string header = "year,week";
  for (const auto &leaf : spec.bottom_order())
    if (leaf != "COL") header += "," + leaf;
  auto path = write_temp("hts_no_col.csv", header + "\n");
  try {
    ingest_csv(path, spec, 52);
    FAIL("expected error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("COL") != std::string::npos);
  }
}

TEST_CASE("the 2006w52..2020w52 span holds 729 weekly rows") {
  auto path = write_temp("hts_dengue_cal.csv", dengue_calendar_csv());
  auto frame = ingest_csv(path, two_leaf(), 52);
  CHECK(frame.rows() == 729);  // 1 + 14 * 52
  CHECK(frame.start().year == 2006);
  CHECK(frame.start().idx == 52);
  CHECK(frame.pos_at(frame.rows() - 1).year == 2020);
  CHECK(frame.pos_at(frame.rows() - 1).idx == 52);
}

TEST_CASE("paper training windows on the dengue calendar") {
  auto path = write_temp("hts_dengue_cal.csv", dengue_calendar_csv());
  auto frame = ingest_csv(path, two_leaf(), 52);

  SUBCASE("TS4: train 2016-2018, test 2019 has 52 steps") {
    SplitSpec ts4{"TS4", {2016, 1}, {2018, 52}, {2019, 1}, {2019, 52}};
    auto [train, test] = split(frame, ts4);
    CHECK(test.rows() == 52);
    CHECK(train.rows() == 3 * 52);
  }
  SUBCASE("TS1: train 2006w52-2019, test 2020; windows tile the frame") {
    SplitSpec ts1{"TS1", {2006, 52}, {2019, 52}, {2020, 1}, {2020, 52}};
    auto [train, test] = split(frame, ts1);
    // 52-week convention: 1 + 13*52 = 677 training weeks (the real ISO
    // calendar would add two 53rd weeks).
    CHECK(train.rows() == 677);
    CHECK(test.rows() == 52);
    CHECK(train.rows() + test.rows() == frame.rows());
  }
  SUBCASE("empty test window is rejected") {
    SplitSpec bad{"bad", {2016, 1}, {2020, 52}, {2021, 1}, {2021, 52}};
    CHECK_THROWS_AS(split(frame, bad), DataError);
  }
  SUBCASE("train must end before test starts") {
    SplitSpec bad{"bad", {2016, 1}, {2019, 10}, {2019, 5}, {2019, 52}};
    CHECK_THROWS_AS(split(frame, bad), DataError);
  }
}

TEST_CASE("split concatenation reproduces the window") {
  auto path = write_temp("hts_two_leaf_long.csv", [] {
    std::string s = "year,week,a,b\n";
    for (int i = 0; i < 104; ++i)
      s += std::to_string(2001 + i / 52) + "," + std::to_string(i % 52 + 1) + "," +
           std::to_string(i) + "," + std::to_string(2 * i) + "\n";
    return s;
  }());
  auto frame = ingest_csv(path, two_leaf(), 52);
  SplitSpec sp{"S", {2001, 1}, {2002, 10}, {2002, 11}, {2002, 52}};
  auto [train, test] = split(frame, sp);
  REQUIRE(train.rows() + test.rows() == frame.rows());
  Eigen::MatrixXd joined(frame.rows(), 2);
  joined << train.values(), test.values();
  CHECK((joined - frame.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("temporal_aggregate") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;

  SUBCASE("pairs sum") {
    Eigen::VectorXd out = temporal_aggregate(x, 2);
    REQUIRE(out.size() == 2);
    CHECK(out(0) == 3.0);
    CHECK(out(1) == 7.0);
  }
  SUBCASE("k=1 is the identity") {
    CHECK((temporal_aggregate(x, 1) - x).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("leading remainder dropped") {
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 5;
    Eigen::VectorXd out = temporal_aggregate(y, 2);
    REQUIRE(out.size() == 2);
    CHECK(out(0) == 5.0);
    CHECK(out(1) == 9.0);
  }
  SUBCASE("k > T is an error") {
    CHECK_THROWS_AS(temporal_aggregate(x, 5), DataError);
  }
  SUBCASE("block sums plus dropped prefix preserve the total") {
    stats::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      int n = rng.uniform_int(1, 40);
      int k = rng.uniform_int(1, n);
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = rng.uniform_int(0, 20);
      Eigen::VectorXd out = temporal_aggregate(v, k);
      double dropped = v.head(n % k).sum();
      CHECK(out.sum() + dropped == v.sum());  // integer data: exact
    }
  }
}

TEST_CASE("split spec file parsing") {
  auto path = write_temp("hts_splits.csv",
                         "name,train_start,train_end,test_start,test_end\n"
                         "TS4,2016-01,2018-52,2019-01,2019-52\n");
  auto specs = load_split_specs(path);
  REQUIRE(specs.size() == 1);
  CHECK(specs[0].name == "TS4");
  CHECK(specs[0].train_start.year == 2016);
  CHECK(specs[0].test_end.idx == 52);
  CHECK_THROWS_AS(parse_calendar_token("2019"), DataError);
}

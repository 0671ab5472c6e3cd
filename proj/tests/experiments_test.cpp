#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

#include "bpdiag/experiments.hpp"

namespace bpdiag {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bpdiag_experiments_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_tree(const fs::path& out, int threads) {
  RunConfig c;
  c.experiment = "tree-sweep";
  c.seed = 99;
  c.samples = 150;
  c.n_min = 3;
  c.n_max = 7;
  c.n_step = 2;
  c.bootstrap_resamples = 20;
  c.threads = threads;
  c.out_dir = out.string();
  return c;
}

TEST(FormatDouble, RoundTripsAndNonFinite) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, HeaderAndRowColumnsLineUp) {
  CsvRow row;
  row.experiment = "example1";
  row.dim1 = 4;
  row.dim2 = 2;
  row.dim3 = 4;
  row.n_samples = 100;
  row.var_grad = 0.5;
  row.seed = 7;
  const std::string line = format_csv_row(row);
  const std::string header = csv_header();
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_EQ(line.substr(0, 20), "example1,,4,2,4,100,");
  EXPECT_EQ(line.substr(line.size() - 2), ",7");
}

TEST(DeriveSeed, DependsOnEveryInput) {
  const auto a = derive_seed(1, "tree-sweep", 5);
  EXPECT_EQ(a, derive_seed(1, "tree-sweep", 5));
  EXPECT_NE(a, derive_seed(2, "tree-sweep", 5));
  EXPECT_NE(a, derive_seed(1, "example1", 5));
  EXPECT_NE(a, derive_seed(1, "tree-sweep", 7));
}

TEST(RunConfig, ValidationRejectsBadValues) {
  RunConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.samples = 99;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.n_max = 15;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dims = {{3, 2, 4}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dims2 = {256};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.experiment = "nope";
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(ok.to_json()["samples"], 4096);
}

TEST(TreeSweep, CsvIsByteIdenticalAcrossThreadCounts) {
  const auto d1 = scratch("t1"), d3 = scratch("t3");
  const auto c1 = small_tree(d1, 1), c3 = small_tree(d3, 3);
  write_outputs(c1, run_tree_sweep(c1));
  write_outputs(c3, run_tree_sweep(c3));
  const std::string a = slurp(d1 / "tree-sweep.csv"), b = slurp(d3 / "tree-sweep.csv");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), csv_header());
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 4);  // header + n = 3, 5, 7
  const auto j = nlohmann::json::parse(slurp(d1 / "tree-sweep.json"));
  EXPECT_EQ(j["config"]["seed"], 99);
  EXPECT_TRUE(j.contains("fits"));
  EXPECT_TRUE(j.contains("version"));
  fs::remove_all(d1);
  fs::remove_all(d3);
}

TEST(TreeSweep, PairDumpHasOneLinePerSample) {
  const auto dir = scratch("pairs");
  auto c = small_tree(dir, 1);
  c.n_max = 3;
  c.dump_pairs = true;
  run_tree_sweep(c);
  const std::string pairs = slurp(dir / "pairs_n3.csv");
  EXPECT_EQ(pairs.substr(0, pairs.find('\n')), "t_plus,t_minus");
  EXPECT_EQ(std::count(pairs.begin(), pairs.end(), '\n'), 151);
  fs::remove_all(dir);
}

TEST(Example1Run, ReportsClosedFormAndBothComparisons) {
  RunConfig c;
  c.experiment = "example1";
  c.samples = 300;
  c.bootstrap_resamples = 20;
  c.threads = 1;
  c.dims = {{2, 2, 4}, {4, 2, 4}};
  const auto r = run_example1(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[1].dim1, 4);
  const auto& e = r.summary["entries"][1];
  EXPECT_NEAR(e["closed_form"]["one_minus_r_exact"].get<double>(), 16.0 / 39, 1e-14);
  EXPECT_TRUE(e["dimension_constraint_d2_le_d3_half"].get<bool>());
  int comparisons = 0;
  for (const auto& ch : r.checks) {
    comparisons += ch.name.rfind("mc_vs_exact_moments_", 0) == 0 || ch.name.rfind("mc_vs_displayed_ratio_", 0) == 0;
  }
  EXPECT_EQ(comparisons, 4);
}

TEST(Example2Run, ExactValuesAttachedForSmallDimensions) {
  RunConfig c;
  c.experiment = "example2";
  c.samples = 300;
  c.bootstrap_resamples = 20;
  c.threads = 1;
  c.dims2 = {4, 8};
  const auto r = run_example2(c);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& e : r.summary["entries"]) {
    ASSERT_TRUE(e.contains("exact"));
    EXPECT_NEAR(e["exact"]["r"].get<double>(), e["exact"]["trace_pairing_r"].get<double>(), 1e-10);
  }
}

}  // namespace
}  // namespace bpdiag

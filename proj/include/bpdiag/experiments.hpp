#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpdiag/diagnostics.hpp"

namespace bpdiag {

/// Resolved settings for one CLI run.
struct RunConfig {
  std::string experiment = "tree-sweep";
  std::uint64_t seed = 1234;
  std::size_t samples = 4096;
  int n_min = 3;
  int n_max = 13;
  int n_step = 2;
  /// (d1, d2, d3) register dimensions for example1; powers of two.
  std::vector<std::array<int, 3>> dims{{4, 2, 4}, {8, 2, 4}, {16, 2, 4}};
  /// Hilbert-space dimensions for example2; powers of two.
  std::vector<int> dims2{4, 8, 16, 32};
  std::string out_dir = "results";
  bool dump_pairs = false;
  int threads = 0;
  int bootstrap_resamples = 200;
  /// Sample counts of the verify suite's Haar-moment and bound checks.
  std::size_t haar_samples = 100000;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
};

/// One line of the results CSV. Empty optionals are written as empty fields.
struct CsvRow {
  std::string experiment;
  std::optional<int> n, dim1, dim2, dim3;
  std::size_t n_samples = 0;
  std::optional<double> var_grad, var_grad_se, second_moment, second_moment_se, r, one_minus_r, one_minus_r_se,
      identity_z;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string format_csv_row(const CsvRow& row);
/// Shortest round-trip representation ("%.17g"); non-finite values as nan/inf/-inf.
std::string format_double(double v);

/// Named pass/fail outcome with the quantity it was decided on.
struct CheckOutcome {
  std::string name;
  bool passed = false;
  double value = 0;
  double threshold = 0;
  std::string detail;
};
nlohmann::json to_json(const CheckOutcome& c);
nlohmann::json to_json(const GradientStatsReport& r);
nlohmann::json to_json(const SlopeFit& f);

struct RunResult {
  std::vector<CsvRow> rows;
  nlohmann::json summary;
  std::vector<CheckOutcome> checks;
  bool passed() const;
};

/// Per-(experiment, n) master seed derived from the configured seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view experiment, int n);

RunResult run_tree_sweep(const RunConfig& config);
RunResult run_example1(const RunConfig& config);
RunResult run_example2(const RunConfig& config);

/// Writes <out>/<experiment>.csv, <out>/<experiment>.json and, for tree-sweep with
/// dump_pairs, <out>/pairs_n<n>.csv (produced during the run). Creates <out>.
void write_outputs(const RunConfig& config, const RunResult& result);
void write_pairs(const std::string& path, const std::vector<ShiftTriple>& triples);

std::string version_string();

}  // namespace bpdiag

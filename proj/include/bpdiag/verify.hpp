#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpdiag/experiments.hpp"
#include "bpdiag/weingarten.hpp"

namespace bpdiag {

struct VerifyOptions {
  std::uint64_t seed = 1234;
  /// Monte-Carlo samples for the bound and identity suites.
  std::size_t samples = 4096;
  /// Haar samples per (k, d) in the moment suite.
  std::size_t haar_samples = 100000;
  int threads = 0;
  WeingartenProvider provider = weingarten_table_allow_singular;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckOutcome> checks;
  bool passed() const;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
  std::vector<std::string> failed_suites() const;
  nlohmann::json to_json() const;
};

/// Pauli algebra and reduced-state quantities against dense and brute-force oracles.
SuiteResult suite_pauli_oracles(const VerifyOptions& options);
/// Closed forms, normalization, class-function property and trace identities of Wg tables.
SuiteResult suite_weingarten_tables(const VerifyOptions& options);
/// Moment formula against Haar Monte-Carlo, k in {2,3,4}, d in {k..6}.
SuiteResult suite_haar_moments(const VerifyOptions& options);
/// Partial-transpose contraction identities and agreement of the two exact routes.
SuiteResult suite_example2_exact(const VerifyOptions& options);
/// Observable-concentration, information-loss and batch bounds.
SuiteResult suite_bounds(const VerifyOptions& options);
/// Variance decomposition identity on the shipped circuit families.
SuiteResult suite_variance_identity(const VerifyOptions& options);

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace bpdiag

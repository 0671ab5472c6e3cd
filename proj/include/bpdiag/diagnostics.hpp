#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bpdiag/circuits.hpp"
#include "bpdiag/pauli.hpp"
#include "bpdiag/randomness.hpp"
#include "bpdiag/simulator.hpp"

namespace bpdiag {

/// Cost at the two shifted parameter values and at the unshifted one.
struct ShiftTriple {
  double t_plus = 0;
  double t_minus = 0;
  double t_center = 0;
};

/// t_pm at params +- (pi / 4u) e_probe and t_center at params. The circuit prefix
/// before the probe gate is simulated once and shared by all three branches.
ShiftTriple shift_eval(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks);

/// One draw from a circuit ensemble: structure, parameters and resolved Haar blocks.
struct CircuitDraw {
  Circuit circuit;
  std::vector<double> params;
  HaarBlocks blocks;
};

struct Ensemble {
  std::string name;
  int n_qubits = 0;
  /// False when the probe angle is pinned; the second moment is then pooled
  /// over the shifted evaluations only.
  bool translation_invariant = true;
  std::function<CircuitDraw(Rng&)> draw;
};

/// Tree circuit with fresh rotation axes and uniform angles per draw.
Ensemble tree_ensemble(int n);
/// Haar V on H1 H2, exp(-i theta Z) on H2, Haar U on H2 H3; uniform theta.
Ensemble example1_ensemble(int n1, int n2, int n3);
/// U^dagger exp(-i theta Z_0) U on a tilted input with theta = 0; observable Z on the last qubit.
Ensemble example2_ensemble(int n);
/// Fixed structure; every symbolic parameter uniform on [0, 2pi).
Ensemble fixed_circuit_ensemble(Circuit circuit, std::string name);

struct SamplingOptions {
  int threads = 1;
  int bootstrap_resamples = 200;
};

struct Estimate {
  double value = 0;
  double se = 0;
};

struct GradientStatsReport {
  std::string ensemble;
  int n_qubits = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double u = 0;
  bool pooled_center = true;
  Estimate var_grad;
  Estimate second_moment;
  Estimate cross_moment;
  Estimate corr_r;
  Estimate one_minus_r;
  Estimate mean_center;
  double identity_residual = 0;
  /// Residual of var_grad = 2u^2 (1 - r) second_moment over its bootstrap stderr.
  double identity_z = 0;
};

inline constexpr std::size_t kMinSamples = 100;

/// Sample i uses the stream SeedSpec{seed, i}; results do not depend on the thread count.
std::vector<ShiftTriple> sample_triples(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                        int threads = 1);

/// Aggregates triples. With pool_center the second moment is mean (t+^2 + t-^2 + tc^2)/3,
/// otherwise mean (t+^2 + t-^2)/2. Standard errors come from a paired bootstrap.
GradientStatsReport summarize_triples(const std::vector<ShiftTriple>& triples, double u, bool pool_center,
                                      std::uint64_t seed, int bootstrap_resamples = 200);

GradientStatsReport estimate_stats(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                   const SamplingOptions& options = {});
/// Same, also returning the raw triples.
GradientStatsReport estimate_stats(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                   const SamplingOptions& options, std::vector<ShiftTriple>& triples_out);

/// Bound comparisons report margin_z = (bound - measured) / stderr; holds iff margin_z >= -3.
inline constexpr double kBoundSigma = 3.0;

struct OcBoundResult {
  Estimate lhs;  // E[Tr(g rho)^2]
  Estimate rhs;  // (2/3)^|A| E[D_HS^2(rho_A)]
  double margin_z = 0;
  bool holds = false;
  int support_size = 0;
  std::size_t n_samples = 0;
};

/// Appends a random single-qubit Clifford to every qubit of each final state,
/// then compares E<g>^2 with (2/3)^{|A|} E[D_HS^2(rho_A)], A = supp(g).
OcBoundResult check_oc_bound(const Ensemble& ensemble, const PauliString& g, std::size_t n_samples,
                             std::uint64_t seed, const SamplingOptions& options = {});

/// (1 + xX + yY + zZ) / 2; requires x^2 + y^2 + z^2 <= 1.
Eigen::Matrix2cd density_from_bloch(double x, double y, double z);
/// Exact average over the 24 single-qubit Cliffords C of Tr(C rho C^dagger P)^2, P in {X, Y, Z}.
double clifford_twirled_square(const Eigen::Matrix2cd& rho, char axis);

struct BatchBoundTerm {
  QubitSet gamma;
  double norm_sq = 0;  // ||B_j||_2^2
  Estimate bound;
};

struct BatchBoundResult {
  Estimate var_grad;
  Estimate total_bound;
  std::vector<BatchBoundTerm> batches;
  double ratio = 0;  // var_grad / total_bound
  double margin_z = 0;
  bool holds = false;
  std::size_t n_samples = 0;
};

inline constexpr int kMaxLightCone = 10;

/// Per sample: run to the probe gate (the cut), scramble with random single-qubit
/// Cliffords, record the effective deviation of every batch light cone, finish the
/// shifted circuits, scramble again and measure H = sum of all batches.
/// The bound of batch j is u^2 ||B_j||_2^2 2^{|Gamma_j|+2} E[D^2(rho_Gamma_j)].
/// Batches must be non-empty and may not share Pauli strings.
BatchBoundResult batch_bound(const Ensemble& ensemble, const std::vector<std::vector<PauliTerm>>& batches,
                             std::size_t n_samples, std::uint64_t seed, const SamplingOptions& options = {});

/// batch_bound with a single batch.
BatchBoundResult check_info_loss_bound(const Ensemble& ensemble, const std::vector<PauliTerm>& observable,
                                       std::size_t n_samples, std::uint64_t seed, const SamplingOptions& options = {});

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double slope_se = 0;
  std::size_t n_points = 0;
};

/// OLS of log10(value) against n.
SlopeFit slope_fit(const std::vector<double>& n, const std::vector<double>& values);

}  // namespace bpdiag

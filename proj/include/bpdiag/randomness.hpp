#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace bpdiag {

/// (master seed, stream id) -> generator state is a pure function.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// Counter-mode derived 64-bit generator; satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(SeedSpec seed);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();
  double normal();
  /// Uniform integer on [0, n).
  int below(int n);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for stream derivation.
std::uint64_t mix64(std::uint64_t x);

/// m i.i.d. angles uniform on [0, 2pi).
std::vector<double> sample_uniform_angles(std::size_t m, Rng& rng);

/// Haar-random unitary: complex Ginibre matrix, QR, and phase fix R_ii / |R_ii|.
Eigen::MatrixXcd sample_haar(int dim, Rng& rng);

/// The 24 single-qubit Cliffords modulo global phase; entry 0 is the identity.
const std::array<Eigen::Matrix2cd, 24>& single_qubit_cliffords();

/// Index into single_qubit_cliffords(), uniform over the 24 classes.
int sample_single_qubit_clifford_index(Rng& rng);
Eigen::Matrix2cd sample_single_qubit_clifford(Rng& rng);

}  // namespace bpdiag

#include "bpdiag/randomness.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace bpdiag {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(SeedSpec seed) {
  // Two rounds so that nearby (master, stream) pairs land far apart.
  const std::uint64_t a = mix64(seed.master_seed);
  const std::uint64_t b = mix64(a ^ mix64(seed.stream_id ^ 0xD1B54A32D192ED03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double Rng::uniform01() {
  // 53 random mantissa bits: exactly representable, strictly below 1.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

int Rng::below(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::below: n must be positive");
  return std::uniform_int_distribution<int>(0, n - 1)(engine_);
}

std::vector<double> sample_uniform_angles(std::size_t m, Rng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(m);
  for (auto& a : out) {
    a = two_pi * rng.uniform01();
    if (a >= two_pi) a = 0.0;
  }
  return out;
}

Eigen::MatrixXcd sample_haar(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sample_haar: dim must be >= 1");
  Eigen::MatrixXcd z(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) z(i, j) = std::complex<double>(rng.normal(), rng.normal()) * std::sqrt(0.5);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const std::complex<double> rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0 ? rjj / mag : std::complex<double>(1.0, 0.0);
  }
  return q;
}

namespace {

Eigen::Matrix2cd strip_phase(const Eigen::Matrix2cd& m) {
  for (int k = 0; k < 4; ++k) {
    const std::complex<double> v = m(k % 2, k / 2);
    if (std::abs(v) > 1e-9) return m * (std::abs(v) / v);
  }
  return m;
}

std::array<Eigen::Matrix2cd, 24> build_clifford_table() {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd hadamard;
  hadamard << h, h, h, -h;
  Eigen::Matrix2cd phase;
  phase << 1, 0, 0, std::complex<double>(0, 1);

  std::vector<Eigen::Matrix2cd> found{Eigen::Matrix2cd::Identity()};
  std::deque<Eigen::Matrix2cd> frontier{Eigen::Matrix2cd::Identity()};
  while (!frontier.empty()) {
    const Eigen::Matrix2cd cur = frontier.front();
    frontier.pop_front();
    for (const auto& gen : {hadamard, phase}) {
      const Eigen::Matrix2cd next = strip_phase(gen * cur);
      bool seen = false;
      for (const auto& f : found) seen = seen || (f - next).cwiseAbs().maxCoeff() < 1e-9;
      if (!seen) {
        found.push_back(next);
        frontier.push_back(next);
      }
    }
  }
  if (found.size() != 24) throw std::logic_error("single-qubit Clifford closure did not yield 24 elements");
  std::array<Eigen::Matrix2cd, 24> out;
  for (std::size_t i = 0; i < 24; ++i) out[i] = found[i];
  return out;
}

}  // namespace

const std::array<Eigen::Matrix2cd, 24>& single_qubit_cliffords() {
  static const std::array<Eigen::Matrix2cd, 24> table = build_clifford_table();
  return table;
}

int sample_single_qubit_clifford_index(Rng& rng) { return rng.below(24); }

Eigen::Matrix2cd sample_single_qubit_clifford(Rng& rng) {
  return single_qubit_cliffords()[static_cast<std::size_t>(sample_single_qubit_clifford_index(rng))];
}

}  // namespace bpdiag

#include "bpdiag/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace bpdiag {

namespace {

void check_qubit(const StateVector& state, int q) {
  if (q < 0 || q >= state.n_qubits()) throw std::out_of_range("qubit index out of range");
}

// Basis offsets for every assignment of the given (ordered) qubits.
std::vector<std::size_t> subset_offsets(std::span<const int> qubits) {
  const std::size_t count = std::size_t{1} << qubits.size();
  std::vector<std::size_t> out(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
      if ((i >> j) & 1) off |= std::size_t{1} << qubits[j];
    }
    out[i] = off;
  }
  return out;
}

// Basis offsets for every assignment of the qubits outside `mask`.
std::vector<std::size_t> complement_offsets(int n_qubits, std::uint64_t mask) {
  QubitSet rest;
  for (int q = 0; q < n_qubits; ++q) {
    if (((mask >> q) & 1) == 0) rest.push_back(q);
  }
  return subset_offsets(rest);
}

std::uint64_t checked_mask(const StateVector& state, std::span<const int> qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) {
    check_qubit(state, q);
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (mask & bit) throw std::invalid_argument("duplicate qubit in list");
    mask |= bit;
  }
  return mask;
}

// Phase s(c) with P|c> = s(c) |c ^ x>.
Complex pauli_phase(std::uint64_t c, std::uint64_t x, std::uint64_t z) {
  static constexpr Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int k = std::popcount(x & z) + 2 * (std::popcount(c & z) & 1);
  return i_pow[k % 4];
}

}  // namespace

char axis_char(Axis axis) {
  switch (axis) {
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    case Axis::Z: return 'Z';
  }
  return '?';
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes, std::nullptr_t)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes, double tol)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("StateVector: bad qubit count");
  if (amps_.size() != (std::size_t{1} << n_qubits)) throw std::invalid_argument("StateVector: length is not 2^n");
  if (std::abs(norm() - 1.0) > tol) throw std::invalid_argument("StateVector: not normalized");
}

StateVector StateVector::basis(int n_qubits, std::string_view bits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("basis state: bad qubit count");
  if (bits.size() != static_cast<std::size_t>(n_qubits)) throw std::invalid_argument("basis state: length mismatch");
  std::size_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= std::size_t{1} << q;
    } else if (bits[q] != '0') {
      throw std::invalid_argument("basis state: bits must be 0 or 1");
    }
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0, 0});
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps), nullptr);
}

StateVector StateVector::zero(int n_qubits) { return basis(n_qubits, std::string(static_cast<std::size_t>(n_qubits), '0')); }

StateVector init_basis_state(int n_qubits, std::string_view bits) { return StateVector::basis(n_qubits, bits); }

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void apply_matrix_1q(StateVector& state, const Eigen::Matrix2cd& m, int qubit) {
  check_qubit(state, qubit);
  auto amps = state.amplitudes();
  const std::size_t stride = std::size_t{1} << qubit;
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a0 = amps[i];
      const Complex a1 = amps[i + stride];
      amps[i] = m00 * a0 + m01 * a1;
      amps[i + stride] = m10 * a0 + m11 * a1;
    }
  }
}

void apply_rotation_1q(StateVector& state, Axis axis, int qubit, double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  Eigen::Matrix2cd m;
  switch (axis) {
    case Axis::X: m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0); break;
    case Axis::Y: m << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0); break;
    case Axis::Z: m << Complex(c, -s), Complex(0, 0), Complex(0, 0), Complex(c, s); break;
  }
  apply_matrix_1q(state, m, qubit);
}

void apply_pauli_rotation(StateVector& state, const PauliString& generator, double angle) {
  if (generator.n_qubits() != state.n_qubits()) throw std::invalid_argument("apply_pauli_rotation: size mismatch");
  auto amps = state.amplitudes();
  const double c = std::cos(angle);
  const Complex mis(0, -std::sin(angle));  // -i sin
  const std::uint64_t x = generator.x_mask();
  const std::uint64_t z = generator.z_mask();
  if (x == 0) {
    // Diagonal: eigenvalue (-1)^{|c&z|}.
    const Complex plus(c, -std::sin(angle));
    const Complex minus(c, std::sin(angle));
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= (std::popcount(i & z) & 1) ? minus : plus;
    return;
  }
  // Pair each index with its partner i ^ x; visit each pair once via the lowest set bit of x.
  const std::uint64_t pivot = x & (~x + 1);
  if (z == 0) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (i & pivot) continue;
      const std::size_t j = i ^ x;
      const Complex ai = amps[i];
      const Complex aj = amps[j];
      amps[i] = c * ai + mis * aj;
      amps[j] = c * aj + mis * ai;
    }
    return;
  }
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & pivot) continue;
    const std::size_t j = i ^ x;
    const Complex ai = amps[i];
    const Complex aj = amps[j];
    // (P a)_j = s(i) a_i, (P a)_i = s(j) a_j
    amps[i] = c * ai + mis * pauli_phase(j, x, z) * aj;
    amps[j] = c * aj + mis * pauli_phase(i, x, z) * ai;
  }
}

void apply_rxx(StateVector& state, int q1, int q2, double angle) {
  check_qubit(state, q1);
  check_qubit(state, q2);
  if (q1 == q2) throw std::invalid_argument("apply_rxx: coincident qubits");
  const std::uint64_t x = (std::uint64_t{1} << q1) | (std::uint64_t{1} << q2);
  apply_pauli_rotation(state, PauliString(state.n_qubits(), x, 0), angle);
}

void apply_dense(StateVector& state, const Eigen::MatrixXcd& unitary, std::span<const int> qubits, double tol) {
  if (qubits.empty() || qubits.size() > 12) throw std::invalid_argument("apply_dense: bad qubit list");
  const std::uint64_t mask = checked_mask(state, qubits);
  const Eigen::Index block = Eigen::Index{1} << qubits.size();
  if (unitary.rows() != block || unitary.cols() != block) throw std::invalid_argument("apply_dense: matrix size mismatch");
  const Eigen::MatrixXcd gram = unitary.adjoint() * unitary;
  if ((gram - Eigen::MatrixXcd::Identity(block, block)).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("apply_dense: matrix is not unitary");
  }
  const auto inner = subset_offsets(qubits);
  const auto outer = complement_offsets(state.n_qubits(), mask);
  auto amps = state.amplitudes();
  Eigen::VectorXcd buf(block);
  for (std::size_t base : outer) {
    for (Eigen::Index i = 0; i < block; ++i) buf(i) = amps[base | inner[static_cast<std::size_t>(i)]];
    const Eigen::VectorXcd out = unitary * buf;
    for (Eigen::Index i = 0; i < block; ++i) amps[base | inner[static_cast<std::size_t>(i)]] = out(i);
  }
}

Complex pauli_inner(const StateVector& state, const PauliString& p) {
  if (p.n_qubits() != state.n_qubits()) throw std::invalid_argument("pauli_inner: size mismatch");
  const auto amps = state.amplitudes();
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  Complex acc{0, 0};
  if (x == 0) {
    double re = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) re += (std::popcount(i & z) & 1) ? -std::norm(amps[i]) : std::norm(amps[i]);
    return {re, 0.0};
  }
  for (std::size_t c = 0; c < amps.size(); ++c) acc += std::conj(amps[c ^ x]) * pauli_phase(c, x, z) * amps[c];
  return acc;
}

double expect_pauli(const StateVector& state, const PauliString& p) { return pauli_inner(state, p).real(); }

double expect_observable(const StateVector& state, const std::vector<PauliTerm>& terms) {
  double v = 0.0;
  for (const auto& t : terms) v += t.coeff * expect_pauli(state, t.pauli);
  return v;
}

double DensityBlock::purity() const { return matrix.cwiseAbs2().sum(); }

DensityBlock partial_trace(const StateVector& state, const QubitSet& subset) {
  if (subset.size() > 12) throw std::invalid_argument("partial_trace: subset too large");
  const std::uint64_t mask = checked_mask(state, subset);
  const auto inner = subset_offsets(subset);
  const auto outer = complement_offsets(state.n_qubits(), mask);
  const auto amps = state.amplitudes();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(inner.size()), static_cast<Eigen::Index>(outer.size()));
  for (std::size_t r = 0; r < outer.size(); ++r) {
    for (std::size_t i = 0; i < inner.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = amps[outer[r] | inner[i]];
    }
  }
  DensityBlock out{subset, Eigen::MatrixXcd()};
  out.matrix = m * m.adjoint();
  return out;
}

double hs_deviation_sq(const DensityBlock& block) {
  const double v = block.purity() - std::ldexp(1.0, -static_cast<int>(block.subset.size()));
  return std::max(v, 0.0);
}

double effective_hs_deviation_sq(const StateVector& state, const QubitSet& gamma, const PauliString& generator) {
  if (generator.n_qubits() != state.n_qubits()) throw std::invalid_argument("effective_hs_deviation_sq: size mismatch");
  if (gamma.size() > 10) throw std::invalid_argument("effective_hs_deviation_sq: gamma too large");
  if (!std::is_sorted(gamma.begin(), gamma.end())) throw std::invalid_argument("effective_hs_deviation_sq: gamma must be sorted");
  if ((generator.support_mask() & ~mask_of(gamma)) != 0) {
    throw std::invalid_argument("effective_hs_deviation_sq: generator supported outside gamma");
  }
  const DensityBlock rho = partial_trace(state, gamma);
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    x |= ((generator.x_mask() >> gamma[j]) & 1) << j;
    z |= ((generator.z_mask() >> gamma[j]) & 1) << j;
  }
  const auto dim = static_cast<std::uint64_t>(rho.matrix.rows());
  double acc = 0.0;
  for (std::uint64_t a = 0; a < dim; ++a) {
    const Complex sa = pauli_phase(a ^ x, x, z);
    for (std::uint64_t b = 0; b < dim; ++b) {
      const Complex conj_rho = sa * rho.matrix(static_cast<Eigen::Index>(a ^ x), static_cast<Eigen::Index>(b ^ x)) *
                               std::conj(pauli_phase(b ^ x, x, z));
      acc += std::norm(rho.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) - conj_rho);
    }
  }
  return acc / 4.0;
}

}  // namespace bpdiag

#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bpdiag/pauli.hpp"

namespace bpdiag {

using Complex = std::complex<double>;

enum class Axis { X, Y, Z };

char axis_char(Axis axis);

inline constexpr double kDefaultTolerance = 1e-10;

/// Pure n-qubit state. Amplitude index bit q is qubit q.
class StateVector {
 public:
  static constexpr int kMaxQubits = 24;

  /// Basis state from a bit string; character q is the value of qubit q.
  static StateVector basis(int n_qubits, std::string_view bits);
  static StateVector zero(int n_qubits);

  /// Takes ownership of explicit amplitudes; length must be 2^n and the norm 1.
  StateVector(int n_qubits, std::vector<Complex> amplitudes, double tol = kDefaultTolerance);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  double norm() const;

 private:
  StateVector(int n_qubits, std::vector<Complex> amplitudes, std::nullptr_t);
  int n_qubits_;
  std::vector<Complex> amps_;
};

StateVector init_basis_state(int n_qubits, std::string_view bits);

/// exp(-i angle P / 2) on `qubit`.
void apply_rotation_1q(StateVector& state, Axis axis, int qubit, double angle);
/// exp(-i angle X(q1) X(q2)); full-angle convention.
void apply_rxx(StateVector& state, int q1, int q2, double angle);
/// exp(-i angle G) for an arbitrary Pauli string G.
void apply_pauli_rotation(StateVector& state, const PauliString& generator, double angle);
/// Applies a 2x2 matrix to one qubit (no unitarity check).
void apply_matrix_1q(StateVector& state, const Eigen::Matrix2cd& m, int qubit);
/// Applies a unitary on `qubits`; block index bit j is qubits[j].
void apply_dense(StateVector& state, const Eigen::MatrixXcd& unitary, std::span<const int> qubits,
                 double tol = kDefaultTolerance);

/// <psi|P|psi> without discarding the imaginary part.
Complex pauli_inner(const StateVector& state, const PauliString& p);
double expect_pauli(const StateVector& state, const PauliString& p);
double expect_observable(const StateVector& state, const std::vector<PauliTerm>& terms);

/// Reduced density matrix on an ordered qubit list. Block index bit j is subset[j].
struct DensityBlock {
  QubitSet subset;
  Eigen::MatrixXcd matrix;

  double purity() const;
};

DensityBlock partial_trace(const StateVector& state, const QubitSet& subset);

/// Tr(rho_A^2) - 2^{-|A|} = ||rho_A - 1/2^{|A|}||_F^2, clamped at 0.
double hs_deviation_sq(const DensityBlock& block);

/// Squared Hilbert-Schmidt deviation of the component of rho_Gamma spanned by the
/// Paulis on gamma that anticommute with `generator`:
/// 2^{-|Gamma|} * sum_{g in S(Gamma,G), g != 1} <g>^2.
///
/// Evaluated as ||rho_Gamma - G rho_Gamma G||_F^2 / 4, which removes the commuting
/// components and doubles the anticommuting ones.
double effective_hs_deviation_sq(const StateVector& state, const QubitSet& gamma, const PauliString& generator);

}  // namespace bpdiag

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bpdiag {

/// Sorted, duplicate-free list of qubit indices.
using QubitSet = std::vector<int>;

std::uint64_t mask_of(const QubitSet& qubits);
QubitSet qubits_of(std::uint64_t mask);

/// Hermitian n-qubit Pauli operator in symplectic form.
///
/// Qubit q corresponds to bit q of both masks and to bit q of a computational
/// basis index (qubit 0 is the least significant amplitude bit). Y is stored
/// with both bits set and denotes i*X*Z, so every string is Hermitian and
/// squares to the identity. No phases are carried.
class PauliString {
 public:
  static constexpr int kMaxQubits = 64;

  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  /// Parses a label over {I,X,Y,Z}; character i acts on qubit i.
  static PauliString parse(std::string_view label);
  static PauliString identity(int n_qubits);
  /// Single-qubit Pauli `axis` in {'X','Y','Z','I'} on `qubit`.
  static PauliString single(int n_qubits, int qubit, char axis);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  std::uint64_t support_mask() const { return x_ | z_; }
  QubitSet support() const { return qubits_of(support_mask()); }
  bool is_identity() const { return (x_ | z_) == 0; }

  /// Character ('I','X','Y','Z') acting on `qubit`.
  char at(int qubit) const;
  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// A real-weighted Pauli term c_g * g of an observable.
struct PauliTerm {
  double coeff = 1.0;
  PauliString pauli;
};

/// True iff the symplectic product of `a` and `b` is even.
bool commutes(const PauliString& a, const PauliString& b);

/// All non-identity Paulis supported inside `gamma` that anticommute with `generator`.
/// The generator must itself be supported inside `gamma`.
std::vector<PauliString> enumerate_effective_set(const QubitSet& gamma, const PauliString& generator);

/// Dense 2^n x 2^n matrix. Basis index bit q is qubit q, so for "XZ" the
/// result equals kron(Z, X) in the usual left-is-most-significant ordering.
Eigen::MatrixXcd dense_matrix(const PauliString& p);

/// Frobenius norm of sum_g c_g g, via Pauli orthogonality: sqrt(2^n * sum c_g^2).
/// Assumes the terms are distinct Pauli strings.
double frobenius_norm(const std::vector<PauliTerm>& terms);

}  // namespace bpdiag

#pragma once

// Dense reference implementations used as test oracles.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpdiag/randomness.hpp"
#include "bpdiag/simulator.hpp"

namespace bpdiag::oracle {

inline Eigen::Matrix2cd pauli2(char c) {
  Eigen::Matrix2cd m;
  const Complex i(0, 1);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

// First argument on the more significant bits.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Single-qubit matrix m on `qubit` of an n-qubit register (qubit 0 least significant).
inline Eigen::MatrixXcd embed1(const Eigen::MatrixXcd& m, int qubit, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) out = kron(q == qubit ? m : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()), out);
  return out;
}

inline Eigen::MatrixXcd pauli_matrix(const std::string& label) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : label) m = kron(pauli2(c), m);
  return m;
}

// exp(-i angle P) for an involutory Hermitian P.
inline Eigen::MatrixXcd pauli_exp(const Eigen::MatrixXcd& p, double angle) {
  return std::cos(angle) * Eigen::MatrixXcd::Identity(p.rows(), p.cols()) - Complex(0, std::sin(angle)) * p;
}

inline Eigen::VectorXcd to_vector(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

inline StateVector from_vector(int n, const Eigen::VectorXcd& v) {
  return StateVector(n, std::vector<Complex>(v.data(), v.data() + v.size()));
}

inline StateVector random_state(int n, Rng& rng) {
  Eigen::VectorXcd v(1 << n);
  for (auto& a : v) a = Complex(rng.normal(), rng.normal());
  return from_vector(n, v / v.norm());
}

}  // namespace bpdiag::oracle

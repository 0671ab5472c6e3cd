#include "bpdiag/pauli.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace bpdiag {

namespace {

std::uint64_t low_bits(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

// Deposits the low bits of `value` onto the set bits of `mask`.
std::uint64_t scatter_bits(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    if (value & 1) out |= m & (~m + 1);
    value >>= 1;
  }
  return out;
}

}  // namespace

std::uint64_t mask_of(const QubitSet& qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= 64) throw std::out_of_range("qubit index out of range");
    mask |= std::uint64_t{1} << q;
  }
  return mask;
}

QubitSet qubits_of(std::uint64_t mask) {
  QubitSet out;
  for (; mask != 0; mask &= mask - 1) out.push_back(std::countr_zero(mask));
  return out;
}

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_qubits_(n_qubits), x_(x_mask), z_(z_mask) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) throw std::invalid_argument("PauliString: bad qubit count");
  if (((x_mask | z_mask) & ~low_bits(n_qubits)) != 0) {
    throw std::invalid_argument("PauliString: mask bits beyond n_qubits");
  }
}

PauliString PauliString::parse(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("empty Pauli label");
  if (label.size() > kMaxQubits) throw std::invalid_argument("Pauli label too long");
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < label.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (label[q]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      case 'Z': z |= bit; break;
      default:
        throw std::invalid_argument(std::string("invalid Pauli character '") + label[q] + "'");
    }
  }
  return PauliString(static_cast<int>(label.size()), x, z);
}

PauliString PauliString::identity(int n_qubits) { return PauliString(n_qubits, 0, 0); }

PauliString PauliString::single(int n_qubits, int qubit, char axis) {
  if (qubit < 0 || qubit >= n_qubits) throw std::out_of_range("PauliString::single: qubit out of range");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  switch (axis) {
    case 'I': return PauliString(n_qubits, 0, 0);
    case 'X': return PauliString(n_qubits, bit, 0);
    case 'Y': return PauliString(n_qubits, bit, bit);
    case 'Z': return PauliString(n_qubits, 0, bit);
    default: throw std::invalid_argument("PauliString::single: bad axis");
  }
}

char PauliString::at(int qubit) const {
  const bool x = (x_ >> qubit) & 1;
  const bool z = (z_ >> qubit) & 1;
  return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

std::string PauliString::str() const {
  std::string out(static_cast<std::size_t>(n_qubits_), 'I');
  for (int q = 0; q < n_qubits_; ++q) out[static_cast<std::size_t>(q)] = at(q);
  return out;
}

bool commutes(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("commutes: mismatched qubit counts");
  const int parity = std::popcount(a.x_mask() & b.z_mask()) + std::popcount(a.z_mask() & b.x_mask());
  return parity % 2 == 0;
}

std::vector<PauliString> enumerate_effective_set(const QubitSet& gamma, const PauliString& generator) {
  const std::uint64_t gmask = mask_of(gamma);
  if ((generator.support_mask() & ~gmask) != 0) {
    throw std::invalid_argument("enumerate_effective_set: generator supported outside gamma");
  }
  const int a = std::popcount(gmask);
  if (a > 15) throw std::invalid_argument("enumerate_effective_set: gamma too large");
  std::vector<PauliString> out;
  const std::uint64_t count = std::uint64_t{1} << a;
  for (std::uint64_t xs = 0; xs < count; ++xs) {
    for (std::uint64_t zs = 0; zs < count; ++zs) {
      PauliString p(generator.n_qubits(), scatter_bits(xs, gmask), scatter_bits(zs, gmask));
      if (!commutes(p, generator)) out.push_back(p);
    }
  }
  return out;
}

Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  if (p.n_qubits() > 12) throw std::invalid_argument("dense_matrix: too many qubits");
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  // P|c> = i^{|x&z|} (-1)^{|c&z|} |c ^ x>
  const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> base = i_pow[std::popcount(p.x_mask() & p.z_mask()) % 4];
  for (std::size_t c = 0; c < dim; ++c) {
    const double sign = (std::popcount(c & p.z_mask()) % 2) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(c ^ p.x_mask()), static_cast<Eigen::Index>(c)) = base * sign;
  }
  return m;
}

double frobenius_norm(const std::vector<PauliTerm>& terms) {
  if (terms.empty()) return 0.0;
  double sum_sq = 0.0;
  for (const auto& t : terms) sum_sq += t.coeff * t.coeff;
  return std::sqrt(std::ldexp(sum_sq, terms.front().pauli.n_qubits()));
}

}  // namespace bpdiag

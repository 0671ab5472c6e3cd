#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpdiag/pauli.hpp"
#include "bpdiag/simulator.hpp"

namespace bpdiag {

/// Element of the symmetric group S_k, stored 0-based as i -> images[i].
class Permutation {
 public:
  static constexpr int kMaxOrder = 8;

  explicit Permutation(std::vector<int> images);
  static Permutation identity(int k);
  /// Cycle notation with 1-based points, e.g. from_cycles(4, {{1,4},{2,3}}).
  static Permutation from_cycles(int k, const std::vector<std::vector<int>>& cycles);

  int k() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }

  Permutation inverse() const;
  /// 0-based cycles, each starting at its smallest point, fixed points included.
  std::vector<std::vector<int>> cycles() const;
  int cycle_count() const { return static_cast<int>(cycles().size()); }
  bool is_identity() const;
  /// 1-based cycle notation; "()" for the identity.
  std::string str() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

/// (a * b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);

/// All k! permutations in lexicographic order of their image arrays (identity first).
std::vector<Permutation> all_permutations(int k);

/// Cycle lengths sorted in decreasing order, e.g. (14)(23) -> {2, 2}.
std::vector<int> cycle_type(const Permutation& sigma);

/// d^{#cycles(sigma^-1 pi)} = Tr(V_sigma^dagger V_pi) on (C^d)^{(x)k}.
double gram_entry(const Permutation& sigma, const Permutation& pi, int d);

/// Weingarten function of U(d) at order k, one value per permutation.
struct WeingartenTable {
  int k = 0;
  int d = 0;
  /// Set when d < k and the Gram matrix had to be pseudo-inverted.
  bool pseudo_inverse = false;
  std::vector<Permutation> perms;
  std::vector<double> values;

  double operator()(const Permutation& sigma) const;
  /// Values keyed by cycle type.
  std::map<std::vector<int>, double> by_cycle_type() const;
};

/// Solves sum_pi Gram(sigma, pi) Wg(pi) = [sigma = id]. Throws when d < k.
WeingartenTable weingarten_table(int k, int d);
/// Same, but falls back to the Moore-Penrose pseudo-inverse for d < k and flags it.
WeingartenTable weingarten_table_allow_singular(int k, int d);

/// Hook for substituting tables (used to inject corrupted tables in tests).
using WeingartenProvider = std::function<WeingartenTable(int k, int d)>;

/// Permutation operator acting as V_sigma |i_1 ... i_k> = |i_sigma(1) ... i_sigma(k)>.
///
/// Dense d^k x d^k oracle. Tensor factor l is digit l of the basis index in base d
/// (factor 0 least significant).
Eigen::MatrixXcd permutation_operator(const Permutation& sigma, int d);
/// A_0 (x) A_1 (x) ... with factor l at digit l, matching permutation_operator.
Eigen::MatrixXcd tensor_product(const std::vector<Eigen::MatrixXcd>& factors);

/// Tr(V_sigma (A_0 (x) ... (x) A_{k-1})) as a product over the cycles of sigma of
/// Tr(A_m A_sigma(m) A_sigma^2(m) ...).
Complex trace_against_permutation(const Permutation& sigma, const std::vector<Eigen::MatrixXcd>& factors);

/// Coefficients c_pi in E[U^{(x)k} X U^{dagger(x)k}] = sum_pi c_pi V_pi for a
/// product operator X = (x)_l factors[l]: c_pi = sum_sigma Wg(sigma^-1 pi) Tr(V_sigma^-1 X).
std::vector<Complex> twirl_coefficients(const WeingartenTable& table, const std::vector<Eigen::MatrixXcd>& factors);

/// Dense twirl of a general operator X on (C^d)^{(x)k}.
Eigen::MatrixXcd twirl_dense(const WeingartenTable& table, const Eigen::MatrixXcd& x);

/// <w| E[U^{(x)k} X U^{dagger(x)k}] |v> for product X, product bra and product ket.
Complex twirl_matrix_element(const WeingartenTable& table, const std::vector<Eigen::MatrixXcd>& factors,
                             const std::vector<Eigen::VectorXcd>& bra, const std::vector<Eigen::VectorXcd>& ket);

/// Haar moments of the information-loss circuit for a pure product input.
struct Example1ClosedForm {
  double d1 = 0, d2 = 0, d3 = 0;
  double b_u = 0, c_u = 0;
  double b_v = 0, c_v = 0;
  double b_v_prime = 0, c_v_prime = 0;
  /// E[T^2] = b_U + c_U (b_V + c_V).
  double second_moment = 0;
  /// E[T_+ T_-] = b_U + c_U (b_V' + c_V').
  double cross_moment = 0;
  /// 1 - cross_moment / second_moment.
  double one_minus_r_exact = 0;
  /// The simplified large-dimension ratio d2^2 d3 d1 d2 / (d1 d2^3 d3 - d1^2 d2^2 + d1^2 d2 d3).
  double one_minus_r_displayed = 0;
};
Example1ClosedForm example1_closed_form(int d1, int d2, int d3);

/// <phi_0 phi_1 phi_2 phi_3| V_pi^{T_13} |g>>|g>>, with the partial transpose on
/// tensor copies 1 and 3 (0-based) done by rewiring indices and |g>> = sum_ij g_ij |i>|j>.
/// The bra is bilinear: callers pass conj(psi) on copies 0 and 2 and psi on 1 and 3.
Complex contract_partial_transpose(const Permutation& pi, const std::vector<Eigen::VectorXcd>& phi,
                                   const Eigen::MatrixXcd& g);

struct Example2Exact {
  int d = 0;
  double numerator = 0;    // E[T_+ T_-]
  double denominator = 0;  // E[T_+^2]
  double r = 0;
  double one_minus_r = 0;
  bool pseudo_inverse = false;
};

/// Exact correlation of the scrambled-rotation circuit U^dagger exp(-i theta G) U at
/// theta = 0 via fourth-moment Weingarten calculus and the partial-transpose contraction.
Example2Exact example2_exact_r(const PauliString& generator, const PauliString& observable, const StateVector& psi,
                               const WeingartenProvider& provider = weingarten_table_allow_singular);

/// The same quantity by pairing traces directly:
/// E[T_+ T_-] = sum_pi c_pi(g (x) psi (x) g (x) psi) Tr(V_{pi tau} (S_+ (x) S_+^dagger (x) S_- (x) S_-^dagger)),
/// tau = (12)(34). Independent of the partial-transpose rewiring.
Example2Exact example2_exact_r_trace_pairing(const PauliString& generator, const PauliString& observable,
                                             const StateVector& psi,
                                             const WeingartenProvider& provider = weingarten_table_allow_singular);

/// Large-d behaviour of Wg at k = 4 for cycle types (2,2) and (4).
struct WeingartenLeadingReport {
  std::vector<int> dims;
  std::vector<double> scaled_22;  // Wg_(2,2)(d) * d^6
  std::vector<double> scaled_4;   // Wg_(4)(d) * d^7
  double fitted_22 = 0;           // intercept of scaled value vs 1/d^2
  double fitted_4 = 0;
  double catalan_22 = 1.0;
  double catalan_4 = -5.0;
  double quoted_22 = 0.25;
  double quoted_4 = -3.75;
};
WeingartenLeadingReport weingarten_leading_report(const std::vector<int>& dims);

}  // namespace bpdiag

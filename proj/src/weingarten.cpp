#include "bpdiag/weingarten.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bpdiag {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int k = static_cast<int>(images_.size());
  if (k < 1 || k > kMaxOrder) throw std::invalid_argument("Permutation: order out of range");
  std::vector<bool> hit(images_.size(), false);
  for (int v : images_) {
    if (v < 0 || v >= k || hit[static_cast<std::size_t>(v)]) throw std::invalid_argument("Permutation: not a bijection");
    hit[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> images(static_cast<std::size_t>(k));
  std::iota(images.begin(), images.end(), 0);
  return Permutation(std::move(images));
}

Permutation Permutation::from_cycles(int k, const std::vector<std::vector<int>>& cycles) {
  if (k < 1 || k > kMaxOrder) throw std::invalid_argument("Permutation: order out of range");
  std::vector<int> images(static_cast<std::size_t>(k));
  std::iota(images.begin(), images.end(), 0);
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int from = cycle[i] - 1;
      const int to = cycle[(i + 1) % cycle.size()] - 1;
      if (from < 0 || from >= k || to < 0 || to >= k) throw std::invalid_argument("from_cycles: point out of range");
      if (used[static_cast<std::size_t>(from)]) throw std::invalid_argument("from_cycles: point repeated");
      used[static_cast<std::size_t>(from)] = true;
      images[static_cast<std::size_t>(from)] = to;
    }
  }
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

std::vector<std::vector<int>> Permutation::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(images_.size(), false);
  for (int start = 0; start < k(); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<int> cycle;
    for (int p = start; !seen[static_cast<std::size_t>(p)]; p = (*this)(p)) {
      seen[static_cast<std::size_t>(p)] = true;
      cycle.push_back(p);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

bool Permutation::is_identity() const {
  for (int i = 0; i < k(); ++i) {
    if ((*this)(i) != i) return false;
  }
  return true;
}

std::string Permutation::str() const {
  std::ostringstream os;
  bool any = false;
  for (const auto& cycle : cycles()) {
    if (cycle.size() < 2) continue;
    any = true;
    os << '(';
    for (int p : cycle) os << p + 1;
    os << ')';
  }
  return any ? os.str() : "()";
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.k() != b.k()) throw std::invalid_argument("compose: order mismatch");
  std::vector<int> images(static_cast<std::size_t>(a.k()));
  for (int i = 0; i < a.k(); ++i) images[static_cast<std::size_t>(i)] = a(b(i));
  return Permutation(std::move(images));
}

std::vector<Permutation> all_permutations(int k) {
  std::vector<int> images(static_cast<std::size_t>(k));
  std::iota(images.begin(), images.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(images);
  } while (std::next_permutation(images.begin(), images.end()));
  return out;
}

std::vector<int> cycle_type(const Permutation& sigma) {
  std::vector<int> lengths;
  for (const auto& c : sigma.cycles()) lengths.push_back(static_cast<int>(c.size()));
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
  return lengths;
}

double gram_entry(const Permutation& sigma, const Permutation& pi, int d) {
  if (sigma.k() != pi.k()) throw std::invalid_argument("gram_entry: order mismatch");
  if (d < 1) throw std::invalid_argument("gram_entry: d must be >= 1");
  return std::pow(static_cast<double>(d), compose(sigma.inverse(), pi).cycle_count());
}

double WeingartenTable::operator()(const Permutation& sigma) const {
  for (std::size_t i = 0; i < perms.size(); ++i) {
    if (perms[i] == sigma) return values[i];
  }
  throw std::invalid_argument("WeingartenTable: permutation of the wrong order");
}

std::map<std::vector<int>, double> WeingartenTable::by_cycle_type() const {
  std::map<std::vector<int>, double> out;
  for (std::size_t i = 0; i < perms.size(); ++i) out.emplace(cycle_type(perms[i]), values[i]);
  return out;
}

namespace {

WeingartenTable solve_table(int k, int d, bool allow_singular) {
  if (k < 1 || k > 6) throw std::invalid_argument("weingarten_table: k must be in [1, 6]");
  if (d < 1) throw std::invalid_argument("weingarten_table: d must be >= 1");
  const bool singular = d < k;
  if (singular && !allow_singular) throw std::invalid_argument("weingarten_table: d < k makes the Gram matrix singular");

  WeingartenTable t;
  t.k = k;
  t.d = d;
  t.perms = all_permutations(k);
  const auto m = static_cast<Eigen::Index>(t.perms.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      gram(i, j) = gram_entry(t.perms[static_cast<std::size_t>(i)], t.perms[static_cast<std::size_t>(j)], d);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(0) = 1.0;  // perms[0] is the identity
  Eigen::VectorXd w;
  if (singular) {
    // Minimum-norm solution equals the identity column of the pseudo-inverse.
    w = gram.completeOrthogonalDecomposition().pseudoInverse() * rhs;
    t.pseudo_inverse = true;
  } else {
    w = gram.ldlt().solve(rhs);
  }
  t.values.assign(w.data(), w.data() + m);
  return t;
}

// Digit l of `index` in base d.
inline int digit(std::size_t index, int l, int d) {
  for (int i = 0; i < l; ++i) index /= static_cast<std::size_t>(d);
  return static_cast<int>(index % static_cast<std::size_t>(d));
}

void check_factors(const std::vector<Eigen::MatrixXcd>& factors, int k) {
  if (static_cast<int>(factors.size()) != k) throw std::invalid_argument("factor count does not match permutation order");
  for (const auto& f : factors) {
    if (f.rows() != f.cols() || f.rows() != factors[0].rows()) throw std::invalid_argument("factors must be square and equal-sized");
  }
}

Complex bilinear(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a.array() * b.array()).sum(); }

}  // namespace

WeingartenTable weingarten_table(int k, int d) { return solve_table(k, d, false); }
WeingartenTable weingarten_table_allow_singular(int k, int d) { return solve_table(k, d, true); }

Eigen::MatrixXcd permutation_operator(const Permutation& sigma, int d) {
  const int k = sigma.k();
  std::size_t dim = 1;
  for (int l = 0; l < k; ++l) dim *= static_cast<std::size_t>(d);
  if (dim > 4096) throw std::invalid_argument("permutation_operator: dimension too large for a dense oracle");
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<std::size_t> weight(static_cast<std::size_t>(k), 1);
  for (int l = 1; l < k; ++l) weight[static_cast<std::size_t>(l)] = weight[static_cast<std::size_t>(l - 1)] * static_cast<std::size_t>(d);
  for (std::size_t b = 0; b < dim; ++b) {
    // <a|V|b> = prod_l delta(a_l, b_sigma(l))
    std::size_t a = 0;
    for (int l = 0; l < k; ++l) a += static_cast<std::size_t>(digit(b, sigma(l), d)) * weight[static_cast<std::size_t>(l)];
    v(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1.0;
  }
  return v;
}

Eigen::MatrixXcd tensor_product(const std::vector<Eigen::MatrixXcd>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: no factors");
  Eigen::MatrixXcd out = factors.back();
  for (std::size_t i = factors.size() - 1; i-- > 0;) {
    const Eigen::MatrixXcd& f = factors[i];
    Eigen::MatrixXcd next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
    }
    out = std::move(next);
  }
  return out;
}

Complex trace_against_permutation(const Permutation& sigma, const std::vector<Eigen::MatrixXcd>& factors) {
  check_factors(factors, sigma.k());
  Complex result(1.0, 0.0);
  for (const auto& cycle : sigma.cycles()) {
    Eigen::MatrixXcd prod = factors[static_cast<std::size_t>(cycle[0])];
    for (std::size_t i = 1; i < cycle.size(); ++i) prod = prod * factors[static_cast<std::size_t>(cycle[i])];
    result *= prod.trace();
  }
  return result;
}

std::vector<Complex> twirl_coefficients(const WeingartenTable& table, const std::vector<Eigen::MatrixXcd>& factors) {
  check_factors(factors, table.k);
  if (factors[0].rows() != table.d) throw std::invalid_argument("twirl_coefficients: factor dimension differs from table d");
  const std::size_t m = table.perms.size();
  std::vector<Complex> traces(m);
  for (std::size_t s = 0; s < m; ++s) traces[s] = trace_against_permutation(table.perms[s].inverse(), factors);
  std::vector<Complex> c(m, Complex(0, 0));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t s = 0; s < m; ++s) {
      c[p] += table(compose(table.perms[s].inverse(), table.perms[p])) * traces[s];
    }
  }
  return c;
}

Eigen::MatrixXcd twirl_dense(const WeingartenTable& table, const Eigen::MatrixXcd& x) {
  const std::size_t m = table.perms.size();
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(m);
  for (const auto& p : table.perms) ops.push_back(permutation_operator(p, table.d));
  if (x.rows() != ops[0].rows() || x.cols() != ops[0].cols()) throw std::invalid_argument("twirl_dense: operator size mismatch");
  std::vector<Complex> traces(m);
  for (std::size_t s = 0; s < m; ++s) traces[s] = (ops[s].adjoint() * x).trace();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
  for (std::size_t p = 0; p < m; ++p) {
    Complex c(0, 0);
    for (std::size_t s = 0; s < m; ++s) c += table(compose(table.perms[s].inverse(), table.perms[p])) * traces[s];
    out += c * ops[p];
  }
  return out;
}

Complex twirl_matrix_element(const WeingartenTable& table, const std::vector<Eigen::MatrixXcd>& factors,
                             const std::vector<Eigen::VectorXcd>& bra, const std::vector<Eigen::VectorXcd>& ket) {
  const auto k = static_cast<std::size_t>(table.k);
  if (bra.size() != k || ket.size() != k) throw std::invalid_argument("twirl_matrix_element: vector count mismatch");
  const auto c = twirl_coefficients(table, factors);
  Complex total(0, 0);
  for (std::size_t p = 0; p < table.perms.size(); ++p) {
    // <w|V_pi|v> = prod_l <w_l|v_pi(l)>
    Complex overlap(1, 0);
    for (std::size_t l = 0; l < k; ++l) {
      overlap *= bra[l].dot(ket[static_cast<std::size_t>(table.perms[p](static_cast<int>(l)))]);
    }
    total += c[p] * overlap;
  }
  return total;
}

Example1ClosedForm example1_closed_form(int d1, int d2, int d3) {
  if (d1 < 2 || d2 < 2 || d3 < 2) throw std::invalid_argument("example1_closed_form: every dimension must be >= 2");
  Example1ClosedForm f;
  const double a = d1, b = d2, c = d3;
  f.d1 = a;
  f.d2 = b;
  f.d3 = c;
  const double d12 = a * b, d23 = b * c;
  f.b_u = -1.0 / (d23 * d23 - 1.0);
  f.c_u = d23 / (d23 * d23 - 1.0);
  f.b_v = (a * a * b - b) / (d12 * d12 - 1.0);
  f.c_v = (a * b * b - a) / (d12 * d12 - 1.0);
  f.b_v_prime = a * a * b / (d12 * d12 - 1.0);
  f.c_v_prime = -a / (d12 * d12 - 1.0);
  f.second_moment = f.b_u + f.c_u * (f.b_v + f.c_v);
  f.cross_moment = f.b_u + f.c_u * (f.b_v_prime + f.c_v_prime);
  f.one_minus_r_exact = 1.0 - f.cross_moment / f.second_moment;
  f.one_minus_r_displayed = (b * b * c * a * b) / (a * b * b * b * c - a * a * b * b + a * a * b * c);
  return f;
}

Complex contract_partial_transpose(const Permutation& pi, const std::vector<Eigen::VectorXcd>& phi,
                                   const Eigen::MatrixXcd& g) {
  if (pi.k() != 4 || phi.size() != 4) throw std::invalid_argument("contract_partial_transpose: needs k = 4");
  if (g.rows() != g.cols()) throw std::invalid_argument("contract_partial_transpose: g must be square");
  for (const auto& v : phi) {
    if (v.size() != g.rows()) throw std::invalid_argument("contract_partial_transpose: dimension mismatch");
  }

  // Ports 0..3 are the bra vectors on a_0..a_3. Ports 4..7 are b_0..b_3: g1 has
  // row b_0 and column b_1, g2 has row b_2 and column b_3.
  // V_pi pairs row index r_l with column index c_pi(l). Without transposition
  // r_l = a_l and c_l = b_l; transposing copies 1 and 3 swaps their roles.
  auto row_port = [](int l) { return (l == 1 || l == 3) ? 4 + l : l; };
  auto col_port = [](int l) { return (l == 1 || l == 3) ? l : 4 + l; };
  std::array<int, 8> partner{};
  for (int l = 0; l < 4; ++l) {
    const int r = row_port(l);
    const int c = col_port(pi(l));
    partner[static_cast<std::size_t>(r)] = c;
    partner[static_cast<std::size_t>(c)] = r;
  }
  // For a g port: the opposite port of the same matrix and whether it is the row.
  auto other_end = [](int port) { return port ^ 1; };  // 4<->5, 6<->7
  auto is_row = [](int port) { return port == 4 || port == 6; };

  std::array<bool, 8> visited{};
  Complex result(1.0, 0.0);

  // Chains start and end on bra vectors.
  for (int start = 0; start < 4; ++start) {
    if (visited[static_cast<std::size_t>(start)]) continue;
    visited[static_cast<std::size_t>(start)] = true;
    Eigen::VectorXcd v = phi[static_cast<std::size_t>(start)];
    int port = partner[static_cast<std::size_t>(start)];
    while (port >= 4) {
      visited[static_cast<std::size_t>(port)] = true;
      // Entering through the row index contracts v_i g_ij; through the column, g_ij v_j.
      v = is_row(port) ? Eigen::VectorXcd(g.transpose() * v) : Eigen::VectorXcd(g * v);
      const int exit = other_end(port);
      visited[static_cast<std::size_t>(exit)] = true;
      port = partner[static_cast<std::size_t>(exit)];
    }
    visited[static_cast<std::size_t>(port)] = true;
    result *= bilinear(v, phi[static_cast<std::size_t>(port)]);
  }

  // Whatever remains forms closed loops through g1 and g2.
  for (int start = 4; start < 8; start += 2) {
    if (visited[static_cast<std::size_t>(start)]) continue;
    // Row index of the starting g is the open index of `m`.
    Eigen::MatrixXcd m = g;
    visited[static_cast<std::size_t>(start)] = true;
    visited[static_cast<std::size_t>(start + 1)] = true;
    int port = partner[static_cast<std::size_t>(start + 1)];
    while (port != start) {
      m = is_row(port) ? Eigen::MatrixXcd(m * g) : Eigen::MatrixXcd(m * g.transpose());
      const int exit = other_end(port);
      visited[static_cast<std::size_t>(port)] = true;
      visited[static_cast<std::size_t>(exit)] = true;
      port = partner[static_cast<std::size_t>(exit)];
    }
    result *= m.trace();
  }
  return result;
}

namespace {

struct Example2Inputs {
  int d;
  Eigen::MatrixXcd shift;  // exp(-i pi G / 4)
  Eigen::MatrixXcd g;
  Eigen::VectorXcd psi;
};

Example2Inputs example2_inputs(const PauliString& generator, const PauliString& observable, const StateVector& psi) {
  const int n = generator.n_qubits();
  if (observable.n_qubits() != n || psi.n_qubits() != n) throw std::invalid_argument("example2: width mismatch");
  if (n > 6) throw std::invalid_argument("example2 exact: d = 2^n must be <= 64");
  if (generator.is_identity()) throw std::invalid_argument("example2 exact: generator must be a non-identity Pauli");
  if (observable.is_identity()) throw std::invalid_argument("example2 exact: observable must be traceless");
  Example2Inputs in;
  in.d = 1 << n;
  const Eigen::MatrixXcd gen = dense_matrix(generator);
  const double h = std::sqrt(0.5);
  in.shift = h * Eigen::MatrixXcd::Identity(in.d, in.d) - Complex(0, h) * gen;
  in.g = dense_matrix(observable);
  in.psi = Eigen::Map<const Eigen::VectorXcd>(psi.amplitudes().data(), in.d);
  return in;
}

Example2Exact finish(int d, double num, double den, bool pinv) {
  Example2Exact out;
  out.d = d;
  out.numerator = num;
  out.denominator = den;
  out.r = num / den;
  out.one_minus_r = (den - num) / den;
  out.pseudo_inverse = pinv;
  return out;
}

}  // namespace

Example2Exact example2_exact_r(const PauliString& generator, const PauliString& observable, const StateVector& psi,
                               const WeingartenProvider& provider) {
  const auto in = example2_inputs(generator, observable, psi);
  const WeingartenTable table = provider(4, in.d);
  const Eigen::MatrixXcd s = in.shift;
  const Eigen::MatrixXcd sd = in.shift.adjoint();
  const auto cq = twirl_coefficients(table, {s, sd, sd, s});
  const auto cp = twirl_coefficients(table, {s, sd, s, sd});
  const Eigen::VectorXcd psi_c = in.psi.conjugate();
  const std::vector<Eigen::VectorXcd> phi{psi_c, in.psi, psi_c, in.psi};
  Complex num(0, 0), den(0, 0);
  for (std::size_t p = 0; p < table.perms.size(); ++p) {
    const Complex w = contract_partial_transpose(table.perms[p], phi, in.g);
    num += cq[p] * w;
    den += cp[p] * w;
  }
  return finish(in.d, num.real(), den.real(), table.pseudo_inverse);
}

Example2Exact example2_exact_r_trace_pairing(const PauliString& generator, const PauliString& observable,
                                             const StateVector& psi, const WeingartenProvider& provider) {
  const auto in = example2_inputs(generator, observable, psi);
  const WeingartenTable table = provider(4, in.d);
  const Eigen::MatrixXcd rho = in.psi * in.psi.adjoint();
  const auto c = twirl_coefficients(table, {in.g, rho, in.g, rho});
  const Permutation tau = Permutation::from_cycles(4, {{1, 2}, {3, 4}});
  const Eigen::MatrixXcd sp = in.shift.adjoint();  // exp(+i pi G / 4)
  const Eigen::MatrixXcd sm = in.shift;
  Complex num(0, 0), den(0, 0);
  for (std::size_t p = 0; p < table.perms.size(); ++p) {
    const Permutation rho_perm = compose(table.perms[p], tau);
    num += c[p] * trace_against_permutation(rho_perm, {sp, sp.adjoint(), sm, sm.adjoint()});
    den += c[p] * trace_against_permutation(rho_perm, {sp, sp.adjoint(), sp, sp.adjoint()});
  }
  return finish(in.d, num.real(), den.real(), table.pseudo_inverse);
}

WeingartenLeadingReport weingarten_leading_report(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("weingarten_leading_report: need at least two dimensions");
  WeingartenLeadingReport rep;
  rep.dims = dims;
  const std::vector<int> t22{2, 2}, t4{4};
  Eigen::MatrixXd a(static_cast<Eigen::Index>(dims.size()), 2);
  Eigen::VectorXd y22(a.rows()), y4(a.rows());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int d = dims[i];
    if (d < 4) throw std::invalid_argument("weingarten_leading_report: d must be >= 4");
    const auto types = weingarten_table(4, d).by_cycle_type();
    const double dd = d;
    rep.scaled_22.push_back(types.at(t22) * std::pow(dd, 6));
    rep.scaled_4.push_back(types.at(t4) * std::pow(dd, 7));
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = 1.0 / (dd * dd);
    y22(static_cast<Eigen::Index>(i)) = rep.scaled_22.back();
    y4(static_cast<Eigen::Index>(i)) = rep.scaled_4.back();
  }
  rep.fitted_22 = a.colPivHouseholderQr().solve(y22)(0);
  rep.fitted_4 = a.colPivHouseholderQr().solve(y4)(0);
  return rep;
}

}  // namespace bpdiag

#include "bpdiag/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bpdiag {

namespace {

CheckOutcome at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckOutcome at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value >= threshold, value, threshold, std::move(detail)};
}

Eigen::MatrixXcd ginibre(int d, Rng& rng) {
  Eigen::MatrixXcd m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

Eigen::VectorXcd random_unit_vector(int d, Rng& rng) {
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return v / v.norm();
}

StateVector random_state(int n, Rng& rng) {
  const Eigen::VectorXcd v = random_unit_vector(1 << n, rng);
  return StateVector(n, std::vector<Complex>(v.data(), v.data() + v.size()));
}

PauliString random_pauli(int n, Rng& rng) {
  const auto mask = (std::uint64_t{1} << n) - 1;
  return PauliString(n, rng() & mask, rng() & mask);
}

// Single Rotation gate on one qubit whose angle is pinned by the draw: a fixed
// pure state with Bloch vector (sin a, 0, cos a).
Ensemble fixed_bloch_ensemble(double angle) {
  Circuit c;
  c.n_qubits = 1;
  c.gates.push_back(GateSpec::rotation(1, Axis::Y, 0, SymbolicParam{0}));
  c.param_count = 1;
  c.probe_index = 0;
  c.observable = {PauliTerm{1.0, PauliString::single(1, 0, 'Z')}};
  c.validate();
  Ensemble e;
  e.name = "fixed_bloch";
  e.n_qubits = 1;
  e.draw = [c, angle](Rng&) { return CircuitDraw{c, {angle}, {}}; };
  return e;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

std::vector<std::string> VerifyReport::failed_suites() const {
  std::vector<std::string> out;
  for (const auto& s : suites) {
    if (!s.passed()) out.push_back(s.name);
  }
  return out;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json suites_json = nlohmann::json::array();
  for (const auto& s : suites) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) checks.push_back(bpdiag::to_json(c));
    suites_json.push_back({{"name", s.name}, {"passed", s.passed()}, {"checks", checks}});
  }
  return {{"passed", passed()}, {"failed_suites", failed_suites()}, {"suites", suites_json}};
}

SuiteResult suite_pauli_oracles(const VerifyOptions& options) {
  SuiteResult res{"pauli_oracles", {}};
  Rng rng(SeedSpec{options.seed, 101});

  double worst_commute = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a = random_pauli(3, rng), b = random_pauli(3, rng);
    const Eigen::MatrixXcd ma = dense_matrix(a), mb = dense_matrix(b);
    const double comm = (ma * mb - mb * ma).norm();
    const double anti = (ma * mb + mb * ma).norm();
    worst_commute = std::max(worst_commute, commutes(a, b) ? comm : anti);
  }
  res.checks.push_back(at_most("commutation_matches_dense", worst_commute, 1e-12));

  double worst_eff = 0, worst_hs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4;
    const StateVector psi = random_state(n, rng);
    QubitSet gamma;
    for (int q = 0; q < n; ++q) {
      if (rng.below(2) == 1) gamma.push_back(q);
    }
    if (gamma.empty()) gamma.push_back(rng.below(n));
    PauliString g;
    do {
      const auto m = mask_of(gamma);
      g = PauliString(n, rng() & m, rng() & m);
    } while (g.is_identity());
    double brute = 0;
    for (const auto& p : enumerate_effective_set(gamma, g)) brute += std::pow(expect_pauli(psi, p), 2);
    brute = std::ldexp(brute, -static_cast<int>(gamma.size()));
    worst_eff = std::max(worst_eff, std::abs(brute - effective_hs_deviation_sq(psi, gamma, g)));

    double pauli_sum = 0;
    const auto m = mask_of(gamma);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < count; ++x) {
      for (std::uint64_t z = 0; z < count; ++z) {
        if ((x & ~m) || (z & ~m) || (x | z) == 0) continue;
        pauli_sum += std::pow(expect_pauli(psi, PauliString(n, x, z)), 2);
      }
    }
    pauli_sum = std::ldexp(pauli_sum, -static_cast<int>(gamma.size()));
    worst_hs = std::max(worst_hs, std::abs(pauli_sum - hs_deviation_sq(partial_trace(psi, gamma))));
  }
  res.checks.push_back(at_most("effective_deviation_matches_pauli_sum", worst_eff, 1e-12));
  res.checks.push_back(at_most("hs_deviation_matches_pauli_sum", worst_hs, 1e-12));
  return res;
}

SuiteResult suite_weingarten_tables(const VerifyOptions& options) {
  SuiteResult res{"weingarten_tables", {}};
  double worst_k2 = 0;
  for (int d = 2; d <= 6; ++d) {
    const auto t = options.provider(2, d);
    const double dd = d;
    worst_k2 = std::max(worst_k2, std::abs(t(Permutation::identity(2)) - 1.0 / (dd * dd - 1)));
    worst_k2 = std::max(worst_k2, std::abs(t(Permutation::from_cycles(2, {{1, 2}})) + 1.0 / (dd * (dd * dd - 1))));
  }
  res.checks.push_back(at_most("k2_closed_form", worst_k2, 1e-12));

  double worst_norm = 0, worst_class = 0;
  for (int k = 2; k <= 4; ++k) {
    for (int d = k; d <= 6; ++d) {
      const auto t = options.provider(k, d);
      double s = 0;
      for (std::size_t i = 0; i < t.perms.size(); ++i) s += t.values[i] * std::pow(double(d), t.perms[i].cycle_count());
      worst_norm = std::max(worst_norm, std::abs(s - 1.0));
      const auto types = t.by_cycle_type();
      for (std::size_t i = 0; i < t.perms.size(); ++i) {
        worst_class = std::max(worst_class, std::abs(t.values[i] - types.at(cycle_type(t.perms[i]))));
      }
    }
  }
  res.checks.push_back(at_most("normalization", worst_norm, 1e-10, "|sum_sigma Wg(sigma) d^#cycles(sigma) - 1|"));
  res.checks.push_back(at_most("class_function", worst_class, 1e-12));

  double worst_trace = 0;
  for (int n : {1, 2}) {
    const int d = 1 << n;
    const Eigen::MatrixXcd z = dense_matrix(PauliString::single(n, 0, 'Z'));
    const double h = std::sqrt(0.5);
    const Eigen::MatrixXcd s = h * Eigen::MatrixXcd::Identity(d, d) - Complex(0, h) * z;
    const Complex tr = trace_against_permutation(Permutation::identity(4), {s, s.adjoint(), s, s.adjoint()});
    worst_trace = std::max(worst_trace, std::abs(tr - std::pow(double(d), 4) / 4.0));
  }
  res.checks.push_back(at_most("shift_trace_identity", worst_trace, 1e-10, "Tr(V_id P) = d^4/4 for d = 2, 4"));

  Rng rng(SeedSpec{options.seed, 102});
  std::vector<Eigen::MatrixXcd> f;
  for (int l = 0; l < 4; ++l) f.push_back(ginibre(2, rng));
  const Eigen::MatrixXcd x = tensor_product(f);
  double worst_dense = 0;
  for (const auto& p : all_permutations(4)) {
    const Complex dense = (permutation_operator(p, 2) * x).trace();
    worst_dense = std::max(worst_dense, std::abs(dense - trace_against_permutation(p, f)));
  }
  res.checks.push_back(at_most("trace_against_permutation_dense", worst_dense, 1e-10));
  return res;
}

SuiteResult suite_haar_moments(const VerifyOptions& options) {
  SuiteResult res{"haar_moments", {}};
  constexpr int kOperators = 5;
  for (int k = 2; k <= 4; ++k) {
    for (int d = k; d <= 6; ++d) {
      const auto table = options.provider(k, d);
      Rng setup(SeedSpec{options.seed, static_cast<std::uint64_t>(200 + 10 * k + d)});
      struct Probe {
        std::vector<Eigen::MatrixXcd> factors;
        std::vector<Eigen::VectorXcd> bra, ket;
        Complex exact;
        double sum_re = 0, sum_im = 0, sq_re = 0, sq_im = 0;
      };
      std::vector<Probe> probes(kOperators);
      for (auto& p : probes) {
        for (int l = 0; l < k; ++l) {
          p.factors.push_back(ginibre(d, setup));
          p.bra.push_back(random_unit_vector(d, setup));
          p.ket.push_back(random_unit_vector(d, setup));
        }
        p.exact = twirl_matrix_element(table, p.factors, p.bra, p.ket);
      }
      Rng haar(SeedSpec{options.seed, static_cast<std::uint64_t>(300 + 10 * k + d)});
      for (std::size_t s = 0; s < options.haar_samples; ++s) {
        const Eigen::MatrixXcd u = sample_haar(d, haar);
        const Eigen::MatrixXcd ud = u.adjoint();
        for (auto& p : probes) {
          // <w|U A U^dagger|v> = (U^dagger w)^dagger A (U^dagger v)
          Complex v(1, 0);
          for (int l = 0; l < k; ++l) {
            const Eigen::VectorXcd a = ud * p.bra[static_cast<std::size_t>(l)];
            const Eigen::VectorXcd b = ud * p.ket[static_cast<std::size_t>(l)];
            v *= a.dot(p.factors[static_cast<std::size_t>(l)] * b);
          }
          p.sum_re += v.real();
          p.sum_im += v.imag();
          p.sq_re += v.real() * v.real();
          p.sq_im += v.imag() * v.imag();
        }
      }
      const double n = static_cast<double>(options.haar_samples);
      double worst = 0;
      for (const auto& p : probes) {
        const double mr = p.sum_re / n, mi = p.sum_im / n;
        const double ser = std::sqrt(std::max(p.sq_re / n - mr * mr, 0.0) / (n - 1));
        const double sei = std::sqrt(std::max(p.sq_im / n - mi * mi, 0.0) / (n - 1));
        worst = std::max(worst, std::abs(mr - p.exact.real()) / ser);
        worst = std::max(worst, std::abs(mi - p.exact.imag()) / sei);
      }
      res.checks.push_back(at_most("k" + std::to_string(k) + "_d" + std::to_string(d), worst, 5.0,
                                   "largest |z| of the moment formula against Haar Monte-Carlo"));
    }
  }
  return res;
}

SuiteResult suite_example2_exact(const VerifyOptions& options) {
  SuiteResult res{"example2_exact", {}};
  const Permutation p1 = Permutation::from_cycles(4, {{1, 4}, {2, 3}});
  const Permutation p2 = Permutation::from_cycles(4, {{1, 2, 3, 4}});
  double worst_diagram = 0;
  for (int n : {2, 3}) {
    const int d = 1 << n;
    const Eigen::MatrixXcd g = dense_matrix(example2_default_observable(n));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    psi(0) = 1;
    const std::vector<Eigen::VectorXcd> phi(4, psi);
    worst_diagram = std::max(worst_diagram, std::abs(contract_partial_transpose(p1, phi, g) - double(d)));
    worst_diagram = std::max(worst_diagram, std::abs(contract_partial_transpose(p2, phi, g) - double(d)));
  }
  res.checks.push_back(at_most("diagram_identities", worst_diagram, 1e-10, "(14)(23) and (1234) contractions equal d"));

  double worst_routes = 0;
  for (int n = 2; n <= 4; ++n) {
    const auto gen = example2_default_generator(n);
    const auto obs = example2_default_observable(n);
    const auto psi = example2_input_state(n);
    const auto a = example2_exact_r(gen, obs, psi, options.provider);
    const auto b = example2_exact_r_trace_pairing(gen, obs, psi, options.provider);
    worst_routes = std::max(worst_routes, std::abs(a.r - b.r));
  }
  res.checks.push_back(at_most("routes_agree", worst_routes, 1e-10, "partial-transpose route vs trace-pairing route"));
  return res;
}

SuiteResult suite_bounds(const VerifyOptions& options) {
  SuiteResult res{"bounds", {}};
  const SamplingOptions so{options.threads, 200};
  const std::size_t ns = options.samples;
  const std::uint64_t seed = options.seed;

  const int n = 5;
  const Ensemble tree = tree_ensemble(n);
  const auto oc = check_oc_bound(tree, PauliString::single(n, n - 1, 'Z'), ns, derive_seed(seed, "oc", n), so);
  res.checks.push_back(at_least("oc_tree_n5", oc.margin_z, -kBoundSigma));

  double worst_twirl = 0, worst_ratio = 0;
  Rng rng(SeedSpec{seed, 103});
  for (int trial = 0; trial < 5; ++trial) {
    double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double scale = rng.uniform01() / std::sqrt(x * x + y * y + z * z);
    x *= scale;
    y *= scale;
    z *= scale;
    const Eigen::Matrix2cd rho = density_from_bloch(x, y, z);
    const double r2 = x * x + y * y + z * z;
    const double twirled = clifford_twirled_square(rho, 'Z');
    worst_twirl = std::max(worst_twirl, std::abs(twirled - r2 / 3));
    const double dev = (rho * rho).trace().real() - 0.5;
    worst_ratio = std::max(worst_ratio, std::abs(twirled / dev - 2.0 / 3.0));
  }
  res.checks.push_back(at_most("clifford_twirl_closed_form", worst_twirl, 1e-10));
  res.checks.push_back(at_most("clifford_twirl_ratio", worst_ratio, 1e-10));
  const auto oc1 = check_oc_bound(fixed_bloch_ensemble(0.7), PauliString::single(1, 0, 'Z'), ns, derive_seed(seed, "oc", 1), so);
  res.checks.push_back(at_least("oc_single_qubit", oc1.margin_z, -kBoundSigma));

  const PauliString z_out = PauliString::single(n, n - 1, 'Z');
  const PauliString z_next = PauliString::single(n, n - 2, 'Z');
  const auto k1 = check_info_loss_bound(tree, {PauliTerm{1.0, z_out}}, ns, derive_seed(seed, "info", n), so);
  res.checks.push_back(at_least("info_loss_tree_n5_k1", k1.margin_z, -kBoundSigma));
  const auto k2 = batch_bound(tree, {{PauliTerm{1.0, z_out}}, {PauliTerm{1.0, z_next}}}, ns, derive_seed(seed, "batch", n), so);
  res.checks.push_back(at_least("batch_tree_n5_k2", k2.margin_z, -kBoundSigma));

  const Example1Layout layout{2, 1, 2};
  const Ensemble ex1 = example1_ensemble(2, 1, 2);
  const PauliString zz = example1_default_observable(layout);
  const PauliString x2 = PauliString::single(layout.total(), layout.n1, 'X');
  const auto e1 = check_info_loss_bound(ex1, {PauliTerm{1.0, zz}}, ns, derive_seed(seed, "info", 100), so);
  res.checks.push_back(at_least("info_loss_example1_k1", e1.margin_z, -kBoundSigma));
  const auto e2 = batch_bound(ex1, {{PauliTerm{1.0, zz}}, {PauliTerm{0.5, x2}}}, ns, derive_seed(seed, "batch", 100), so);
  res.checks.push_back(at_least("batch_example1_k2", e2.margin_z, -kBoundSigma));
  return res;
}

SuiteResult suite_variance_identity(const VerifyOptions& options) {
  SuiteResult res{"variance_identity", {}};
  const SamplingOptions so{options.threads, 200};
  for (int n : {3, 5, 7}) {
    const auto s = estimate_stats(tree_ensemble(n), options.samples, derive_seed(options.seed, "identity", n), so);
    res.checks.push_back(at_most("tree_n" + std::to_string(n), std::abs(s.identity_z), 3.0, "|identity_z|"));
  }
  const auto s = estimate_stats(example1_ensemble(2, 1, 2), options.samples, derive_seed(options.seed, "identity", 100), so);
  res.checks.push_back(at_most("example1_4_2_4", std::abs(s.identity_z), 3.0, "|identity_z|"));
  return res;
}

VerifyReport run_verify(const VerifyOptions& options) {
  VerifyReport rep;
  rep.suites.push_back(suite_pauli_oracles(options));
  rep.suites.push_back(suite_weingarten_tables(options));
  rep.suites.push_back(suite_haar_moments(options));
  rep.suites.push_back(suite_example2_exact(options));
  rep.suites.push_back(suite_bounds(options));
  rep.suites.push_back(suite_variance_identity(options));
  return rep;
}

}  // namespace bpdiag

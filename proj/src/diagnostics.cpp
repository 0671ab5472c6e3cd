#include "bpdiag/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bpdiag/parallel.hpp"

namespace bpdiag {

namespace {

constexpr std::uint64_t kBootstrapStream = ~std::uint64_t{0};

using Counts = std::vector<std::vector<std::uint32_t>>;

// Multiplicity of every sample in each bootstrap resample.
Counts resample_counts(std::size_t n, int resamples, std::uint64_t seed) {
  Rng rng(SeedSpec{seed, kBootstrapStream});
  Counts out(static_cast<std::size_t>(resamples), std::vector<std::uint32_t>(n, 0));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& c : out) {
    for (std::size_t i = 0; i < n; ++i) ++c[pick(rng)];
  }
  return out;
}

double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

void apply_clifford_layer(StateVector& state, Rng& rng) {
  for (int q = 0; q < state.n_qubits(); ++q) apply_matrix_1q(state, sample_single_qubit_clifford(rng), q);
}

struct Moments {
  double n = 0;
  double pp = 0, mm = 0, cc = 0, pm = 0, dd = 0, c = 0;
  // Differences accumulated directly so that t+ == t- gives exact zeros.
  double pp_minus_pm = 0, mm_minus_pm = 0, cc_minus_pm = 0;

  void add(const ShiftTriple& t, double w) {
    n += w;
    pp += w * t.t_plus * t.t_plus;
    mm += w * t.t_minus * t.t_minus;
    cc += w * t.t_center * t.t_center;
    const double cross = t.t_plus * t.t_minus;
    pm += w * cross;
    const double diff = t.t_plus - t.t_minus;
    dd += w * diff * diff;
    c += w * t.t_center;
    pp_minus_pm += w * (t.t_plus * t.t_plus - cross);
    mm_minus_pm += w * (t.t_minus * t.t_minus - cross);
    cc_minus_pm += w * (t.t_center * t.t_center - cross);
  }
};

struct Derived {
  double var_grad, second, cross, r, one_minus_r, mean_center, residual;
};

Derived derive(const Moments& m, double u, bool pool_center) {
  Derived d{};
  d.var_grad = u * u * m.dd / m.n;
  d.cross = m.pm / m.n;
  double gap;  // second - cross
  if (pool_center) {
    d.second = (m.pp + m.mm + m.cc) / (3 * m.n);
    gap = (m.pp_minus_pm + m.mm_minus_pm + m.cc_minus_pm) / (3 * m.n);
  } else {
    d.second = (m.pp + m.mm) / (2 * m.n);
    gap = (m.pp_minus_pm + m.mm_minus_pm) / (2 * m.n);
  }
  d.one_minus_r = d.second > 0 ? gap / d.second : std::numeric_limits<double>::quiet_NaN();
  d.r = 1.0 - d.one_minus_r;
  d.mean_center = m.c / m.n;
  d.residual = d.var_grad - 2 * u * u * gap;
  return d;
}

// Bootstrap standard error of the mean of each column, using shared resamples.
std::vector<Estimate> paired_means(const std::vector<std::vector<double>>& columns, const Counts& counts) {
  std::vector<Estimate> out;
  for (const auto& col : columns) {
    Estimate e;
    for (double v : col) e.value += v;
    e.value /= static_cast<double>(col.size());
    std::vector<double> boot;
    boot.reserve(counts.size());
    for (const auto& c : counts) {
      double s = 0;
      for (std::size_t i = 0; i < col.size(); ++i) s += c[i] * col[i];
      boot.push_back(s / static_cast<double>(col.size()));
    }
    e.se = sample_sd(boot);
    out.push_back(e);
  }
  return out;
}

double standardized(double diff, double se) {
  if (se > 0) return diff / se;
  if (diff == 0) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

void check_sample_count(std::size_t n) {
  if (n < kMinSamples) throw std::invalid_argument("at least 100 samples are required");
}

}  // namespace

ShiftTriple shift_eval(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks) {
  const std::size_t p = circuit.probe_gate();
  const GateSpec& gate = circuit.gates[p];
  if (!gate.has_shift_rule() || gate.shift_constant_u <= 0) throw std::invalid_argument("shift_eval: probe gate has no shift rule");
  if (params.size() != circuit.param_count) throw std::invalid_argument("shift_eval: parameter vector length mismatch");
  const double shift = std::numbers::pi / (4 * gate.shift_constant_u);

  StateVector prefix = StateVector::zero(circuit.n_qubits);
  apply_gates(prefix, circuit, params, blocks, 0, p);
  std::vector<double> shifted(params.begin(), params.end());
  auto branch = [&](double delta) {
    StateVector s = prefix;
    shifted[circuit.probe_index] = params[circuit.probe_index] + delta;
    apply_gates(s, circuit, shifted, blocks, p, circuit.gates.size());
    return expect_observable(s, circuit.observable);
  };
  ShiftTriple t;
  t.t_plus = branch(shift);
  t.t_minus = branch(-shift);
  t.t_center = branch(0.0);
  return t;
}

Ensemble tree_ensemble(int n) {
  Ensemble e;
  e.name = "tree";
  e.n_qubits = n;
  e.draw = [n](Rng& rng) {
    CircuitDraw d;
    d.circuit = build_tree_circuit(n, rng);
    d.params = sample_uniform_angles(d.circuit.param_count, rng);
    return d;
  };
  // Fail early on bad sizes.
  Rng probe_rng(SeedSpec{0, 0});
  (void)build_tree_circuit(n, probe_rng);
  return e;
}

Ensemble example1_ensemble(int n1, int n2, int n3) {
  const Example1Layout layout{n1, n2, n3};
  const Circuit circuit =
      build_example1(n1, n2, n3, example1_default_generator(layout), example1_default_observable(layout));
  Ensemble e = fixed_circuit_ensemble(circuit, "example1");
  return e;
}

Ensemble example2_ensemble(int n) {
  const Circuit circuit = build_example2(n, example2_default_generator(n), example2_default_observable(n));
  Ensemble e;
  e.name = "example2";
  e.n_qubits = n;
  e.translation_invariant = false;
  e.draw = [circuit](Rng& rng) {
    CircuitDraw d;
    d.circuit = circuit;
    d.params.assign(circuit.param_count, 0.0);
    d.blocks = resolve_haar_blocks(circuit, rng);
    return d;
  };
  return e;
}

Ensemble fixed_circuit_ensemble(Circuit circuit, std::string name) {
  circuit.validate();
  Ensemble e;
  e.name = std::move(name);
  e.n_qubits = circuit.n_qubits;
  e.draw = [circuit = std::move(circuit)](Rng& rng) {
    CircuitDraw d;
    d.circuit = circuit;
    d.params = sample_uniform_angles(circuit.param_count, rng);
    d.blocks = resolve_haar_blocks(circuit, rng);
    return d;
  };
  return e;
}

std::vector<ShiftTriple> sample_triples(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                        int threads) {
  std::vector<ShiftTriple> out(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Rng rng(SeedSpec{seed, i});
    const CircuitDraw d = ensemble.draw(rng);
    out[i] = shift_eval(d.circuit, d.params, d.blocks);
  });
  return out;
}

GradientStatsReport summarize_triples(const std::vector<ShiftTriple>& triples, double u, bool pool_center,
                                      std::uint64_t seed, int bootstrap_resamples) {
  check_sample_count(triples.size());
  if (bootstrap_resamples < 2) throw std::invalid_argument("need at least two bootstrap resamples");
  Moments full;
  for (const auto& t : triples) full.add(t, 1.0);
  const Derived point = derive(full, u, pool_center);

  const Counts counts = resample_counts(triples.size(), bootstrap_resamples, seed);
  std::vector<double> var, second, cross, r, omr, center, residual;
  for (const auto& c : counts) {
    Moments m;
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (c[i] != 0) m.add(triples[i], c[i]);
    }
    const Derived d = derive(m, u, pool_center);
    var.push_back(d.var_grad);
    second.push_back(d.second);
    cross.push_back(d.cross);
    r.push_back(d.r);
    omr.push_back(d.one_minus_r);
    center.push_back(d.mean_center);
    residual.push_back(d.residual);
  }

  GradientStatsReport rep;
  rep.n_samples = triples.size();
  rep.seed = seed;
  rep.u = u;
  rep.pooled_center = pool_center;
  rep.var_grad = {point.var_grad, sample_sd(var)};
  rep.second_moment = {point.second, sample_sd(second)};
  rep.cross_moment = {point.cross, sample_sd(cross)};
  rep.corr_r = {point.r, sample_sd(r)};
  rep.one_minus_r = {point.one_minus_r, sample_sd(omr)};
  rep.mean_center = {point.mean_center, sample_sd(center)};
  rep.identity_residual = point.residual;
  // Without center pooling the identity is algebraic; treat rounding-level residuals as zero.
  const double scale = std::abs(point.var_grad) + std::abs(point.var_grad - point.residual);
  const double residual_se = sample_sd(residual);
  rep.identity_z = std::abs(point.residual) <= 1e-12 * scale ? 0.0 : standardized(point.residual, residual_se);
  return rep;
}

GradientStatsReport estimate_stats(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                   const SamplingOptions& options, std::vector<ShiftTriple>& triples_out) {
  check_sample_count(n_samples);
  triples_out = sample_triples(ensemble, n_samples, seed, options.threads);
  Rng rng(SeedSpec{seed, 0});
  const double u = ensemble.draw(rng).circuit.probe().shift_constant_u;
  GradientStatsReport rep =
      summarize_triples(triples_out, u, ensemble.translation_invariant, seed, options.bootstrap_resamples);
  rep.ensemble = ensemble.name;
  rep.n_qubits = ensemble.n_qubits;
  return rep;
}

GradientStatsReport estimate_stats(const Ensemble& ensemble, std::size_t n_samples, std::uint64_t seed,
                                   const SamplingOptions& options) {
  std::vector<ShiftTriple> triples;
  return estimate_stats(ensemble, n_samples, seed, options, triples);
}

OcBoundResult check_oc_bound(const Ensemble& ensemble, const PauliString& g, std::size_t n_samples,
                             std::uint64_t seed, const SamplingOptions& options) {
  check_sample_count(n_samples);
  if (g.n_qubits() != ensemble.n_qubits) throw std::invalid_argument("check_oc_bound: observable width mismatch");
  if (g.is_identity()) throw std::invalid_argument("check_oc_bound: observable must be a non-identity Pauli");
  const QubitSet support = g.support();
  if (support.size() > 12) throw std::invalid_argument("check_oc_bound: |supp(g)| exceeds the partial-trace limit");

  std::vector<double> t_sq(n_samples), dev(n_samples);
  parallel_for(n_samples, options.threads, [&](std::size_t i) {
    Rng rng(SeedSpec{seed, i});
    const CircuitDraw d = ensemble.draw(rng);
    StateVector s = run_circuit(d.circuit, d.params, d.blocks);
    apply_clifford_layer(s, rng);
    const double t = expect_pauli(s, g);
    t_sq[i] = t * t;
    dev[i] = hs_deviation_sq(partial_trace(s, support));
  });

  const double factor = std::pow(2.0 / 3.0, static_cast<double>(support.size()));
  std::vector<double> scaled(n_samples), margin(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    scaled[i] = factor * dev[i];
    margin[i] = scaled[i] - t_sq[i];
  }
  const Counts counts = resample_counts(n_samples, options.bootstrap_resamples, seed);
  const auto est = paired_means({t_sq, scaled, margin}, counts);
  OcBoundResult res;
  res.lhs = est[0];
  res.rhs = est[1];
  res.margin_z = standardized(est[2].value, est[2].se);
  res.holds = res.margin_z >= -kBoundSigma;
  res.support_size = static_cast<int>(support.size());
  res.n_samples = n_samples;
  return res;
}

Eigen::Matrix2cd density_from_bloch(double x, double y, double z) {
  if (x * x + y * y + z * z > 1.0 + 1e-12) throw std::invalid_argument("density_from_bloch: |r| > 1");
  Eigen::Matrix2cd rho;
  rho << Complex(1 + z, 0), Complex(x, -y), Complex(x, y), Complex(1 - z, 0);
  return rho / 2.0;
}

double clifford_twirled_square(const Eigen::Matrix2cd& rho, char axis) {
  const Eigen::MatrixXcd p = dense_matrix(PauliString::single(1, 0, axis));
  double total = 0;
  for (const auto& c : single_qubit_cliffords()) {
    const double v = (c * rho * c.adjoint() * p).trace().real();
    total += v * v;
  }
  return total / 24.0;
}

BatchBoundResult batch_bound(const Ensemble& ensemble, const std::vector<std::vector<PauliTerm>>& batches,
                             std::size_t n_samples, std::uint64_t seed, const SamplingOptions& options) {
  check_sample_count(n_samples);
  if (batches.empty()) throw std::invalid_argument("batch_bound: no batches");
  std::vector<PauliTerm> all;
  for (const auto& b : batches) {
    if (b.empty()) throw std::invalid_argument("batch_bound: empty batch");
    for (const auto& t : b) {
      if (t.pauli.n_qubits() != ensemble.n_qubits) throw std::invalid_argument("batch_bound: observable width mismatch");
      for (const auto& seen : all) {
        if (seen.pauli == t.pauli) throw std::invalid_argument("batch_bound: batches overlap");
      }
      all.push_back(t);
    }
  }
  const std::size_t k = batches.size();
  std::vector<double> norm_sq(k);
  std::vector<QubitSet> supports(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double f = frobenius_norm(batches[j]);
    norm_sq[j] = f * f;
    std::uint64_t mask = 0;
    for (const auto& t : batches[j]) mask |= t.pauli.support_mask();
    supports[j] = qubits_of(mask);
  }

  std::vector<double> grad_sq(n_samples);
  std::vector<std::vector<double>> per_batch(k, std::vector<double>(n_samples));
  std::vector<QubitSet> gammas(k);
  parallel_for(n_samples, options.threads, [&](std::size_t i) {
    Rng rng(SeedSpec{seed, i});
    CircuitDraw d = ensemble.draw(rng);
    Circuit& c = d.circuit;
    c.observable = all;
    const std::size_t p = c.probe_gate();
    const GateSpec& gate = c.gates[p];
    const double u = gate.shift_constant_u;
    const std::uint64_t g_mask = gate.generator.support_mask();

    StateVector s = StateVector::zero(c.n_qubits);
    apply_gates(s, c, d.params, d.blocks, 0, p);
    apply_clifford_layer(s, rng);
    for (std::size_t j = 0; j < k; ++j) {
      QubitSet gamma = light_cone(c, supports[j], p + 1);
      const std::uint64_t gm = mask_of(gamma);
      double eff = 0;
      if (gm & g_mask) {
        gamma = qubits_of(gm | g_mask);
        if (static_cast<int>(gamma.size()) > kMaxLightCone) throw std::invalid_argument("batch_bound: light cone too large");
        eff = effective_hs_deviation_sq(s, gamma, gate.generator);
      }
      // Zero overlap means G commutes with the back-propagated batch: no gradient from it.
      if (i == 0) gammas[j] = gamma;
      per_batch[j][i] = u * u * norm_sq[j] * std::ldexp(1.0, static_cast<int>(gamma.size()) + 2) * eff;
    }

    std::array<Eigen::Matrix2cd, StateVector::kMaxQubits> tail{};
    for (int q = 0; q < c.n_qubits; ++q) tail[static_cast<std::size_t>(q)] = sample_single_qubit_clifford(rng);
    const double shift = std::numbers::pi / (4 * u);
    std::vector<double> params = d.params;
    auto branch = [&](double delta) {
      StateVector b = s;
      params[c.probe_index] = d.params[c.probe_index] + delta;
      apply_gates(b, c, params, d.blocks, p, c.gates.size());
      for (int q = 0; q < c.n_qubits; ++q) apply_matrix_1q(b, tail[static_cast<std::size_t>(q)], q);
      return expect_observable(b, c.observable);
    };
    const double grad = u * (branch(shift) - branch(-shift));
    grad_sq[i] = grad * grad;
  });

  std::vector<double> total(n_samples, 0.0), margin(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t j = 0; j < k; ++j) total[i] += per_batch[j][i];
    margin[i] = total[i] - grad_sq[i];
  }
  std::vector<std::vector<double>> columns{grad_sq, total, margin};
  for (const auto& b : per_batch) columns.push_back(b);
  const Counts counts = resample_counts(n_samples, options.bootstrap_resamples, seed);
  const auto est = paired_means(columns, counts);

  BatchBoundResult res;
  res.var_grad = est[0];
  res.total_bound = est[1];
  res.margin_z = standardized(est[2].value, est[2].se);
  res.holds = res.margin_z >= -kBoundSigma;
  res.ratio = res.total_bound.value > 0 ? res.var_grad.value / res.total_bound.value
                                        : (res.var_grad.value == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  res.n_samples = n_samples;
  for (std::size_t j = 0; j < k; ++j) res.batches.push_back({gammas[j], norm_sq[j], est[3 + j]});
  return res;
}

BatchBoundResult check_info_loss_bound(const Ensemble& ensemble, const std::vector<PauliTerm>& observable,
                                       std::size_t n_samples, std::uint64_t seed, const SamplingOptions& options) {
  return batch_bound(ensemble, {observable}, n_samples, seed, options);
}

SlopeFit slope_fit(const std::vector<double>& n, const std::vector<double>& values) {
  if (n.size() != values.size()) throw std::invalid_argument("slope_fit: length mismatch");
  if (n.size() < 3) throw std::invalid_argument("slope_fit: need at least three points");
  const std::size_t m = n.size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i])) throw std::invalid_argument("slope_fit: values must be positive");
    y[i] = std::log10(values[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += n[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (n[i] - mx) * (n[i] - mx);
    sxy += (n[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("slope_fit: abscissae are all equal");
  SlopeFit f;
  f.n_points = m;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - (f.intercept + f.slope * n[i]);
    sse += e * e;
  }
  f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  f.slope_se = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  return f;
}

}  // namespace bpdiag

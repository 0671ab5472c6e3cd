#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bpdiag/diagnostics.hpp"
#include "bpdiag/weingarten.hpp"

namespace bpdiag {
namespace {

// RY(theta)|0> measured in Z: C(theta) = cos(theta).
Circuit single_ry() {
  Circuit c;
  c.n_qubits = 1;
  c.gates.push_back(GateSpec::rotation(1, Axis::Y, 0, SymbolicParam{0}));
  c.param_count = 1;
  c.observable = {PauliTerm{1.0, PauliString::single(1, 0, 'Z')}};
  c.validate();
  return c;
}

TEST(ShiftEval, AnalyticSingleQubit) {
  const Circuit c = single_ry();
  for (double theta : {0.0, 0.3, 1.7, 4.0}) {
    const std::vector<double> p{theta};
    const auto t = shift_eval(c, p, {});
    EXPECT_NEAR(t.t_plus, std::cos(theta + std::numbers::pi / 2), 1e-14);
    EXPECT_NEAR(t.t_minus, std::cos(theta - std::numbers::pi / 2), 1e-14);
    EXPECT_NEAR(t.t_center, std::cos(theta), 1e-14);
    EXPECT_NEAR(0.5 * (t.t_plus - t.t_minus), -std::sin(theta), 1e-14);
  }
}

TEST(ShiftEval, MatchesFiniteDifferenceOnTree) {
  Rng rng(SeedSpec{21, 0});
  for (int n : {3, 4, 5}) {
    const Circuit c = build_tree_circuit(n, rng);
    auto params = sample_uniform_angles(c.param_count, rng);
    const auto t = shift_eval(c, params, {});
    const double grad = c.probe().shift_constant_u * (t.t_plus - t.t_minus);
    const double h = 1e-5;
    const std::size_t k = c.probe_index;
    const double base = params[k];
    params[k] = base + h;
    const double up = evaluate_cost(c, params, HaarBlocks{});
    params[k] = base - h;
    const double down = evaluate_cost(c, params, HaarBlocks{});
    params[k] = base;
    EXPECT_NEAR(grad, (up - down) / (2 * h), 1e-8);
    EXPECT_NEAR(t.t_center, evaluate_cost(c, params, HaarBlocks{}), 1e-13);
  }
}

TEST(ShiftEval, FullAngleGatesUseQuarterPiShift) {
  // exp(-i theta X0 X1) on |00>, measure Z0: C = cos(2 theta); shift pi/4.
  Circuit c;
  c.n_qubits = 2;
  c.gates.push_back(GateSpec::rxx(2, 0, 1, SymbolicParam{0}));
  c.param_count = 1;
  c.observable = {PauliTerm{1.0, PauliString::single(2, 0, 'Z')}};
  const std::vector<double> p{0.4};
  const auto t = shift_eval(c, p, {});
  EXPECT_NEAR(t.t_plus - t.t_minus, -2 * std::sin(0.8), 1e-14);
}

std::vector<ShiftTriple> synthetic(std::size_t n, std::uint64_t seed, double coupling) {
  Rng rng(SeedSpec{seed, 0});
  std::vector<ShiftTriple> out(n);
  for (auto& t : out) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    t.t_plus = a;
    t.t_minus = coupling * a + std::sqrt(1 - coupling * coupling) * b;
    t.t_center = c;
  }
  return out;
}

TEST(Summarize, PointEstimatesMatchDirectFormulas) {
  const auto tr = synthetic(500, 1, 0.6);
  const double u = 0.5;
  double pp = 0, mm = 0, pm = 0, dd = 0, cc = 0;
  for (const auto& t : tr) {
    pp += t.t_plus * t.t_plus;
    mm += t.t_minus * t.t_minus;
    cc += t.t_center * t.t_center;
    pm += t.t_plus * t.t_minus;
    dd += std::pow(t.t_plus - t.t_minus, 2);
  }
  const double n = tr.size();
  const auto rep = summarize_triples(tr, u, false, 9, 50);
  EXPECT_NEAR(rep.var_grad.value, u * u * dd / n, 1e-12);
  EXPECT_NEAR(rep.second_moment.value, (pp + mm) / (2 * n), 1e-12);
  EXPECT_NEAR(rep.cross_moment.value, pm / n, 1e-12);
  EXPECT_NEAR(rep.corr_r.value, (pm / n) / ((pp + mm) / (2 * n)), 1e-12);
  // Without center pooling the decomposition is an algebraic identity.
  EXPECT_EQ(rep.identity_z, 0.0);
  EXPECT_GT(rep.var_grad.se, 0.0);

  const auto pooled = summarize_triples(tr, u, true, 9, 50);
  EXPECT_NEAR(pooled.second_moment.value, (pp + mm + cc) / (3 * n), 1e-12);
  EXPECT_TRUE(std::isfinite(pooled.identity_z));
}

TEST(Summarize, ConstantResponseGivesExactlyUnitCorrelation) {
  std::vector<ShiftTriple> tr(200);
  Rng rng(SeedSpec{2, 0});
  for (auto& t : tr) t.t_plus = t.t_minus = t.t_center = rng.normal();
  const auto rep = summarize_triples(tr, 0.5, true, 3, 20);
  EXPECT_EQ(rep.var_grad.value, 0.0);
  EXPECT_EQ(rep.one_minus_r.value, 0.0);
  EXPECT_EQ(rep.corr_r.value, 1.0);
  EXPECT_EQ(rep.identity_z, 0.0);
}

TEST(Summarize, RejectsTooFewSamples) {
  EXPECT_THROW(summarize_triples(synthetic(99, 1, 0.1), 0.5, true, 1, 10), std::invalid_argument);
  EXPECT_THROW(summarize_triples(synthetic(200, 1, 0.1), 0.5, true, 1, 1), std::invalid_argument);
}

TEST(Summarize, BootstrapSeTracksAnalyticSe) {
  // Var of the mean of (a - b)^2 / 4 for independent standard normals: Var((a-b)^2)/16n = 8/16n.
  const auto tr = synthetic(4000, 5, 0.0);
  const auto rep = summarize_triples(tr, 0.5, false, 4, 400);
  const double analytic = std::sqrt(0.5 / tr.size());
  EXPECT_NEAR(rep.var_grad.se / analytic, 1.0, 0.2);
}

TEST(Sampling, ThreadCountDoesNotChangeResults) {
  const Ensemble e = tree_ensemble(5);
  const auto a = sample_triples(e, 150, 77, 1);
  const auto b = sample_triples(e, 150, 77, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].t_plus, b[i].t_plus);
    EXPECT_EQ(a[i].t_minus, b[i].t_minus);
    EXPECT_EQ(a[i].t_center, b[i].t_center);
  }
  const auto s1 = estimate_stats(e, 150, 77, {1, 30});
  const auto s3 = estimate_stats(e, 150, 77, {3, 30});
  EXPECT_EQ(s1.var_grad.value, s3.var_grad.value);
  EXPECT_EQ(s1.var_grad.se, s3.var_grad.se);
}

TEST(Sampling, VarianceIdentityHoldsOnTree) {
  const auto s = estimate_stats(tree_ensemble(3), 4000, 11, {1, 100});
  EXPECT_LE(std::abs(s.identity_z), 3.0);
  EXPECT_DOUBLE_EQ(s.u, 0.5);
  EXPECT_TRUE(s.pooled_center);
}

TEST(Sampling, Example1AgreesWithClosedFormMoments) {
  const auto s = estimate_stats(example1_ensemble(1, 1, 1), 20000, 12, {1, 100});
  const auto exact = example1_closed_form(2, 2, 2);
  EXPECT_LT(std::abs(s.second_moment.value - exact.second_moment), 5 * s.second_moment.se);
  EXPECT_LT(std::abs(s.cross_moment.value - exact.cross_moment), 5 * s.cross_moment.se);
  EXPECT_LT(std::abs(s.one_minus_r.value - exact.one_minus_r_exact), 5 * s.one_minus_r.se);
}

TEST(Sampling, Example2PoolsShiftedValuesOnly) {
  const auto e = example2_ensemble(2);
  EXPECT_FALSE(e.translation_invariant);
  const auto s = estimate_stats(e, 200, 13, {1, 20});
  EXPECT_FALSE(s.pooled_center);
  EXPECT_DOUBLE_EQ(s.u, 1.0);
}

TEST(CliffordTwirl, ClosedFormAndTwoThirdsRatio) {
  for (auto [x, y, z] : {std::tuple{0.3, -0.2, 0.5}, std::tuple{0.0, 0.0, 1.0}, std::tuple{0.6, 0.6, 0.1}}) {
    const auto rho = density_from_bloch(x, y, z);
    const double r2 = x * x + y * y + z * z;
    for (char axis : {'X', 'Y', 'Z'}) EXPECT_NEAR(clifford_twirled_square(rho, axis), r2 / 3, 1e-12);
    const double dev = (rho * rho).trace().real() - 0.5;
    EXPECT_NEAR(clifford_twirled_square(rho, 'Z') / dev, 2.0 / 3.0, 1e-12);
  }
  EXPECT_THROW(density_from_bloch(1, 1, 0), std::invalid_argument);
}

TEST(OcBound, HoldsOnTree) {
  const int n = 5;
  const auto r = check_oc_bound(tree_ensemble(n), PauliString::single(n, n - 1, 'Z'), 2000, 3, {1, 100});
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.support_size, 1);
  EXPECT_GT(r.rhs.value, 0.0);
}

// Bell pair at the cut: the reduced state on the light cone is maximally mixed, so
// both the bound and the gradient vanish for every Clifford draw.
Ensemble bell_ensemble() {
  Circuit c;
  c.n_qubits = 2;
  c.gates.push_back(GateSpec::dense_block({0, 1}, HaarBlock{0, false}));
  c.gates.push_back(GateSpec::rotation(2, Axis::Z, 0, SymbolicParam{0}));
  c.param_count = 1;
  c.observable = {PauliTerm{1.0, PauliString::single(2, 0, 'X')}};
  c.validate();
  const double h = std::sqrt(0.5);
  Eigen::MatrixXcd prep(4, 4);  // CNOT (H x 1) on block bits (0, 1)
  prep << h, h, 0, 0, 0, 0, h, -h, 0, 0, h, h, h, -h, 0, 0;
  Ensemble e;
  e.name = "bell";
  e.n_qubits = 2;
  e.draw = [c, prep](Rng& rng) { return CircuitDraw{c, sample_uniform_angles(1, rng), {{0, prep}}}; };
  return e;
}

TEST(BatchBound, ZeroForMaximallyMixedLightCone) {
  const auto r = check_info_loss_bound(bell_ensemble(), {PauliTerm{1.0, PauliString::single(2, 0, 'X')}}, 200, 4,
                                       {1, 20});
  EXPECT_NEAR(r.total_bound.value, 0.0, 1e-24);
  EXPECT_NEAR(r.var_grad.value, 0.0, 1e-24);
  EXPECT_TRUE(r.holds);
  ASSERT_EQ(r.batches.size(), 1u);
  EXPECT_EQ(r.batches[0].gamma, (QubitSet{0}));
}

TEST(BatchBound, HoldsOnTreeAndRejectsOverlap) {
  const int n = 5;
  const PauliString z1 = PauliString::single(n, n - 1, 'Z'), z2 = PauliString::single(n, n - 2, 'Z');
  const auto r = batch_bound(tree_ensemble(n), {{PauliTerm{1.0, z1}}, {PauliTerm{0.5, z2}}}, 1000, 5, {1, 100});
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.ratio, 1.0);
  ASSERT_EQ(r.batches.size(), 2u);
  EXPECT_NEAR(r.batches[1].norm_sq, 0.25 * (1 << n), 1e-12);
  EXPECT_THROW(batch_bound(tree_ensemble(n), {{PauliTerm{1.0, z1}}, {PauliTerm{2.0, z1}}}, 200, 5), std::invalid_argument);
  EXPECT_THROW(batch_bound(tree_ensemble(n), {}, 200, 5), std::invalid_argument);
}

TEST(SlopeFit, ExactLineAndErrors) {
  const std::vector<double> n{3, 5, 7, 9};
  std::vector<double> v;
  for (double x : n) v.push_back(std::pow(10.0, 2 - 0.5 * x));
  const auto f = slope_fit(n, v);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.intercept, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-10);
  EXPECT_EQ(f.n_points, 4u);
  EXPECT_THROW(slope_fit({1, 2}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(slope_fit({1, 2, 3}, {1, 0, 2}), std::invalid_argument);
  EXPECT_THROW(slope_fit({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
}

TEST(SlopeFit, NoisyLineHasSensibleRSquared) {
  const std::vector<double> n{1, 2, 3, 4, 5};
  const std::vector<double> v{1.0, 0.12, 0.009, 0.0011, 0.0001};
  const auto f = slope_fit(n, v);
  EXPECT_LT(f.slope, -0.9);
  EXPECT_GT(f.r_squared, 0.99);
  EXPECT_GT(f.slope_se, 0.0);
}

}  // namespace
}  // namespace bpdiag

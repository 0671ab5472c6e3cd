#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "bpdiag/pauli.hpp"
#include "bpdiag/randomness.hpp"
#include "oracles.hpp"

namespace bpdiag {
namespace {

TEST(PauliString, ParseRoundTripAndMasks) {
  const auto p = PauliString::parse("XYZI");
  EXPECT_EQ(p.n_qubits(), 4);
  EXPECT_EQ(p.x_mask(), 0b0011u);
  EXPECT_EQ(p.z_mask(), 0b0110u);
  EXPECT_EQ(p.str(), "XYZI");
  EXPECT_EQ(p.at(1), 'Y');
  EXPECT_EQ(p.support(), (QubitSet{0, 1, 2}));
  EXPECT_TRUE(PauliString::identity(3).is_identity());
  EXPECT_EQ(PauliString::single(3, 2, 'Z').str(), "IIZ");
}

TEST(PauliString, RejectsBadInput) {
  EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
  EXPECT_THROW(PauliString(2, 0b100, 0), std::invalid_argument);
  EXPECT_THROW(PauliString::single(2, 2, 'X'), std::out_of_range);
}

TEST(PauliString, DenseMatchesTextbookKron) {
  for (const std::string label : {"X", "Y", "Z", "XZ", "YI", "ZYX", "IYYZ"}) {
    EXPECT_LT((dense_matrix(PauliString::parse(label)) - oracle::pauli_matrix(label)).norm(), 1e-14) << label;
  }
}

TEST(PauliString, DenseIsHermitianInvolution) {
  Rng rng(SeedSpec{7, 0});
  for (int t = 0; t < 50; ++t) {
    const PauliString p(3, rng() & 7, rng() & 7);
    const Eigen::MatrixXcd m = dense_matrix(p);
    EXPECT_LT((m - m.adjoint()).norm(), 1e-14);
    EXPECT_LT((m * m - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-14);
  }
}

TEST(PauliString, CommutationMatchesDense) {
  Rng rng(SeedSpec{7, 1});
  for (int t = 0; t < 300; ++t) {
    const PauliString a(4, rng() & 15, rng() & 15), b(4, rng() & 15, rng() & 15);
    const Eigen::MatrixXcd ma = dense_matrix(a), mb = dense_matrix(b);
    if (commutes(a, b)) {
      EXPECT_LT((ma * mb - mb * ma).norm(), 1e-12);
    } else {
      EXPECT_LT((ma * mb + mb * ma).norm(), 1e-12);
    }
  }
}

TEST(EffectiveSet, HalfOfTheLocalPaulisAnticommute) {
  const QubitSet gamma{0, 2};
  const PauliString g = PauliString::parse("ZIX");
  const auto set = enumerate_effective_set(gamma, g);
  EXPECT_EQ(set.size(), 8u);  // 4^2 / 2
  std::set<std::string> seen;
  for (const auto& p : set) {
    EXPECT_FALSE(commutes(p, g));
    EXPECT_EQ(p.support_mask() & ~mask_of(gamma), 0u);
    seen.insert(p.str());
  }
  EXPECT_EQ(seen.size(), set.size());
  EXPECT_THROW(enumerate_effective_set({0}, g), std::invalid_argument);
}

TEST(FrobeniusNorm, MatchesDenseSum) {
  const std::vector<PauliTerm> terms{{0.5, PauliString::parse("XI")}, {-1.5, PauliString::parse("ZZ")},
                                     {2.0, PauliString::parse("IY")}};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  for (const auto& t : terms) m += t.coeff * dense_matrix(t.pauli);
  EXPECT_NEAR(frobenius_norm(terms), m.norm(), 1e-12);
}

TEST(Masks, RoundTrip) {
  EXPECT_EQ(mask_of({0, 3, 5}), 0b101001u);
  EXPECT_EQ(qubits_of(0b101001u), (QubitSet{0, 3, 5}));
}

}  // namespace
}  // namespace bpdiag

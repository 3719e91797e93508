#include <gtest/gtest.h>

#include "chasym/asymptotics.hpp"
#include "chasym/channel.hpp"
#include "corpus.hpp"

using namespace chasym;

TEST(QuantumChannel, RejectsNonTracePreserving) {
  EXPECT_THROW(QuantumChannel({2.0 * corpus::identity()}), InvalidChannel);
}

TEST(QuantumChannel, RejectsMixedShapes) {
  EXPECT_THROW(QuantumChannel({corpus::identity(2), corpus::identity(3)}), DimensionError);
}

TEST(Apply, IdentityChannel) {
  const QuantumChannel c({corpus::identity(3)});
  Rng rng(1);
  const ComplexMatrix rho = random_density(3, rng);
  EXPECT_LT((chasym::apply(c, rho) - rho).norm(), 1e-15);
}

TEST(Apply, PhaseChannelFixesZ) {
  const auto c = corpus::phase_channel(0.9);
  EXPECT_LT((chasym::apply(c, corpus::pauli_z()) - corpus::pauli_z()).norm(), 1e-15);
}

TEST(Apply, FlipChannelNegatesY) {
  const auto c = corpus::flip_channel();
  EXPECT_LT((chasym::apply(c, corpus::pauli_y()) + corpus::pauli_y()).norm(), 1e-15);
}

TEST(Apply, DimensionMismatchThrows) {
  EXPECT_THROW(chasym::apply(corpus::flip_channel(), corpus::identity(3)), DimensionError);
}

TEST(Apply, PreservesTraceHermiticityPositivity) {
  const auto c = random_channel(4, 3, 17);
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix rho = random_density(4, rng);
    const ComplexMatrix out = chasym::apply(c, rho);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
    EXPECT_LT((out - out.adjoint()).norm(), 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(out));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(ApplyAdjoint, Unital) {
  const auto c = random_channel(3, 2, 5);
  EXPECT_LT((apply_adjoint(c, corpus::identity(3)) - corpus::identity(3)).norm(), 1e-10);
}

TEST(ApplyAdjoint, HadamardIsAnnihilated) {
  EXPECT_LT(apply_adjoint(corpus::flip_channel(), corpus::hadamard()).norm(), 1e-12);
}

TEST(ApplyAdjoint, FrobeniusAdjointIdentity) {
  const auto c = random_channel(3, 3, 6);
  Rng rng(3);
  const ComplexMatrix o = rng.ginibre(3, 3), rho = random_density(3, rng);
  const Complex lhs = (o * chasym::apply(c, rho)).trace();
  const Complex rhs = (apply_adjoint(c, o) * rho).trace();
  EXPECT_LT(std::abs(lhs - rhs), 1e-10);
}

TEST(Liouville, IdentityChannel) {
  const QuantumChannel c({corpus::identity(2)});
  EXPECT_EQ(c.liouville().matrix, ComplexMatrix::Identity(4, 4));
}

TEST(Liouville, PhaseChannelIsDiagonal) {
  const double theta = 0.4;
  const auto c = corpus::phase_channel(theta);
  ComplexVector diag(4);
  diag << 1.0, std::polar(1.0, -theta), std::polar(1.0, theta), 1.0;
  EXPECT_LT((c.liouville().matrix - ComplexMatrix(diag.asDiagonal())).norm(), 1e-15);
}

TEST(Liouville, AgreesWithApply) {
  const auto c = random_channel(3, 2, 9);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix rho = rng.ginibre(3, 3);
    EXPECT_LT((c.liouville()(rho) - chasym::apply(c, rho)).norm(), 1e-12);
  }
}

TEST(PowerApply, FlipChannelSquaredFixesY) {
  const auto c = corpus::flip_channel();
  EXPECT_LT((power_apply(c, corpus::pauli_y(), 2) - corpus::pauli_y()).norm(), 1e-15);
  EXPECT_EQ(power_apply(c, corpus::pauli_y(), 1), chasym::apply(c, corpus::pauli_y()));
}

TEST(PowerApply, MatchesLiouvillePower) {
  const auto c = random_channel(3, 2, 10);
  Rng rng(5);
  const ComplexMatrix rho = random_density(3, rng);
  ComplexMatrix l = ComplexMatrix::Identity(9, 9);
  for (int i = 0; i < 7; ++i) l = l * c.liouville().matrix;
  EXPECT_LT((power_apply(c, rho, 7) - devectorize(l * vectorize(rho), 3, 3)).norm(), 1e-9);
}

TEST(CheckFaithful, PhaseChannelGivesMaximallyMixed) {
  const auto cert = check_faithful(corpus::phase_channel(0.3));
  ASSERT_TRUE(cert.has_value());
  EXPECT_LT((cert->fixed_point - corpus::identity() / 2.0).norm(), 1e-12);
}

TEST(CheckFaithful, IdentityChannel) {
  const auto cert = check_faithful(QuantumChannel({corpus::identity(3)}));
  ASSERT_TRUE(cert.has_value());
  EXPECT_NEAR(cert->min_eigenvalue, 1.0 / 3.0, 1e-12);
}

TEST(CheckFaithful, DecayingCornerIsNotFaithful) {
  const std::vector<BlockSpec> blocks{{2, 1, 0.5}};
  const auto s = random_structured_channel(blocks, 2, 44);
  EXPECT_FALSE(check_faithful(s.channel).has_value());
}

TEST(RandomChannel, OneDimensional) {
  const auto c = random_channel(1, 1, 3);
  EXPECT_NEAR(std::abs(c.kraus()[0](0, 0)), 1.0, 1e-14);
}

TEST(RandomChannel, Deterministic) {
  const auto a = random_channel(3, 2, 77), b = random_channel(3, 2, 77);
  EXPECT_EQ(a.kraus()[0], b.kraus()[0]);
  EXPECT_EQ(a.kraus()[1], b.kraus()[1]);
}

TEST(RandomChannel, TracePreserving) {
  EXPECT_LE(random_channel(4, 3, 7).tp_residual(), 1e-12);
}

TEST(RandomChannel, PeripheralSpectrumInsideUnitDisk) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexVector ev = eigenvalues(random_channel(3, 2, seed).liouville().matrix);
    EXPECT_LE(ev.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
  }
}

TEST(StructuredChannel, TrivialBlockIsUnitaryConjugateOfIdentity) {
  const std::vector<BlockSpec> blocks{{1, 1, 0.0}};
  const auto s = random_structured_channel(blocks, 0, 1);
  EXPECT_EQ(s.channel.dim(), 1);
  EXPECT_LT((s.channel.liouville().matrix - ComplexMatrix::Identity(1, 1)).norm(), 1e-12);
}

TEST(StructuredChannel, UnitaryBlockHasFourPeripheralEigenvalues) {
  const double theta = 0.8;
  const std::vector<BlockSpec> blocks{{2, 1, theta}};
  const auto s = random_structured_channel(blocks, 0, 2);
  const auto pairs = peripheral_spectrum(s.channel);
  ASSERT_EQ(pairs.size(), 4u);
  EXPECT_NEAR(pairs[0].lambda, 0.0, 1e-12);
  EXPECT_NEAR(pairs[1].lambda, 0.0, 1e-12);
  EXPECT_NEAR(pairs[2].lambda, theta, 1e-9);
  EXPECT_NEAR(pairs[3].lambda, -theta, 1e-9);
}

TEST(StructuredChannel, TracePreservingWithDecay) {
  const std::vector<BlockSpec> blocks{{2, 2, kPi / 3}, {1, 3, 0.0}};
  const auto s = random_structured_channel(blocks, 3, 5);
  EXPECT_EQ(s.channel.dim(), 10);
  EXPECT_LE(s.channel.tp_residual(), 1e-10);
}

TEST(StructuredChannel, SingleKrausCannotDecay) {
  const std::vector<BlockSpec> blocks{{2, 1, 0.3}};
  EXPECT_THROW(random_structured_channel(blocks, 1, 3, 1), ConstructionError);
}

TEST(PeriodicChannel, RootsOfUnityOnPeriphery) {
  const auto c = random_periodic_channel(3, 2, 1, 12);
  const auto pairs = peripheral_spectrum(c);
  ASSERT_EQ(pairs.size(), 3u);
  std::vector<PeripheralPair> copy = pairs;
  EXPECT_EQ(blocking_exponent(copy), 3);
}

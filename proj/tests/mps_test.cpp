#include <gtest/gtest.h>

#include "chasym/mps.hpp"
#include "chasym/structure.hpp"
#include "corpus.hpp"

using namespace chasym;

namespace {

MatrixProductState ghz(const ComplexMatrix& b = corpus::identity()) {
  return {corpus::ghz_tensors(), b};
}

MatrixProductState structured(std::uint64_t seed, Index decay = 2) {
  const std::vector<BlockSpec> blocks{{2, 1, kPi}, {1, 2, 0.0}};
  return corpus::mps_with_random_boundary(random_structured_channel(blocks, decay, seed).channel,
                                          seed + 100);
}

MatrixProductState injective(std::uint64_t seed) {
  return corpus::mps_with_random_boundary(random_primitive_channel(3, 2, seed), seed + 7);
}

// Rank-one boundary |r><l| with r in the decaying subspace and l in range(P).
ComplexMatrix twisted_boundary(const FourCorners& fc) {
  return fc.lr_basis.col(0) * fc.ul_basis.col(0).adjoint() +
         0.5 * fc.ul_basis.col(0) * fc.ul_basis.col(0).adjoint();
}

}  // namespace

TEST(TransferChannel, ProductStateIsOneDimensional) {
  ComplexMatrix a(1, 1), b(1, 1);
  a << 0.6;
  b << Complex(0.0, 0.8);
  const MatrixProductState m({a, b}, ComplexMatrix::Identity(1, 1));
  EXPECT_EQ(transfer_channel(m).dim(), 1);
}

TEST(TransferChannel, GhzHasTwoFixedPoints) {
  const auto c = transfer_channel(ghz());
  const auto pairs = peripheral_spectrum(c);
  ASSERT_EQ(pairs.size(), 2u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.lambda, 0.0);
    EXPECT_LT(std::abs(p.psi(0, 1)) + std::abs(p.psi(1, 0)), 1e-12);
  }
}

TEST(TransferChannel, NonCanonicalThrows) {
  const MatrixProductState m({corpus::identity(), corpus::identity()}, corpus::identity());
  EXPECT_THROW(transfer_channel(m), NotCanonical);
}

TEST(TransferChannel, RandomIsometricTensorsAreTracePreserving) {
  const auto c = random_channel(4, 3, 3);
  const MatrixProductState m(c.kraus(), corpus::identity(4));
  EXPECT_LT(transfer_channel(m).tp_residual(), 1e-10);
}

TEST(Canonicalize, CanonicalInputIsUnchanged) {
  const auto c = random_primitive_channel(3, 2, 5);
  const auto out = canonicalize(c.kraus());
  for (size_t i = 0; i < out.size(); ++i) EXPECT_LT((out[i] - c.kraus()[i]).norm(), 1e-9);
}

TEST(Canonicalize, RoundTripThroughSimilarity) {
  const auto c = random_primitive_channel(3, 2, 6);
  Rng rng(1);
  const ComplexMatrix s = ComplexMatrix::Identity(3, 3) + 0.3 * rng.ginibre(3, 3);
  std::vector<ComplexMatrix> skewed;
  for (const auto& a : c.kraus()) skewed.push_back(2.0 * s * a * s.inverse());
  const auto out = canonicalize(skewed);
  EXPECT_LT((kraus_gram(out) - ComplexMatrix::Identity(3, 3)).norm(), 1e-9);
}

TEST(Canonicalize, ScaledTensorsRecoverTracePreservation) {
  std::vector<ComplexMatrix> t = corpus::ghz_tensors();
  for (auto& a : t) a *= 2.0;
  const auto out = canonicalize(t);
  EXPECT_LT((kraus_gram(out) - corpus::identity()).norm(), 1e-12);
}

TEST(Canonicalize, NilpotentTensorsFail) {
  const std::vector<ComplexMatrix> t{corpus::sigma_plus()};
  EXPECT_THROW(canonicalize(t), CannotCanonicalize);
}

TEST(ObservableSuperop, IdentityGivesTransferMatrix) {
  const auto m = structured(1);
  EXPECT_LT((observable_superop(m, corpus::identity()).matrix - transfer_channel(m).liouville().matrix).norm(),
            1e-14);
}

TEST(ObservableSuperop, ProjectorOnGhz) {
  const auto m = ghz();
  const ComplexMatrix a0 = corpus::mat2(1, 0, 0, 0);
  EXPECT_LT((observable_superop(m, a0).matrix - kron(a0, a0)).norm(), 1e-15);
}

TEST(ObservableSuperop, HermitianObservablePreservesHermiticity) {
  const auto m = injective(2);
  Rng rng(2);
  const Superoperator s = observable_superop(m, random_hermitian(2, rng));
  const ComplexMatrix x = random_hermitian(3, rng);
  const ComplexMatrix y = s(x);
  EXPECT_LT((y - y.adjoint()).norm(), 1e-12);
}

TEST(ObservableSuperop, WrongShapeThrows) {
  EXPECT_THROW(observable_superop(ghz(), corpus::identity(3)), DimensionError);
}

TEST(Thermo, PeriodicChainNormalizationIsPeriod) {
  for (Index n : {2, 3, 4}) {
    const auto c = random_periodic_channel(n, 2, 0, 60 + static_cast<std::uint64_t>(n));
    const ThermodynamicLimit t(MatrixProductState(c.kraus(), corpus::identity(c.dim())));
    EXPECT_EQ(t.alpha(), n);
    EXPECT_NEAR(std::abs(t.normalization() - double(n)), 0.0, 1e-9);
  }
}

TEST(Thermo, UnblockedPeriodicSumVanishes) {
  // alpha = 1 on a chain of odd length: sum_n e^{i 2 pi n (2M+1) / 2} = 0.
  const auto c = random_periodic_channel(2, 2, 0, 70);
  const MatrixProductState m(c.kraus(), corpus::identity(c.dim()));
  const ThermoValue v = finite_chain_oracle(m, {}, 41);
  EXPECT_LT(std::abs(v.norm), 1e-6);
  EXPECT_NEAR(ThermodynamicLimit(m).normalization().real(), 2.0, 1e-9);
}

TEST(Thermo, InjectiveExpectationIgnoresBoundary) {
  Rng rng(3);
  const ComplexMatrix o = random_hermitian(2, rng);
  const auto c = random_primitive_channel(3, 2, 8);
  const Complex a = ThermodynamicLimit({c.kraus(), rng.ginibre(3, 3)}).expectation(o).normalized();
  const Complex b = ThermodynamicLimit({c.kraus(), rng.ginibre(3, 3)}).expectation(o).normalized();
  EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(Thermo, ReducedFormMatchesFullForm) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ThermodynamicLimit t(structured(seed));
    Rng rng(seed);
    const ComplexMatrix o = random_hermitian(2, rng);
    const ThermoValue full = t.expectation(o), red = t.reduced_expectation(o);
    EXPECT_LT(std::abs(full.raw - red.raw), 1e-8);
    EXPECT_LT(std::abs(full.norm - red.norm), 1e-8);
  }
}

TEST(Thermo, PeriodicBoundaryLeavesNoDecayTerm) {
  const ThermodynamicLimit t(MatrixProductState(structured(4).tensors, corpus::identity(6)));
  const auto& mix = t.mixture();
  EXPECT_EQ(mix.k(), 0);
  EXPECT_LT((mix.components[0] - ComplexMatrix::Identity(4, 4)).norm(), 1e-9);
}

TEST(Thermo, DegenerateBoundaryIsAnError) {
  // Boundary supported only on the decaying subspace, orthogonal to every dual.
  const auto s = structured(5);
  const ThermodynamicLimit probe(s);
  const ComplexMatrix b = probe.corners().q;
  const ThermodynamicLimit t(MatrixProductState(s.tensors, ComplexMatrix(b * 1e-0 * 0.0)));
  EXPECT_THROW(t.expectation(corpus::pauli_z()).normalized(), DegenerateBoundary);
}

TEST(Thermo, MatchesFiniteChainOnGhzWithDecay) {
  // GHZ tensors padded with decaying bond dimensions and a twisted boundary.
  Rng rng(11);
  const auto padded = extend_with_decay(corpus::ghz_tensors(), 2, rng, 0.5);
  const QuantumChannel c(padded);
  const ThermodynamicLimit probe(MatrixProductState(c.kraus(), corpus::identity(4)));
  const MatrixProductState m(c.kraus(), twisted_boundary(probe.corners()));
  const ThermodynamicLimit t(m);
  ComplexMatrix o = ComplexMatrix::Zero(c.kraus().size(), c.kraus().size());
  o(0, 0) = 1.0;
  const Complex thermo = t.expectation(o).normalized();
  double previous = 1e300;
  for (Index half = 5; half <= 65; half += 15) {
    const ThermoValue fin = finite_chain_oracle(m, {{half, o}}, 2 * half + 1);
    const double err = std::abs(fin.normalized() - thermo);
    EXPECT_LE(err, previous + 1e-12);
    previous = err;
  }
  EXPECT_LT(previous, 1e-6);
}

TEST(Mixture, NoDecayIsBoundaryAlone) {
  const auto m = injective(9);
  const ThermodynamicLimit t(m);
  ASSERT_EQ(t.mixture().components.size(), 1u);
  EXPECT_LT((t.mixture().components[0] - t.corners().ul_basis.adjoint() * m.boundary * t.corners().ul_basis).norm(),
            1e-12);
}

TEST(Mixture, ComponentsReproduceEffectiveBoundary) {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const ThermodynamicLimit t(structured(seed));
    const auto& mix = t.mixture();
    EXPECT_GE(mix.k(), 1);
    const ComplexMatrix& w = t.corners().ul_basis;
    Superoperator sum = Superoperator::zero(t.state().bond_dim);
    for (const auto& b : mix.components) sum = sum + boundary_superop(ComplexMatrix(w * b * w.adjoint()));
    const ComplexMatrix up = kron(w, ComplexMatrix(w.conjugate()));
    const ComplexMatrix eff_ul = up * up.adjoint() * mix.effective.matrix * up * up.adjoint();
    EXPECT_LT((sum.matrix - eff_ul).norm(), 1e-8);
  }
}

TEST(Mixture, ExpectationEqualsFullChannel) {
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    const ThermodynamicLimit t(structured(seed));
    Rng rng(seed);
    const ComplexMatrix o = random_hermitian(2, rng);
    EXPECT_LT(std::abs(t.mixture_expectation(o) - t.expectation(o).raw), 1e-8);
  }
}

TEST(Mixture, ZeroBoundaryGivesZero) {
  const auto s = structured(36);
  const ThermodynamicLimit t(MatrixProductState(s.tensors, ComplexMatrix::Zero(6, 6)));
  EXPECT_EQ(t.mixture_expectation(corpus::pauli_z()), Complex(0.0));
}

TEST(Correlator, IdentityPartnerGivesExpectation) {
  const ThermodynamicLimit t(injective(40));
  Rng rng(4);
  const ComplexMatrix o = random_hermitian(2, rng);
  EXPECT_LT(std::abs(t.correlator(o, corpus::identity(), 3).raw - t.expectation(o).raw), 1e-10);
  EXPECT_LT(std::abs(t.correlator(o, corpus::identity(), std::nullopt).raw - t.expectation(o).raw), 1e-10);
}

TEST(Correlator, InjectiveClustersAtInfinity) {
  const ThermodynamicLimit t(injective(41));
  Rng rng(5);
  const ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(2, rng);
  const Complex joint = t.correlator(a, b, std::nullopt).normalized();
  const Complex product = t.expectation(a).normalized() * t.expectation(b).normalized();
  EXPECT_LT(std::abs(joint - product), 1e-10);
}

TEST(Correlator, GhzZZIsOne) {
  Rng rng(6);
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 0) = 0.8;
  b(1, 1) = 0.3;
  const ThermodynamicLimit t(ghz(b));
  EXPECT_NEAR(t.correlator(corpus::pauli_z(), corpus::pauli_z(), std::nullopt).normalized().real(), 1.0, 1e-12);
  const double z = t.expectation(corpus::pauli_z()).normalized().real();
  EXPECT_NEAR(z, (0.64 - 0.09) / (0.64 + 0.09), 1e-12);
  const auto m = ghz(b);
  const ThermoValue fin = finite_chain_oracle(m, {{3, corpus::pauli_z()}, {9, corpus::pauli_z()}}, 13);
  EXPECT_NEAR(fin.normalized().real(), 1.0, 1e-12);
}

TEST(Correlator, FiniteSeparationMatchesChain) {
  const auto m = injective(42);
  const ThermodynamicLimit t(m);
  Rng rng(7);
  const ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(2, rng);
  const Complex thermo = t.correlator(a, b, 2).normalized();
  const ThermoValue fin = finite_chain_oracle(m, {{100, a}, {103, b}}, 204);
  EXPECT_LT(std::abs(fin.normalized() - thermo), 1e-8);
}

TEST(BoundaryObservable, IdentityIsNormalization) {
  // alpha = 1, so one extra transfer step leaves the projection unchanged.
  const std::vector<BlockSpec> blocks{{2, 1, 0.0}, {1, 2, 0.0}};
  const ThermodynamicLimit t(
      corpus::mps_with_random_boundary(random_structured_channel(blocks, 2, 50).channel, 150));
  ASSERT_EQ(t.alpha(), 1);
  EXPECT_LT(std::abs(t.boundary_observable(corpus::identity(), Side::left).raw - t.normalization()), 1e-10);
  EXPECT_LT(std::abs(t.boundary_observable(corpus::identity(), Side::right).raw - t.normalization()), 1e-10);
}

TEST(BoundaryObservable, SymmetricWithoutDecayForPeriodicBoundary) {
  // With a generic B the two chain ends touch different sides of B; B = I removes that.
  Rng rng(8);
  const ComplexMatrix o = random_hermitian(2, rng);
  const ThermodynamicLimit t(MatrixProductState(injective(51).tensors, corpus::identity(3)));
  EXPECT_LT(std::abs(t.boundary_observable(o, Side::left).raw - t.boundary_observable(o, Side::right).raw),
            1e-10);
}

TEST(BoundaryObservable, TwistedBoundaryBreaksSymmetry) {
  const std::vector<BlockSpec> blocks{{1, 2, 0.0}};
  const auto c = random_structured_channel(blocks, 2, 52).channel;
  const MatrixProductState m = corpus::mps_with_random_boundary(c, 53);
  const ThermodynamicLimit t(m);
  Rng rng(9);
  const ComplexMatrix o = random_hermitian(2, rng);
  const Complex left = t.boundary_observable(o, Side::left).normalized();
  const Complex right = t.boundary_observable(o, Side::right).normalized();
  EXPECT_GT(std::abs(left - right), 1e-3);
  const Index n = 40;
  EXPECT_LT(std::abs(finite_chain_oracle(m, {{0, o}}, n).normalized() - left), 1e-6);
  EXPECT_LT(std::abs(finite_chain_oracle(m, {{n - 1, o}}, n).normalized() - right), 1e-6);
}

TEST(FiniteChain, OracleAgreesWithEnumeration) {
  const auto m = structured(60);
  Rng rng(10);
  const ComplexMatrix o = random_hermitian(2, rng);
  for (Index length = 1; length <= 3; ++length) {
    const ThermoValue a = finite_chain_oracle(m, {{length - 1, o}}, length);
    const ThermoValue b = finite_chain_enumerate(m, {{length - 1, o}}, length);
    EXPECT_LT(std::abs(a.raw - b.raw), 1e-10);
    EXPECT_LT(std::abs(a.norm - b.norm), 1e-10);
  }
}

TEST(FiniteChain, ProductStateGivesSingleSiteValue) {
  ComplexMatrix a(1, 1), b(1, 1);
  a << 0.6;
  b << 0.8;
  const MatrixProductState m({a, b}, ComplexMatrix::Identity(1, 1));
  const ThermoValue v = finite_chain_oracle(m, {{2, corpus::pauli_z()}}, 5);
  EXPECT_NEAR(v.normalized().real(), 0.36 - 0.64, 1e-14);
}

TEST(FiniteChain, GhzCenterZVanishes) {
  const ThermoValue v = finite_chain_oracle(ghz(), {{2, corpus::pauli_z()}}, 5);
  EXPECT_NEAR(std::abs(v.normalized()), 0.0, 1e-15);
}

TEST(FiniteChain, RejectsBadSites) {
  EXPECT_THROW(finite_chain_oracle(ghz(), {{5, corpus::pauli_z()}}, 5), DimensionError);
  EXPECT_THROW(finite_chain_enumerate(ghz(), {}, 4), DimensionError);
}

TEST(LocalUnitary, ExpectationsAreInvariant) {
  const auto m = structured(70);
  Rng rng(11);
  const ComplexMatrix u = random_unitary(2, rng);
  const ComplexMatrix o = random_hermitian(2, rng);
  const ThermodynamicLimit a(m), b(rotate_physical(m, u));
  EXPECT_LT(std::abs(a.normalization() - b.normalization()), 1e-9);
  EXPECT_LT(std::abs(a.expectation(o).normalized() -
                     b.expectation(ComplexMatrix(u * o * u.adjoint())).normalized()), 1e-9);
}

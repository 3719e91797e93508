#include <gtest/gtest.h>

#include "chasym/asymptotics.hpp"
#include "chasym/corners.hpp"
#include "corpus.hpp"

using namespace chasym;

namespace {

ComplexMatrix stack(const std::vector<ComplexMatrix>& ms) {
  ComplexMatrix out(ms.front().size(), static_cast<Index>(ms.size()));
  for (size_t i = 0; i < ms.size(); ++i) out.col(static_cast<Index>(i)) = vectorize(ms[i]);
  return out;
}

void expect_eigen_pairs(const Superoperator& s, const std::vector<PeripheralPair>& pairs) {
  for (const auto& p : pairs) {
    const Complex mu = p.eigenvalue();
    EXPECT_LE((s(p.psi) - mu * p.psi).norm(), 1e-7 * p.psi.norm());
    EXPECT_LE((s.adjoint()(p.j) - std::conj(mu) * p.j).norm(), 1e-7 * p.j.norm());
  }
  for (size_t a = 0; a < pairs.size(); ++a)
    for (size_t b = 0; b < pairs.size(); ++b) {
      const Complex g = (pairs[a].j.adjoint() * pairs[b].psi).trace();
      EXPECT_NEAR(std::abs(g - (a == b ? 1.0 : 0.0)), 0.0, 1e-7);
    }
}

}  // namespace

TEST(PeripheralSpectrum, PhaseChannel) {
  const double theta = 2 * kPi / 5;
  const auto c = corpus::phase_channel(theta);
  const auto pairs = peripheral_spectrum(c);
  ASSERT_EQ(pairs.size(), 4u);
  EXPECT_EQ(pairs[0].lambda, 0.0);
  EXPECT_EQ(pairs[1].lambda, 0.0);
  EXPECT_NEAR(pairs[2].lambda, theta, 1e-12);
  EXPECT_NEAR(pairs[3].lambda, -theta, 1e-12);
  EXPECT_LT(span_excess(stack({pairs[0].psi, pairs[1].psi}),
                        stack({corpus::identity(), corpus::pauli_z()})), 1e-10);
  // U sigma_- U^dagger = e^{i theta} sigma_-, so sigma_- rotates with +theta.
  EXPECT_LT(span_excess(stack({pairs[2].psi}), stack({corpus::sigma_minus()})), 1e-10);
  EXPECT_LT(span_excess(stack({pairs[3].psi}), stack({corpus::sigma_plus()})), 1e-10);
  expect_eigen_pairs(c.liouville(), pairs);
}

TEST(PeripheralSpectrum, FlipChannel) {
  const auto pairs = peripheral_spectrum(corpus::flip_channel());
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].lambda, 0.0);
  EXPECT_EQ(pairs[1].lambda, kPi);
  EXPECT_LT((pairs[0].psi - corpus::identity() / std::sqrt(2.0)).norm(), 1e-12);
  EXPECT_LT(distance_up_to_phase(pairs[1].psi, corpus::pauli_y() / std::sqrt(2.0)), 1e-12);
  EXPECT_LT(distance_up_to_phase(pairs[1].j, corpus::pauli_y() / std::sqrt(2.0)), 1e-12);
}

TEST(PeripheralSpectrum, PrimitiveChannelHasOnePair) {
  const auto c = random_primitive_channel(3, 2, 31);
  const auto pairs = peripheral_spectrum(c);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].lambda, 0.0);
  const Complex scale = pairs[0].j(0, 0);
  EXPECT_LT((pairs[0].j - scale * corpus::identity(3)).norm(), 1e-9);
  const Superoperator lim = power_limit_oracle(c, 1, 1e-11);
  const ComplexMatrix fixed = lim(corpus::identity(3) / 3.0);
  EXPECT_LT(distance_up_to_phase(pairs[0].psi / pairs[0].psi.norm(), fixed / fixed.norm()), 1e-9);
}

TEST(PeripheralSpectrum, DegenerateGroupsAreExactEigenvectors) {
  // An instance on which the divide-and-conquer SVD returns wrong factors.
  const std::vector<BlockSpec> blocks{{3, 1, 2 * kPi / 3}, {1, 1, kPi / 3}};
  const auto c = random_structured_channel(blocks, 0, 1115).channel;
  const auto pairs = peripheral_spectrum(c);
  ASSERT_EQ(pairs.size(), 10u);
  for (const auto& p : pairs) {
    EXPECT_LT((apply_adjoint(c, p.j) - std::polar(1.0, -p.lambda) * p.j).norm(), 1e-10);
    EXPECT_LT((chasym::apply(c, p.psi) - p.eigenvalue() * p.psi).norm(), 1e-10);
  }
}

TEST(PeripheralSpectrum, RejectsJordanBlock) {
  // A non-diagonalizable superoperator with a peripheral Jordan block.
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(peripheral_spectrum(Superoperator{2, m}), PeripheralJordanError);
}

TEST(BlockingExponent, ZeroPhases) {
  std::vector<PeripheralPair> pairs(2);
  for (auto& p : pairs) p.psi = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(blocking_exponent(pairs), 1);
}

TEST(BlockingExponent, PiGivesTwo) {
  std::vector<PeripheralPair> pairs(1);
  pairs[0].lambda = kPi;
  pairs[0].psi = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(blocking_exponent(pairs), 2);
  EXPECT_EQ(pairs[0].root_order, 2);
}

TEST(BlockingExponent, LcmOfThreeAndTwo) {
  std::vector<PeripheralPair> pairs(2);
  pairs[0].lambda = 2 * kPi / 3;
  pairs[1].lambda = kPi;
  for (auto& p : pairs) p.psi = ComplexMatrix::Identity(3, 3);
  EXPECT_EQ(blocking_exponent(pairs), 6);
}

TEST(BlockingExponent, IrrationalPhaseThrows) {
  std::vector<PeripheralPair> pairs(1);
  pairs[0].lambda = 1.0;
  pairs[0].psi = ComplexMatrix::Identity(2, 2);
  EXPECT_THROW(blocking_exponent(pairs), IrrationalPhase);
}

TEST(BlockingExponent, NilpotentPhaseMayExceedDimension) {
  const auto ap = asymptotic_projection(corpus::phase_channel(2.0 * kPi / 5.0));
  EXPECT_EQ(ap.alpha, 5);
}

TEST(AsymptoticProjection, PrimitiveIsRankOne) {
  const auto c = random_primitive_channel(3, 3, 8);
  const auto ap = asymptotic_projection(c);
  EXPECT_EQ(ap.alpha, 1);
  Rng rng(1);
  const ComplexMatrix rho = random_density(3, rng);
  EXPECT_LT((ap.superop(rho) - ap.pairs[0].psi * (ap.pairs[0].j.adjoint() * rho).trace()).norm(), 1e-12);
  EXPECT_LT((ap.superop * ap.superop - ap.superop).norm(), 1e-8);
}

TEST(AsymptoticProjection, UnitaryChannelKeepsCommutant) {
  Rng rng(2);
  const QuantumChannel c({random_unitary(3, rng)});
  const auto ap = asymptotic_projection(c);
  EXPECT_EQ(ap.pairs.size(), 9u);
  EXPECT_LT((ap.superop.matrix - ComplexMatrix::Identity(9, 9)).norm(), 1e-8);
}

TEST(AsymptoticProjection, IrrationalPhaseStillProjects) {
  const auto ap = asymptotic_projection(corpus::phase_channel(1.0));
  EXPECT_FALSE(ap.alpha.has_value());
  EXPECT_LT((ap.superop.matrix - ComplexMatrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(AsymptoticProjection, MatchesPowerOracle) {
  const std::vector<BlockSpec> blocks{{2, 2, kPi / 2}, {1, 2, 0.0}};
  const auto s = random_structured_channel(blocks, 2, 19);
  const auto ap = asymptotic_projection(s.channel);
  ASSERT_TRUE(ap.alpha.has_value());
  EXPECT_EQ(*ap.alpha, 4);
  const Superoperator lim = power_limit_oracle(s.channel, *ap.alpha, 1e-11);
  EXPECT_LT((ap.superop.matrix - lim.matrix).norm(), 1e-7);
  EXPECT_LT((ap.superop * s.channel.liouville() * s.channel.liouville() * s.channel.liouville() *
                 s.channel.liouville() - ap.superop).norm(), 1e-8);
}

TEST(PowerLimitOracle, FlipChannelBlockedByTwo) {
  const Superoperator lim = power_limit_oracle(corpus::flip_channel(), 2, 1e-14);
  const ComplexMatrix basis = stack({corpus::identity(), corpus::pauli_y()}) / std::sqrt(2.0);
  EXPECT_LT((lim.matrix - basis * basis.adjoint()).norm(), 1e-12);
}

TEST(PowerLimitOracle, WrongAlphaDoesNotConverge) {
  EXPECT_THROW(power_limit_oracle(corpus::flip_channel(), 1, 1e-12), ConvergenceError);
}

TEST(ExtendConserved, NoDecayIsIdentity) {
  const auto c = corpus::phase_channel(0.5);
  const FourCorners fc = four_corners(c);
  EXPECT_EQ(fc.lr_dim(), 0);
  EXPECT_EQ(extend_conserved(c, fc, corpus::sigma_plus(), 0.5), corpus::sigma_plus());
}

TEST(ExtendConserved, MatchesEigensolver) {
  const std::vector<BlockSpec> blocks{{2, 1, 2 * kPi / 3}, {1, 2, 0.0}};
  const auto s = random_structured_channel(blocks, 3, 23);
  const auto ap = asymptotic_projection(s.channel);
  const FourCorners fc = four_corners(ap.superop);
  ASSERT_EQ(fc.lr_dim(), 3);
  for (const auto& p : ap.pairs) {
    const ComplexMatrix jul = corner_project(fc, p.j, Corner::ul);
    const ComplexMatrix j = extend_conserved(s.channel, fc, jul, p.lambda);
    EXPECT_LT((j - p.j).norm(), 1e-7 * std::max(1.0, p.j.norm()));
    EXPECT_LT(corner_project(fc, j, Corner::of).norm(), 1e-8);
  }
}

TEST(AsymptoticCoefficient, MatchesBruteForce) {
  const std::vector<BlockSpec> blocks{{2, 1, kPi / 2}, {1, 2, 0.0}};
  const auto s = random_structured_channel(blocks, 2, 29);
  const auto ap = asymptotic_projection(s.channel);
  const FourCorners fc = four_corners(ap.superop);
  const Superoperator lim = power_limit_oracle(s.channel, *ap.alpha, 1e-11);
  Rng rng(6);
  const ComplexMatrix rho = random_density(s.channel.dim(), rng);
  for (const auto& p : ap.pairs) {
    const Complex closed = asymptotic_coefficient(s.channel, fc, corner_project(fc, p.j, Corner::ul),
                                                  p.lambda, rho);
    const Complex brute = (p.j.adjoint() * lim(rho)).trace();
    EXPECT_LT(std::abs(closed - brute), 1e-8);
  }
}

TEST(AsymptoticCoefficient, UlStateReducesToTrace) {
  const std::vector<BlockSpec> blocks{{1, 2, 0.0}};
  const auto s = random_structured_channel(blocks, 2, 30);
  const auto ap = asymptotic_projection(s.channel);
  const FourCorners fc = four_corners(ap.superop);
  const ComplexMatrix rho = fc.p / fc.p.trace();
  const ComplexMatrix jul = corner_project(fc, ap.pairs[0].j, Corner::ul);
  EXPECT_LT(std::abs(asymptotic_coefficient(s.channel, fc, jul, 0.0, rho) -
                     (jul.adjoint() * rho).trace()), 1e-12);
}

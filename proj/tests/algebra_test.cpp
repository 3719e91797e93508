#include <gtest/gtest.h>

#include "chasym/algebra.hpp"
#include "corpus.hpp"

using namespace chasym;

namespace {

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

bool closed_under_products(const std::vector<ComplexMatrix>& basis) {
  const ComplexMatrix q = stack_vectorized(basis);
  for (const auto& x : basis)
    for (const auto& y : basis) {
      const ComplexVector v = vectorize(ComplexMatrix(x * y));
      if ((v - q * (q.adjoint() * v)).norm() > 1e-9) return false;
    }
  return true;
}

}  // namespace

TEST(GenerateAlgebra, RaisingOperatorGeneratesFullMatrixAlgebra) {
  const std::vector<ComplexMatrix> gens{corpus::sigma_plus()};
  const auto basis = generate_algebra(gens);
  EXPECT_EQ(basis.size(), 4u);
}

TEST(GenerateAlgebra, IdentityIsOneDimensional) {
  const std::vector<ComplexMatrix> gens{corpus::identity(3)};
  EXPECT_EQ(generate_algebra(gens).size(), 1u);
}

TEST(GenerateAlgebra, DiagonalGeneratorStaysCommutative) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 5.0;
  const std::vector<ComplexMatrix> gens{d};
  const auto basis = generate_algebra(gens);
  EXPECT_EQ(basis.size(), 3u);
  EXPECT_TRUE(closed_under_products(basis));
}

TEST(GenerateAlgebra, BasisIsOrthonormal) {
  Rng rng(4);
  const std::vector<ComplexMatrix> gens{rng.ginibre(3, 3)};
  const auto basis = generate_algebra(gens);
  EXPECT_EQ(basis.size(), 9u);
  const ComplexMatrix q = stack_vectorized(basis);
  EXPECT_LT((q.adjoint() * q - ComplexMatrix::Identity(9, 9)).norm(), 1e-10);
}

TEST(GenerateAlgebra, BlockGeneratorsCloseToDirectSum) {
  // M_2 (x) I_2 on the first four coordinates, scalars on the last three.
  const ComplexMatrix i2 = corpus::identity(2), i3 = corpus::identity(3);
  const ComplexMatrix zero4 = ComplexMatrix::Zero(4, 4), zero3 = ComplexMatrix::Zero(3, 3);
  const std::vector<ComplexMatrix> gens{
      block_diag(kron(corpus::sigma_plus(), i2), zero3),
      block_diag(kron(corpus::pauli_z(), i2), zero3),
      block_diag(zero4, i3),
  };
  const auto basis = generate_algebra(gens);
  EXPECT_EQ(basis.size(), 5u);
  EXPECT_TRUE(closed_under_products(basis));
}

TEST(AlgebraCenter, FullMatrixAlgebraHasScalarCenter) {
  const std::vector<ComplexMatrix> gens{corpus::sigma_plus()};
  const auto basis = generate_algebra(gens);
  Rng rng(1);
  const auto center = algebra_center(basis, rng);
  ASSERT_EQ(center.size(), 1u);
  const Complex s = center[0](0, 0);
  EXPECT_LT((center[0] - s * corpus::identity()).norm(), 1e-9);
}

TEST(AlgebraCenter, CommutativeAlgebraIsItsOwnCenter) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 5.0;
  const std::vector<ComplexMatrix> gens{d};
  const auto basis = generate_algebra(gens);
  Rng rng(2);
  EXPECT_EQ(algebra_center(basis, rng).size(), 3u);
}

TEST(AlgebraCenter, DirectSumHasTwoCentralElements) {
  const ComplexMatrix i2 = corpus::identity(2), i3 = corpus::identity(3);
  ComplexMatrix a = ComplexMatrix::Zero(7, 7), b = ComplexMatrix::Zero(7, 7);
  a.topLeftCorner(4, 4) = kron(corpus::sigma_plus(), i2);
  b.bottomRightCorner(3, 3) = i3;
  const std::vector<ComplexMatrix> gens{a, b};
  const auto basis = generate_algebra(gens);
  Rng rng(3);
  EXPECT_EQ(algebra_center(basis, rng).size(), 2u);
}

TEST(RandomHermitianElement, IsHermitianAndInSpan) {
  const std::vector<ComplexMatrix> gens{corpus::pauli_z()};
  const auto basis = generate_algebra(gens);
  Rng rng(5);
  const ComplexMatrix h = random_hermitian_element(basis, rng);
  EXPECT_LT((h - h.adjoint()).norm(), 1e-14);
  EXPECT_LT(std::abs(h(0, 1)) + std::abs(h(1, 0)), 1e-14);
}

TEST(RandomHermitianElement, EmptySpanThrows) {
  Rng rng(6);
  EXPECT_THROW(random_hermitian_element({}, rng), DimensionError);
}

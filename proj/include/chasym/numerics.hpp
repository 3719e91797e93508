#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "chasym/errors.hpp"
#include "chasym/tolerance.hpp"

namespace chasym {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;

// Row-major stacking: entry (i, j) lands at index i * cols + j. With this
// convention the map X -> L X R^dagger is the matrix kron(L, conj(R)).
template <typename Derived>
DenseVector<typename Derived::Scalar> vectorize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return Eigen::Map<const DenseVector<Scalar>>(rm.data(), rm.size());
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar> devectorize(const Eigen::MatrixBase<Derived>& v, Index rows,
                                                  Index cols) {
  using Scalar = typename Derived::Scalar;
  if (v.size() != rows * cols)
    throw DimensionError("devectorize: vector length does not match rows*cols");
  const DenseVector<Scalar> dense = v;
  return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      dense.data(), rows, cols);
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar> devectorize(const Eigen::MatrixBase<Derived>& v) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  return devectorize(v, side, side);
}

template <typename A, typename B>
DenseMatrix<typename A::Scalar> kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return Eigen::kroneckerProduct(a.eval(), b.eval()).eval();
}

/// Linear map on D x D matrices stored as a D^2 x D^2 matrix acting on vectorize().
struct Superoperator {
  Index dim = 0;
  ComplexMatrix matrix;

  Superoperator() = default;
  Superoperator(Index dim, ComplexMatrix matrix);

  static Superoperator identity(Index dim);
  static Superoperator zero(Index dim);
  // X -> left * X * right^dagger
  static Superoperator sandwich(const ComplexMatrix& left, const ComplexMatrix& right);
  static Superoperator from_kraus(std::span<const ComplexMatrix> kraus);

  ComplexMatrix operator()(const ComplexMatrix& x) const;
  Superoperator adjoint() const { return {dim, matrix.adjoint()}; }
  double norm() const { return matrix.norm(); }
};

Superoperator operator*(const Superoperator& a, const Superoperator& b);
Superoperator operator+(const Superoperator& a, const Superoperator& b);
Superoperator operator-(const Superoperator& a, const Superoperator& b);
Superoperator operator*(Complex s, const Superoperator& a);

/// Right and left eigenvectors stored as columns; left columns l satisfy
/// l^dagger M = mu l^dagger.
struct EigenDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix right;
  ComplexMatrix left;
};

// Clusters values whose pairwise distance chains are within tol (single linkage).
// Clusters are returned in order of their first member.
std::vector<std::vector<Index>> cluster_values(const ComplexVector& values, double tol);

// Eigenvalues of a square matrix (Hessenberg reduction + shifted QR).
ComplexVector eigenvalues(const ComplexMatrix& m);

EigenDecomposition eigendecompose(const ComplexMatrix& m, const Tolerances& tol = {});

struct Svd {
  ComplexMatrix u;
  Eigen::VectorXd s;
  ComplexMatrix v;
};

// BDCSVD, falling back to JacobiSVD when the factors do not reproduce m (a
// divide-and-conquer defect in some Eigen releases). Thin factors unless full.
Svd checked_svd(const ComplexMatrix& m, bool full = false);

struct NullSpace {
  ComplexMatrix right;            // columns spanning the approximate kernel
  ComplexMatrix left;             // columns spanning the kernel of m^dagger
  Eigen::VectorXd singular_values;  // the discarded-side (smallest) singular values
};

// The `count` smallest right/left singular directions of a square matrix.
NullSpace null_space(const ComplexMatrix& m, Index count);

// Orthonormal basis for the column span; columns with relative singular
// value below rel_tol are dropped.
ComplexMatrix orthonormal_columns(const ComplexMatrix& columns, double rel_tol);

// Inverse of s restricted to span(basis) (which must be s-invariant), zero on
// the orthogonal complement.
Superoperator restricted_inverse(const Superoperator& s, std::span<const ComplexMatrix> basis,
                                 double tol_sing = Tolerances{}.sing);

ComplexMatrix choi_matrix(const Superoperator& s);
Superoperator superop_from_choi(const ComplexMatrix& choi, Index dim);
std::vector<ComplexMatrix> kraus_from_choi(const Superoperator& s,
                                           double tol_rank = Tolerances{}.rank);

ComplexMatrix polar_unitary(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// f applied to the spectrum of a Hermitian matrix.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  Eigen::VectorXd values = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * values.asDiagonal() * es.eigenvectors().adjoint();
}

// Maps any angle into (-pi, pi].
double canonical_phase(double angle);

// Phase-insensitive distance: min over global phases of ||a - e^{i phi} b||_F.
double distance_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest singular value of (column-space of a) not contained in span(b):
// zero iff span(a) is inside span(b).
double span_excess(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace chasym

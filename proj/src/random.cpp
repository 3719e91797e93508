#include "chasym/random.hpp"

#include <Eigen/QR>

namespace chasym {

ComplexMatrix Rng::ginibre(Index rows, Index cols) {
  ComplexMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = complex_normal();
  return g;
}

ComplexMatrix random_isometry(Index rows, Index cols, Rng& rng) {
  if (rows < cols) throw DimensionError("random_isometry: rows < cols");
  Eigen::HouseholderQR<ComplexMatrix> qr(rng.ginibre(rows, cols));
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar rather than QR-biased.
  for (Index j = 0; j < cols; ++j) {
    const Complex diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

ComplexMatrix random_unitary(Index n, Rng& rng) { return random_isometry(n, n, rng); }

ComplexMatrix random_hermitian(Index n, Rng& rng) { return hermitian_part(rng.ginibre(n, n)); }

ComplexMatrix random_density(Index n, Rng& rng) {
  const ComplexMatrix g = rng.ginibre(n, n);
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace chasym

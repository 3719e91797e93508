#include "chasym/algebra.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace chasym {

ComplexMatrix stack_vectorized(std::span<const ComplexMatrix> ms) {
  if (ms.empty()) return ComplexMatrix(0, 0);
  ComplexMatrix out(ms.front().size(), static_cast<Index>(ms.size()));
  for (size_t i = 0; i < ms.size(); ++i) out.col(static_cast<Index>(i)) = vectorize(ms[i]);
  return out;
}

namespace {

// Appends to the orthonormal column set `q` the directions of `cand` whose
// residual outside span(q) exceeds tol. Columns are normalized first; columns
// of norm below sqrt(tol) are products that vanish up to rounding and are
// dropped rather than amplified. Returns the number of columns added.
Index absorb(ComplexMatrix& q, ComplexMatrix cand, double tol) {
  for (Index j = 0; j < cand.cols(); ++j) {
    const double n = cand.col(j).norm();
    if (n > std::sqrt(tol))
      cand.col(j) /= n;
    else
      cand.col(j).setZero();
  }
  if (q.cols() > 0) cand -= q * (q.adjoint() * cand);
  // Second pass guards against loss of orthogonality.
  if (q.cols() > 0) cand -= q * (q.adjoint() * cand);
  const Svd svd = checked_svd(cand);
  const auto& s = svd.s;
  Index add = 0;
  while (add < s.size() && s(add) > tol) ++add;
  if (add == 0) return 0;
  ComplexMatrix grown(q.rows(), q.cols() + add);
  grown.leftCols(q.cols()) = q;
  grown.rightCols(add) = svd.u.leftCols(add);
  q = std::move(grown);
  return add;
}

std::vector<ComplexMatrix> unstack(const ComplexMatrix& q, Index d) {
  std::vector<ComplexMatrix> out;
  for (Index j = 0; j < q.cols(); ++j) out.push_back(devectorize(q.col(j), d, d));
  return out;
}

}  // namespace

std::vector<ComplexMatrix> generate_algebra(std::span<const ComplexMatrix> gens, double tol) {
  if (gens.empty()) return {};
  const Index d = gens.front().rows();
  ComplexMatrix q(d * d, 0);
  {
    std::vector<ComplexMatrix> seed(gens.begin(), gens.end());
    for (const auto& g : gens) seed.push_back(g.adjoint());
    absorb(q, stack_vectorized(seed), tol);
  }
  const std::vector<ComplexMatrix> generators = unstack(q, d);

  // Multiply the newest basis elements by every generator; once nothing new
  // appears, recheck the whole basis before declaring closure.
  Index frontier = 0;
  int stable = 0;
  while (stable < 2) {
    const Index before = q.cols();
    const std::vector<ComplexMatrix> basis = unstack(q, d);
    for (const auto& g : generators) {
      ComplexMatrix cand(d * d, 2 * (before - frontier));
      for (Index i = frontier; i < before; ++i) {
        const ComplexMatrix prod = basis[static_cast<size_t>(i)] * g;
        cand.col(2 * (i - frontier)) = vectorize(prod);
        cand.col(2 * (i - frontier) + 1) = vectorize(prod.adjoint());
      }
      if (cand.cols() > 0) absorb(q, cand, tol);
    }
    if (q.cols() == before) {
      ++stable;
      frontier = 0;
    } else {
      stable = 0;
      frontier = before;
    }
  }
  return unstack(q, d);
}

ComplexMatrix random_hermitian_element(std::span<const ComplexMatrix> basis, Rng& rng) {
  if (basis.empty()) throw DimensionError("random element of an empty span");
  ComplexMatrix x = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (const auto& b : basis) x += rng.complex_normal() * b;
  return hermitian_part(x);
}

std::vector<ComplexMatrix> algebra_center(std::span<const ComplexMatrix> basis, Rng& rng,
                                          double tol, int attempts) {
  if (basis.empty()) return {};
  const Index d = basis.front().rows();
  const auto k = static_cast<Index>(basis.size());
  for (int attempt = 0; attempt < attempts; ++attempt) {
    ComplexMatrix x1 = ComplexMatrix::Zero(d, d), x2 = ComplexMatrix::Zero(d, d);
    for (const auto& b : basis) {
      x1 += rng.complex_normal() * b;
      x2 += rng.complex_normal() * b;
    }
    x1 /= x1.norm();
    x2 /= x2.norm();
    ComplexMatrix eqs(2 * d * d, k);
    for (Index i = 0; i < k; ++i) {
      const ComplexMatrix& b = basis[static_cast<size_t>(i)];
      eqs.col(i).head(d * d) = vectorize(ComplexMatrix(b * x1 - x1 * b));
      eqs.col(i).tail(d * d) = vectorize(ComplexMatrix(b * x2 - x2 * b));
    }
    const Svd svd = checked_svd(eqs, true);
    const auto& s = svd.s;
    Index rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    const ComplexMatrix coeffs = svd.v.rightCols(k - rank);

    std::vector<ComplexMatrix> center;
    for (Index c = 0; c < coeffs.cols(); ++c) {
      ComplexMatrix z = ComplexMatrix::Zero(d, d);
      for (Index i = 0; i < k; ++i) z += coeffs(i, c) * basis[static_cast<size_t>(i)];
      center.push_back(z);
    }
    bool commutes = true;
    for (const auto& z : center)
      for (const auto& b : basis)
        if ((z * b - b * z).norm() > 1e3 * tol) commutes = false;
    if (commutes) return center;
  }
  throw DegenerateProbe("random probes never isolated the center of the algebra");
}

}  // namespace chasym

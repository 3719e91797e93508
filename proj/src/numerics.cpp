#include "chasym/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace chasym {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
}


void require_same(const Superoperator& a, const Superoperator& b) {
  if (a.dim != b.dim) throw DimensionError("superoperators act on different dimensions");
}

}  // namespace

Superoperator::Superoperator(Index dim_, ComplexMatrix matrix_) : dim(dim_), matrix(std::move(matrix_)) {
  if (matrix.rows() != dim * dim || matrix.cols() != dim * dim)
    throw DimensionError("superoperator matrix must be dim^2 x dim^2");
}

Superoperator Superoperator::identity(Index dim) {
  return {dim, ComplexMatrix::Identity(dim * dim, dim * dim)};
}

Superoperator Superoperator::zero(Index dim) { return {dim, ComplexMatrix::Zero(dim * dim, dim * dim)}; }

Superoperator Superoperator::sandwich(const ComplexMatrix& left, const ComplexMatrix& right) {
  require_square(left, "sandwich");
  if (left.rows() != right.rows() || right.rows() != right.cols())
    throw DimensionError("sandwich: operand shapes differ");
  return {left.rows(), kron(left, right.conjugate())};
}

Superoperator Superoperator::from_kraus(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("from_kraus: empty Kraus list");
  const Index d = kraus.front().rows();
  Superoperator out = zero(d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("from_kraus: Kraus shapes differ");
    out.matrix += kron(k, k.conjugate());
  }
  return out;
}

ComplexMatrix Superoperator::operator()(const ComplexMatrix& x) const {
  if (x.rows() != dim || x.cols() != dim) throw DimensionError("superoperator applied to wrong shape");
  return devectorize(matrix * vectorize(x), dim, dim);
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
  require_same(a, b);
  return {a.dim, a.matrix * b.matrix};
}

Superoperator operator+(const Superoperator& a, const Superoperator& b) {
  require_same(a, b);
  return {a.dim, a.matrix + b.matrix};
}

Superoperator operator-(const Superoperator& a, const Superoperator& b) {
  require_same(a, b);
  return {a.dim, a.matrix - b.matrix};
}

Superoperator operator*(Complex s, const Superoperator& a) { return {a.dim, s * a.matrix}; }

std::vector<std::vector<Index>> cluster_values(const ComplexVector& values, double tol) {
  const Index n = values.size();
  std::vector<Index> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(values(i) - values(j)) <= tol) parent[find(j)] = find(i);

  std::vector<std::vector<Index>> clusters;
  std::vector<Index> slot(static_cast<size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  return clusters;
}

ComplexVector eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("QR iteration did not converge");
  return es.eigenvalues();
}

Svd checked_svd(const ComplexMatrix& m, bool full) {
  const unsigned flags = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto faithful = [&](const Svd& f) {
    const Index p = f.s.size();
    const ComplexMatrix rebuilt = f.u.leftCols(p) * f.s.cast<Complex>().asDiagonal() * f.v.leftCols(p).adjoint();
    const double tol = 1e-9 * std::max(1.0, m.norm());
    return (rebuilt - m).norm() <= tol &&
           (f.u.adjoint() * f.u - ComplexMatrix::Identity(f.u.cols(), f.u.cols())).norm() <= 1e-9 &&
           (f.v.adjoint() * f.v - ComplexMatrix::Identity(f.v.cols(), f.v.cols())).norm() <= 1e-9;
  };
  {
    Eigen::BDCSVD<ComplexMatrix> bdc(m, flags);
    Svd out{bdc.matrixU(), bdc.singularValues(), bdc.matrixV()};
    if (faithful(out)) return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> jac(m, flags);
  return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

NullSpace null_space(const ComplexMatrix& m, Index count) {
  require_square(m, "null_space");
  const Index n = m.rows();
  if (count < 0 || count > n) throw DimensionError("null_space: bad count");
  const Svd f = checked_svd(m, true);
  return {f.v.rightCols(count), f.u.rightCols(count), f.s.tail(count)};
}

ComplexMatrix orthonormal_columns(const ComplexMatrix& columns, double rel_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return ComplexMatrix(columns.rows(), 0);
  const Svd f = checked_svd(columns);
  const auto& s = f.s;
  if (s.size() == 0 || s(0) == 0.0) return ComplexMatrix(columns.rows(), 0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
  return f.u.leftCols(rank);
}

EigenDecomposition eigendecompose(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "eigendecompose");
  const Index n = m.rows();
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, true);
  Eigen::ComplexEigenSolver<ComplexMatrix> adj(m.adjoint(), true);
  if (es.info() != Eigen::Success || adj.info() != Eigen::Success)
    throw ConvergenceError("QR iteration did not converge within the sweep limit");

  EigenDecomposition out{es.eigenvalues(), ComplexMatrix(n, n), ComplexMatrix(n, n)};
  std::vector<bool> used(static_cast<size_t>(n), false);

  // Claims the unused adjoint eigenvalue closest to conj(mu).
  auto claim_nearest = [&](Complex mu) {
    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(std::conj(adj.eigenvalues()(j)) - mu);
      if (d < best_dist) best_dist = d, best = j;
    }
    if (best < 0 || best_dist > tol.match * std::max(1.0, std::abs(mu)))
      throw ConvergenceError("no adjoint eigenvalue matches the conjugate of a computed eigenvalue");
    used[best] = true;
    return best;
  };

  for (const auto& group : cluster_values(out.eigenvalues, tol.group)) {
    const auto k = static_cast<Index>(group.size());
    ComplexMatrix r(n, k), l(n, k);
    if (k == 1) {
      r.col(0) = es.eigenvectors().col(group[0]);
      l.col(0) = adj.eigenvectors().col(claim_nearest(out.eigenvalues(group[0])));
    } else {
      Complex mean = 0;
      for (Index i : group) mean += out.eigenvalues(i);
      mean /= static_cast<double>(k);
      for (Index i : group) claim_nearest(out.eigenvalues(i));
      const NullSpace ns = null_space(m - mean * ComplexMatrix::Identity(n, n), k);
      r = ns.right;
      l = ns.left;
    }
    const ComplexMatrix gram = l.adjoint() * r;
    Eigen::JacobiSVD<ComplexMatrix> gsvd(gram);
    const auto& gs = gsvd.singularValues();
    if (gs(gs.size() - 1) > 1e-12 * std::max(1.0, gs(0))) l = l * gram.inverse().adjoint();
    for (Index c = 0; c < k; ++c) {
      out.right.col(group[c]) = r.col(c);
      out.left.col(group[c]) = l.col(c);
    }
  }
  return out;
}

Superoperator restricted_inverse(const Superoperator& s, std::span<const ComplexMatrix> basis,
                                 double tol_sing) {
  if (basis.empty()) return Superoperator::zero(s.dim);
  const Index n = s.matrix.rows();
  ComplexMatrix columns(n, static_cast<Index>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].rows() != s.dim || basis[i].cols() != s.dim)
      throw DimensionError("restricted_inverse: basis element has wrong shape");
    columns.col(static_cast<Index>(i)) = vectorize(basis[i]);
  }
  const ComplexMatrix q = orthonormal_columns(columns, 1e-12);
  if (q.cols() == 0) return Superoperator::zero(s.dim);
  const ComplexMatrix restricted = q.adjoint() * s.matrix * q;
  Eigen::JacobiSVD<ComplexMatrix> svd(restricted);
  const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
  if (smallest < tol_sing)
    throw SingularRestriction("restriction is singular (smallest singular value " +
                              std::to_string(smallest) + ")");
  return {s.dim, q * restricted.partialPivLu().inverse() * q.adjoint()};
}

ComplexMatrix choi_matrix(const Superoperator& s) {
  const Index d = s.dim;
  ComplexMatrix c(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) c(i * d + k, j * d + l) = s.matrix(i * d + j, k * d + l);
  return c;
}

Superoperator superop_from_choi(const ComplexMatrix& choi, Index dim) {
  if (choi.rows() != dim * dim || choi.cols() != dim * dim)
    throw DimensionError("Choi matrix must be dim^2 x dim^2");
  ComplexMatrix s(dim * dim, dim * dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      for (Index k = 0; k < dim; ++k)
        for (Index l = 0; l < dim; ++l) s(i * dim + j, k * dim + l) = choi(i * dim + k, j * dim + l);
  return {dim, s};
}

std::vector<ComplexMatrix> kraus_from_choi(const Superoperator& s, double tol_rank) {
  const ComplexMatrix c = choi_matrix(s);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(c));
  const auto& w = es.eigenvalues();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  const double cutoff = tol_rank * scale;
  if ((c - c.adjoint()).norm() > cutoff * static_cast<double>(c.rows()))
    throw NotCompletelyPositive("Choi matrix is not Hermitian");
  if (w.minCoeff() < -cutoff)
    throw NotCompletelyPositive("Choi matrix has eigenvalue " + std::to_string(w.minCoeff()));

  std::vector<ComplexMatrix> kraus;
  for (Index i = w.size() - 1; i >= 0; --i) {
    if (w(i) <= cutoff) break;
    kraus.push_back(std::sqrt(w(i)) * devectorize(es.eigenvectors().col(i), s.dim, s.dim));
  }
  return kraus;
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  require_square(m, "polar_unitary");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

double canonical_phase(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double distance_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a - phase * b).norm();
}

double span_excess(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix qa = orthonormal_columns(a, 1e-10);
  if (qa.cols() == 0) return 0.0;
  const ComplexMatrix qb = orthonormal_columns(b, 1e-10);
  const ComplexMatrix residual = qa - qb * (qb.adjoint() * qa);
  Eigen::JacobiSVD<ComplexMatrix> svd(residual);
  return svd.singularValues()(0);
}

}  // namespace chasym

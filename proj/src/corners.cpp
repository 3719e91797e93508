#include "chasym/corners.hpp"

#include "chasym/asymptotics.hpp"
#include "chasym/channel.hpp"

namespace chasym {

std::string_view corner_name(Corner c) {
  switch (c) {
    case Corner::ul: return "ul";
    case Corner::ur: return "ur";
    case Corner::ll: return "ll";
    case Corner::lr: return "lr";
    case Corner::of: return "of";
    case Corner::di: return "di";
  }
  return "?";
}

FourCorners corners_from_range(const ComplexMatrix& psd, double tol_rank) {
  if (psd.rows() != psd.cols()) throw DimensionError("corners_from_range: matrix not square");
  const Index d = psd.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(psd));
  const auto& w = es.eigenvalues();
  const double top = std::max(w.cwiseAbs().maxCoeff(), 0.0);
  Index rank = 0;
  for (Index i = 0; i < d; ++i)
    if (w(i) > tol_rank * top) ++rank;
  FourCorners fc;
  fc.ul_basis = es.eigenvectors().rightCols(rank);
  fc.lr_basis = es.eigenvectors().leftCols(d - rank);
  fc.p = fc.ul_basis * fc.ul_basis.adjoint();
  fc.q = fc.lr_basis * fc.lr_basis.adjoint();
  return fc;
}

FourCorners four_corners(const Superoperator& asymptotic, const Tolerances& tol) {
  const Index d = asymptotic.dim;
  return corners_from_range(asymptotic(ComplexMatrix::Identity(d, d)), tol.rank);
}

FourCorners four_corners(const QuantumChannel& c, const Tolerances& tol) {
  return four_corners(asymptotic_projection(c, tol).superop, tol);
}

namespace {

std::pair<const ComplexMatrix*, const ComplexMatrix*> sides(const FourCorners& fc, Corner which) {
  switch (which) {
    case Corner::ul: return {&fc.p, &fc.p};
    case Corner::ur: return {&fc.p, &fc.q};
    case Corner::ll: return {&fc.q, &fc.p};
    case Corner::lr: return {&fc.q, &fc.q};
    default: throw DimensionError("composite corner has no single sandwich form");
  }
}

std::pair<const ComplexMatrix*, const ComplexMatrix*> bases(const FourCorners& fc, Corner which) {
  switch (which) {
    case Corner::ul: return {&fc.ul_basis, &fc.ul_basis};
    case Corner::ur: return {&fc.ul_basis, &fc.lr_basis};
    case Corner::ll: return {&fc.lr_basis, &fc.ul_basis};
    case Corner::lr: return {&fc.lr_basis, &fc.lr_basis};
    default: throw DimensionError("composite corner has no single basis");
  }
}

}  // namespace

ComplexMatrix corner_project(const FourCorners& fc, const ComplexMatrix& o, Corner which) {
  if (o.rows() != fc.dim() || o.cols() != fc.dim()) throw DimensionError("corner_project: shape");
  if (which == Corner::of) return fc.p * o * fc.q + fc.q * o * fc.p;
  if (which == Corner::di) return fc.p * o * fc.p + fc.q * o * fc.q;
  const auto [l, r] = sides(fc, which);
  return (*l) * o * (*r);
}

Superoperator corner_superop(const FourCorners& fc, Corner which) {
  if (which == Corner::of) return corner_superop(fc, Corner::ur) + corner_superop(fc, Corner::ll);
  if (which == Corner::di) return corner_superop(fc, Corner::ul) + corner_superop(fc, Corner::lr);
  const auto [l, r] = sides(fc, which);
  return Superoperator::sandwich(*l, *r);
}

std::vector<ComplexMatrix> corner_basis(const FourCorners& fc, Corner which) {
  if (which == Corner::of || which == Corner::di) {
    auto a = corner_basis(fc, which == Corner::of ? Corner::ur : Corner::ul);
    auto b = corner_basis(fc, which == Corner::of ? Corner::ll : Corner::lr);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  const auto [l, r] = bases(fc, which);
  std::vector<ComplexMatrix> out;
  for (Index i = 0; i < l->cols(); ++i)
    for (Index j = 0; j < r->cols(); ++j) out.push_back(l->col(i) * r->col(j).adjoint());
  return out;
}

}  // namespace chasym

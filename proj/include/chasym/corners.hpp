#pragma once

#include <string_view>
#include <vector>

#include "chasym/numerics.hpp"

namespace chasym {

class QuantumChannel;

enum class Corner { ul, ur, ll, lr, of, di };

std::string_view corner_name(Corner c);

// Split of the Hilbert space into the non-decaying range of P and its
// complement Q = I - P. ul_basis / lr_basis hold orthonormal columns of
// range(P) / range(Q).
struct FourCorners {
  ComplexMatrix p;
  ComplexMatrix q;
  ComplexMatrix ul_basis;
  ComplexMatrix lr_basis;

  Index dim() const { return p.rows(); }
  Index ul_dim() const { return ul_basis.cols(); }
  Index lr_dim() const { return lr_basis.cols(); }
};

// P from the range of the asymptotic image of the identity.
FourCorners four_corners(const QuantumChannel& c, const Tolerances& tol = {});
FourCorners four_corners(const Superoperator& asymptotic, const Tolerances& tol = {});
// P as the projector onto the range of a PSD operator, relative rank cutoff tol_rank.
FourCorners corners_from_range(const ComplexMatrix& psd, double tol_rank);

ComplexMatrix corner_project(const FourCorners& fc, const ComplexMatrix& o, Corner which);
Superoperator corner_superop(const FourCorners& fc, Corner which);

// Frobenius-orthonormal operator basis of one corner: {W_a e_ij W_b^dagger}.
std::vector<ComplexMatrix> corner_basis(const FourCorners& fc, Corner which);

}  // namespace chasym

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chasym/asymptotics.hpp"
#include "chasym/channel.hpp"
#include "chasym/corners.hpp"

namespace chasym {

/// One block of the blocks-of-factors form: U (d x d, diagonal in the
/// canonical basis) acting on the noiseless factor, and a primitive Kraus
/// family on the m-dimensional auxiliary factor with fixed point rho.
struct StructureBlock {
  Index d = 1;
  Index m = 1;
  ComplexMatrix u;
  std::vector<ComplexMatrix> aux_kraus;
  ComplexMatrix rho;
  Index offset = 0;  // first canonical-basis column of this block

  Eigen::VectorXd phases() const;  // eigenphases of u, in basis order
};

/// basis_change V is unitary; in the basis V the first sum(d*m) coordinates
/// carry (+)_k U_k (x) B_lk (index a*m + j inside a block) and the last
/// decay_dim coordinates span the decaying subspace.
struct CanonicalStructure {
  ComplexMatrix basis_change;
  std::vector<StructureBlock> blocks;
  Index decay_dim = 0;

  Index ul_dim() const;
};

// The channel {W^dagger A W} on range(P), W = fc.ul_basis. Throws
// CornerConditionError if sum A_ul^dagger A_ul differs from P by more than 1e-8.
QuantumChannel faithful_restriction(const QuantumChannel& c, const FourCorners& fc);

// Blocks-of-factors decomposition of a faithful channel from the *-algebra
// generated by its conserved quantities. `pairs` empty means compute them.
// Throws DegenerateProbe after exhausting retries and NonCanonicalShape when
// the Kraus operators do not take the block form in the canonical basis
// (for example when they permute central blocks).
CanonicalStructure canonical_decomposition(const QuantumChannel& e,
                                           const std::vector<PeripheralPair>& pairs,
                                           std::uint64_t seed, const Tolerances& tol = {});

// Rotating points e_ab (x) rho / ||rho|| and conserved quantities
// e_ab (x) I * ||rho|| written in the coordinates the structure was built in.
std::vector<PeripheralPair> canonical_pairs(const CanonicalStructure& s);

// Residual, in the rotated basis, between the ul Kraus operators and the
// block form; plus the off-block leakage.
double shape_residual(const CanonicalStructure& s, const QuantumChannel& c);

struct DivisionReport {
  double max_residual = 0.0;
  bool passed = false;
};

// Checks J = Psi (I (x) rho)^{-1} ||rho||^2 on every canonical pair.
DivisionReport division_identity_check(const CanonicalStructure& s, double tol = 1e-7);

struct OrganizedAsymptotics {
  AsymptoticProjection projection;  // from the eigensolver
  FourCorners corners;
  std::optional<CanonicalStructure> structure;
  std::vector<PeripheralPair> pairs;  // biorthogonal, extended to the full space
  std::string note;                   // why structure is absent, if it is
  double projection_residual = 0.0;   // ||sum psi j^dagger - projection||_F
};

// Diagonalize, build the projection and P, project J to ul, decompose the
// algebra, build canonical pairs and extend them to the full space. When the
// faithful part has no block form the eigensolver pairs are extended instead.
OrganizedAsymptotics find_and_organize(const QuantumChannel& c, std::uint64_t seed,
                                       const Tolerances& tol = {});

struct DfsForm {
  ComplexMatrix u;      // unitary on range(P), in ul_basis coordinates
  ComplexVector a;      // A_ul^l = a_l u
  double residual = 0.0;
};

// Whether every A_ul^l is a multiple of one common unitary.
std::optional<DfsForm> dfs_check(const QuantumChannel& c, const FourCorners& fc,
                                 double tol = 1e-8);

struct RecoveryMap {
  std::vector<ComplexMatrix> kraus;  // P A^l Q as D x D matrices
  Superoperator transfer;            // X -> sum A_ur X A_ur^dagger
  double residual = 0.0;             // ||P_A R_lr - transfer||_F
};

// For channels with A_lr = 0 and A_ul proportional to P, the map carried by
// A_ur that the asymptotic projection applies to the lr corner.
RecoveryMap recovery_channel(const QuantumChannel& c, const Tolerances& tol = {});

}  // namespace chasym

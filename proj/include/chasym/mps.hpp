#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "chasym/asymptotics.hpp"
#include "chasym/channel.hpp"
#include "chasym/corners.hpp"

namespace chasym {

// Translation-invariant MPS with coefficients tr{B A^{l_0} ... A^{l_{L-1}}}.
struct MatrixProductState {
  Index phys_dim = 0;
  Index bond_dim = 0;
  std::vector<ComplexMatrix> tensors;  // phys_dim matrices, bond_dim x bond_dim
  ComplexMatrix boundary;              // B

  MatrixProductState() = default;
  // Checks shapes only (DimensionError). Canonical form is checked by transfer_channel.
  MatrixProductState(std::vector<ComplexMatrix> tensors, ComplexMatrix boundary);
};

// Throws NotCanonical (message carries the residual) unless sum A^dagger A = I to tol_tp.
QuantumChannel transfer_channel(const MatrixProductState& m, const Tolerances& tol = {});

// Rescale by the spectral radius of sum A (x) A* and conjugate by X^{1/2}, X the
// positive leading eigenmatrix of the adjoint transfer map. CannotCanonicalize
// if X is not positive definite.
std::vector<ComplexMatrix> canonicalize(std::span<const ComplexMatrix> tensors,
                                        const Tolerances& tol = {});

// sum_{k,l} <l|O|k> A_k (x) A_l*.
Superoperator observable_superop(std::span<const ComplexMatrix> tensors, const ComplexMatrix& o);
Superoperator observable_superop(const MatrixProductState& m, const ComplexMatrix& o);

// A'_k = sum_k' U(k,k') A_k'.
MatrixProductState rotate_physical(const MatrixProductState& m, const ComplexMatrix& u);

// B (x) B*.
Superoperator boundary_superop(const ComplexMatrix& b);

// Unnormalized limit and the matching normalization.
struct ThermoValue {
  Complex raw;
  Complex norm;

  Complex normalized() const;  // DegenerateBoundary when |norm| < 1e-10
};

struct BoundaryMixture {
  std::vector<ComplexMatrix> components;  // B_0, B_1, ... on range(P), ul_basis coordinates
  Superoperator effective;                // B_ul + P_A R_lr B R_ul, full bond space
  Index k() const { return static_cast<Index>(components.size()) - 1; }
};

enum class Side { left, right };

// Analysis of one MPS in the alpha-blocked thermodynamic limit. Throws
// IrrationalPhase when the transfer channel has no blocking exponent.
class ThermodynamicLimit {
 public:
  explicit ThermodynamicLimit(MatrixProductState m, const Tolerances& tol = {});

  const MatrixProductState& state() const { return m_; }
  const QuantumChannel& channel() const { return channel_; }
  const AsymptoticProjection& projection() const { return proj_; }
  const FourCorners& corners() const { return corners_; }
  Index alpha() const { return alpha_; }
  double subleading() const { return subleading_; }

  Complex normalization() const;                             // Tr{P_A BB}
  ThermoValue expectation(const ComplexMatrix& o) const;     // Tr{P_A O P_A BB}
  ThermoValue reduced_expectation(const ComplexMatrix& o) const;  // Tr{O_E BBbar}
  // Finite w: Tr{P_A O1 A^w O2 P_A BB}; nullopt w: P_A between the insertions.
  ThermoValue correlator(const ComplexMatrix& o1, const ComplexMatrix& o2,
                         std::optional<Index> w) const;
  ThermoValue boundary_observable(const ComplexMatrix& o, Side side) const;

  const BoundaryMixture& mixture() const;
  // Sum over mixture components of the reduced-channel expectations.
  Complex mixture_expectation(const ComplexMatrix& o) const;

  // Faithful restriction as MPS tensors on range(P).
  const std::vector<ComplexMatrix>& reduced_tensors() const { return reduced_; }
  const Superoperator& faithful_projection() const { return pe_reduced_; }

 private:
  MatrixProductState m_;
  Tolerances tol_;
  QuantumChannel channel_;
  AsymptoticProjection proj_;
  FourCorners corners_;
  Index alpha_ = 1;
  double subleading_ = 0.0;
  Superoperator bb_;
  std::vector<ComplexMatrix> reduced_;
  Superoperator pe_reduced_;
  mutable std::optional<BoundaryMixture> mixture_;
};

// Exact chain of `length` sites: Tr{BB S_0 ... S_{length-1}} with S_i the
// observable superoperator at listed sites and the transfer matrix elsewhere.
// Sites are 0-based, site 0 adjacent to B on the left.
ThermoValue finite_chain_oracle(const MatrixProductState& m,
                                const std::vector<std::pair<Index, ComplexMatrix>>& observables,
                                Index length);

// Same quantity by summing over all phys_dim^length physical strings (length <= 3).
ThermoValue finite_chain_enumerate(const MatrixProductState& m,
                                   const std::vector<std::pair<Index, ComplexMatrix>>& observables,
                                   Index length);

}  // namespace chasym

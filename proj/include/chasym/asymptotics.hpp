#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chasym/channel.hpp"
#include "chasym/corners.hpp"
#include "chasym/numerics.hpp"

namespace chasym {

/// One peripheral eigenvalue e^{i lambda} with its right eigenmatrix (rotating
/// point) psi and left eigenmatrix (conserved quantity) j, normalized so that
/// tr(j^dagger psi) = 1. mu labels members of a degenerate group.
struct PeripheralPair {
  double lambda = 0.0;
  Index mu = 0;
  ComplexMatrix psi;
  ComplexMatrix j;
  std::optional<Index> root_order;

  Complex eigenvalue() const { return std::polar(1.0, lambda); }
};

/// The projection sum_k vec(psi_k) vec(j_k)^dagger. alpha is empty when some
/// phase is not a root of unity of order <= D^2; the projection is still valid.
struct AsymptoticProjection {
  std::vector<PeripheralPair> pairs;
  std::optional<Index> alpha;
  Superoperator superop;
};

std::vector<PeripheralPair> peripheral_spectrum(const Superoperator& s, const Tolerances& tol = {});
std::vector<PeripheralPair> peripheral_spectrum(const QuantumChannel& c, const Tolerances& tol = {});

// Smallest N <= n_max with |lambda - 2 pi n / N| <= tol_rat, or nullopt.
std::optional<Index> root_order(double lambda, Index n_max, double tol_rat = Tolerances{}.rat);

// lcm of all root orders; fills root_order on every pair. n_max <= 0 means max(D^2, 64).
Index blocking_exponent(std::vector<PeripheralPair>& pairs, Index n_max = 0,
                        double tol_rat = Tolerances{}.rat);

Superoperator projection_from_pairs(std::span<const PeripheralPair> pairs);

AsymptoticProjection asymptotic_projection(const QuantumChannel& c, const Tolerances& tol = {});
AsymptoticProjection asymptotic_projection(const Superoperator& s, const Tolerances& tol = {});

// Repeated squaring of the alpha-th power until two iterates agree to eps.
Superoperator power_limit_oracle(const Superoperator& s, Index alpha, double eps);
Superoperator power_limit_oracle(const QuantumChannel& c, Index alpha, double eps);

// Largest modulus among non-peripheral eigenvalues (0 if none).
double subleading_modulus(const Superoperator& s, const Tolerances& tol = {});

// Compressions of (A - e^{i lambda}) and (A^dagger - e^{-i lambda}) to the lr
// corner, inverted there. Throws EigenvalueCollision if e^{i lambda} lies in
// the lr spectrum.
Superoperator lr_resolvent(const Superoperator& s, const FourCorners& fc, double lambda,
                           const Tolerances& tol = {});
Superoperator lr_adjoint_resolvent(const Superoperator& s, const FourCorners& fc, double lambda,
                                   const Tolerances& tol = {});

// J = J_ul - (A^dagger_lr - e^{-i lambda})^{-1} A^dagger(J_ul), the conserved
// quantity of the full channel extending a conserved quantity of its ul part.
ComplexMatrix extend_conserved(const QuantumChannel& c, const FourCorners& fc,
                               const ComplexMatrix& j_ul, double lambda,
                               const Tolerances& tol = {});

// tr(J^dagger rho) for the extended J, evaluated as
// tr(J_ul^dagger [rho - A((A - e^{i lambda})_lr^{-1}(rho))]).
Complex asymptotic_coefficient(const QuantumChannel& c, const FourCorners& fc,
                               const ComplexMatrix& j_ul, double lambda, const ComplexMatrix& rho,
                               const Tolerances& tol = {});

}  // namespace chasym

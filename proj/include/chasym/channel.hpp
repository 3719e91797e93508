#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chasym/numerics.hpp"
#include "chasym/random.hpp"

namespace chasym {

/// Kraus-form quantum channel rho -> sum_l A_l rho A_l^dagger.
///
/// Construction rejects Kraus lists whose trace-preservation residual
/// ||sum A^dagger A - I||_F exceeds tol_tp. The Liouville matrix is built once.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus, double tol_tp = Tolerances{}.tp);

  Index dim() const { return dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  double tp_residual() const { return tp_residual_; }
  const Superoperator& liouville() const { return liouville_; }

 private:
  Index dim_ = 0;
  std::vector<ComplexMatrix> kraus_;
  double tp_residual_ = 0.0;
  Superoperator liouville_;
};

ComplexMatrix apply(const QuantumChannel& c, const ComplexMatrix& rho);
ComplexMatrix apply_adjoint(const QuantumChannel& c, const ComplexMatrix& o);
inline const Superoperator& liouville(const QuantumChannel& c) { return c.liouville(); }
ComplexMatrix power_apply(const QuantumChannel& c, const ComplexMatrix& rho, Index n);

// Sum of A_l^dagger A_l; equals I for a valid channel.
ComplexMatrix kraus_gram(std::span<const ComplexMatrix> kraus);

struct FaithfulCertificate {
  ComplexMatrix fixed_point;  // trace one
  double min_eigenvalue = 0.0;
};

// Positive-definite fixed point built as the asymptotic image of I/D, or
// nullopt when that image is rank deficient.
std::optional<FaithfulCertificate> check_faithful(const QuantumChannel& c,
                                                  const Tolerances& tol = {});

QuantumChannel random_channel(Index dim, Index n_kraus, std::uint64_t seed);

// Random channel on `dim` whose only peripheral eigenvalue is a simple 1.
QuantumChannel random_primitive_channel(Index dim, Index n_kraus, std::uint64_t seed);

struct BlockSpec {
  Index d = 1;         // unitary (noiseless) factor
  Index m = 1;         // auxiliary primitive factor
  double theta = 0.0;  // U has eigenphases k * theta, k = 0..d-1
};

struct StructureTruth {
  std::vector<BlockSpec> blocks;
  std::vector<ComplexVector> u_spectra;
  Index decay_dim = 0;
  ComplexMatrix hidden_unitary;  // channel Kraus = W * A * W^dagger
};

struct StructuredChannel {
  QuantumChannel channel;
  StructureTruth truth;
};

// Kraus operators of the form [[E_l, A_ur], [0, A_lr]] with E_l = (+)_k U_k (x) B_lk,
// conjugated by a hidden Haar unitary. Rejection-samples until the lr corner decays.
StructuredChannel random_structured_channel(std::span<const BlockSpec> blocks, Index decay_dim,
                                            std::uint64_t seed, Index n_kraus = 2);

// Kraus operators sum_j |j+1><j| (x) B_lj cycling n blocks of size aux, padded with
// decay_dim decaying dimensions. Peripheral spectrum: the n-th roots of unity.
QuantumChannel random_periodic_channel(Index n, Index aux, Index decay_dim, std::uint64_t seed,
                                       Index n_kraus = 2);

// Pads a trace-preserving Kraus family on D_ul with decay_dim decaying dimensions by
// completing the ul isometry. lr_scale < 1 shrinks the lr block to speed up decay.
std::vector<ComplexMatrix> extend_with_decay(std::span<const ComplexMatrix> ul, Index decay_dim,
                                             Rng& rng, double lr_scale = 1.0);

// Spectral radius of the lr-corner map X -> sum A_lr X A_lr^dagger.
double lr_spectral_radius(std::span<const ComplexMatrix> kraus, Index ul_dim);

}  // namespace chasym

#include "chasym/channel.hpp"

#include <algorithm>

#include "chasym/asymptotics.hpp"

namespace chasym {

ComplexMatrix kraus_gram(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("empty Kraus list");
  ComplexMatrix g = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& a : kraus) g.noalias() += a.adjoint() * a;
  return g;
}

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus, double tol_tp)
    : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvalidChannel("a channel needs at least one Kraus operator");
  dim_ = kraus_.front().rows();
  if (dim_ < 1) throw DimensionError("Kraus operators must be at least 1x1");
  for (const auto& a : kraus_) {
    if (a.rows() != dim_ || a.cols() != dim_)
      throw DimensionError("all Kraus operators must be square with a common dimension");
    if (!a.allFinite()) throw InvalidChannel("Kraus operator has non-finite entries");
  }
  tp_residual_ = (kraus_gram(kraus_) - ComplexMatrix::Identity(dim_, dim_)).norm();
  if (tp_residual_ > tol_tp)
    throw InvalidChannel("not trace preserving: ||sum A^dagger A - I||_F = " +
                         std::to_string(tp_residual_));
  liouville_ = Superoperator::from_kraus(kraus_);
}

namespace {

void require_shape(const QuantumChannel& c, const ComplexMatrix& m) {
  if (m.rows() != c.dim() || m.cols() != c.dim())
    throw DimensionError("operand must be " + std::to_string(c.dim()) + "x" +
                         std::to_string(c.dim()));
}

}  // namespace

ComplexMatrix apply(const QuantumChannel& c, const ComplexMatrix& rho) {
  require_shape(c, rho);
  ComplexMatrix out = ComplexMatrix::Zero(c.dim(), c.dim());
  for (const auto& a : c.kraus()) out.noalias() += a * rho * a.adjoint();
  return out;
}

ComplexMatrix apply_adjoint(const QuantumChannel& c, const ComplexMatrix& o) {
  require_shape(c, o);
  ComplexMatrix out = ComplexMatrix::Zero(c.dim(), c.dim());
  for (const auto& a : c.kraus()) out.noalias() += a.adjoint() * o * a;
  return out;
}

ComplexMatrix power_apply(const QuantumChannel& c, const ComplexMatrix& rho, Index n) {
  require_shape(c, rho);
  if (n < 0) throw DimensionError("power_apply: negative power");
  ComplexMatrix out = rho;
  for (Index i = 0; i < n; ++i) out = chasym::apply(c, out);
  return out;
}

std::optional<FaithfulCertificate> check_faithful(const QuantumChannel& c, const Tolerances& tol) {
  const Index d = c.dim();
  const AsymptoticProjection proj = asymptotic_projection(c, tol);
  ComplexMatrix rho = hermitian_part(proj.superop(ComplexMatrix::Identity(d, d) / double(d)));
  rho /= rho.trace().real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(d - 1);
  if (lo <= tol.rank * hi) return std::nullopt;
  return FaithfulCertificate{rho, lo};
}

QuantumChannel random_channel(Index dim, Index n_kraus, std::uint64_t seed) {
  if (dim < 1 || n_kraus < 1) throw DimensionError("random_channel: dimensions must be positive");
  Rng rng(seed);
  const ComplexMatrix v = random_isometry(dim * n_kraus, dim, rng);
  std::vector<ComplexMatrix> kraus;
  for (Index l = 0; l < n_kraus; ++l) kraus.push_back(v.middleRows(l * dim, dim));
  return QuantumChannel(std::move(kraus));
}

namespace {

bool is_primitive(const QuantumChannel& c) {
  const ComplexVector ev = eigenvalues(c.liouville().matrix);
  Index peripheral = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) >= 1.0 - 1e-6) ++peripheral;
  return peripheral == 1;
}

}  // namespace

QuantumChannel random_primitive_channel(Index dim, Index n_kraus, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    QuantumChannel c = random_channel(dim, n_kraus, rng.next());
    if (dim == 1 || is_primitive(c)) return c;
  }
  throw ConstructionError("could not sample a primitive channel");
}

double lr_spectral_radius(std::span<const ComplexMatrix> kraus, Index ul_dim) {
  const Index d = kraus.front().rows();
  const Index n = d - ul_dim;
  if (n == 0) return 0.0;
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& a : kraus) {
    const ComplexMatrix lr = a.bottomRightCorner(n, n);
    s += kron(lr, lr.conjugate());
  }
  return eigenvalues(s).cwiseAbs().maxCoeff();
}

std::vector<ComplexMatrix> extend_with_decay(std::span<const ComplexMatrix> ul, Index decay_dim,
                                             Rng& rng, double lr_scale) {
  const auto n_kraus = static_cast<Index>(ul.size());
  const Index d_ul = ul.front().rows();
  const Index d = d_ul + decay_dim;
  if (decay_dim == 0) return {ul.begin(), ul.end()};
  if (n_kraus == 1)
    throw ConstructionError("a single Kraus operator cannot carry a decaying corner");

  // Stacked isometry: block l occupies rows [l*d, (l+1)*d); ul columns are [E_l; 0].
  ComplexMatrix ul_cols = ComplexMatrix::Zero(n_kraus * d, d_ul);
  for (Index l = 0; l < n_kraus; ++l) ul_cols.block(l * d, 0, d_ul, d_ul) = ul[l];

  for (int attempt = 0; attempt < 64; ++attempt) {
    ComplexMatrix g = rng.ginibre(n_kraus * d, decay_dim);
    for (Index l = 0; l < n_kraus; ++l) g.block(l * d + d_ul, 0, decay_dim, decay_dim) *= lr_scale;
    g -= ul_cols * (ul_cols.adjoint() * g);
    const ComplexMatrix lr_cols = orthonormal_columns(g, 1e-10);
    if (lr_cols.cols() != decay_dim) continue;
    std::vector<ComplexMatrix> kraus;
    for (Index l = 0; l < n_kraus; ++l) {
      ComplexMatrix a(d, d);
      a.leftCols(d_ul) = ul_cols.middleRows(l * d, d);
      a.rightCols(decay_dim) = lr_cols.middleRows(l * d, d);
      kraus.push_back(std::move(a));
    }
    if (lr_spectral_radius(kraus, d_ul) < 1.0 - 1e-3) return kraus;
  }
  throw ConstructionError("isometry completion never produced a decaying lr corner");
}

StructuredChannel random_structured_channel(std::span<const BlockSpec> blocks, Index decay_dim,
                                            std::uint64_t seed, Index n_kraus) {
  if (blocks.empty()) throw ConstructionError("at least one block is required");
  if (decay_dim < 0 || n_kraus < 1) throw ConstructionError("invalid generator dimensions");
  Rng rng(seed);
  Index d_ul = 0;
  for (const auto& b : blocks) {
    if (b.d < 1 || b.m < 1) throw ConstructionError("block dimensions must be positive");
    d_ul += b.d * b.m;
  }

  StructureTruth truth;
  truth.blocks.assign(blocks.begin(), blocks.end());
  truth.decay_dim = decay_dim;

  std::vector<ComplexMatrix> ul(static_cast<size_t>(n_kraus), ComplexMatrix::Zero(d_ul, d_ul));
  Index offset = 0;
  for (const auto& b : blocks) {
    ComplexVector phases(b.d);
    for (Index k = 0; k < b.d; ++k) phases(k) = std::polar(1.0, double(k) * b.theta);
    const ComplexMatrix w = random_unitary(b.d, rng);
    const ComplexMatrix u = w * phases.asDiagonal() * w.adjoint();
    truth.u_spectra.push_back(phases);

    std::vector<ComplexMatrix> aux;
    if (b.m == 1) {
      const ComplexMatrix c = random_isometry(n_kraus, 1, rng);
      for (Index l = 0; l < n_kraus; ++l) aux.push_back(ComplexMatrix::Constant(1, 1, c(l, 0)));
    } else {
      if (n_kraus < 2) throw ConstructionError("a primitive auxiliary factor needs two Kraus operators");
      aux = random_primitive_channel(b.m, n_kraus, rng.next()).kraus();
    }
    const Index size = b.d * b.m;
    for (Index l = 0; l < n_kraus; ++l) ul[l].block(offset, offset, size, size) = kron(u, aux[l]);
    offset += size;
  }

  std::vector<ComplexMatrix> kraus = extend_with_decay(ul, decay_dim, rng);
  const Index d = d_ul + decay_dim;
  truth.hidden_unitary = random_unitary(d, rng);
  for (auto& a : kraus) a = truth.hidden_unitary * a * truth.hidden_unitary.adjoint();
  return {QuantumChannel(std::move(kraus)), std::move(truth)};
}

QuantumChannel random_periodic_channel(Index n, Index aux, Index decay_dim, std::uint64_t seed,
                                       Index n_kraus) {
  if (n < 1 || aux < 1) throw ConstructionError("periodic channel needs positive dimensions");
  if (aux > 1 && n_kraus < 2) throw ConstructionError("mixing auxiliary factors need two Kraus operators");
  Rng rng(seed);
  const Index d_ul = n * aux;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<ComplexMatrix> ul(static_cast<size_t>(n_kraus), ComplexMatrix::Zero(d_ul, d_ul));
    for (Index j = 0; j < n; ++j) {
      const Index to = (j + 1) % n;
      const QuantumChannel b = random_channel(aux, n_kraus, rng.next());
      for (Index l = 0; l < n_kraus; ++l) ul[l].block(to * aux, j * aux, aux, aux) = b.kraus()[l];
    }
    // The cycle must not carry more than the n-th roots of unity on the periphery.
    const ComplexVector ev = eigenvalues(Superoperator::from_kraus(ul).matrix);
    Index peripheral = 0;
    for (Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) >= 1.0 - 1e-6) ++peripheral;
    if (peripheral != n && aux > 1) continue;
    std::vector<ComplexMatrix> kraus = extend_with_decay(ul, decay_dim, rng);
    const ComplexMatrix w = random_unitary(d_ul + decay_dim, rng);
    for (auto& a : kraus) a = w * a * w.adjoint();
    return QuantumChannel(std::move(kraus));
  }
  throw ConstructionError("could not sample a periodic channel with a simple cycle");
}

}  // namespace chasym

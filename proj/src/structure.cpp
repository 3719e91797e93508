#include "chasym/structure.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "chasym/algebra.hpp"

namespace chasym {

Eigen::VectorXd StructureBlock::phases() const {
  Eigen::VectorXd out(d);
  for (Index a = 0; a < d; ++a) out(a) = std::arg(u(a, a));
  return out;
}

Index CanonicalStructure::ul_dim() const {
  Index n = 0;
  for (const auto& b : blocks) n += b.d * b.m;
  return n;
}

QuantumChannel faithful_restriction(const QuantumChannel& c, const FourCorners& fc) {
  if (fc.ul_dim() < 1) throw CornerConditionError("the non-decaying subspace is empty");
  const ComplexMatrix& w = fc.ul_basis;
  std::vector<ComplexMatrix> kraus;
  for (const auto& a : c.kraus()) kraus.push_back(w.adjoint() * a * w);
  const double residual =
      (kraus_gram(kraus) - ComplexMatrix::Identity(fc.ul_dim(), fc.ul_dim())).norm();
  if (residual > 1e-8)
    throw CornerConditionError("sum A_ul^dagger A_ul differs from P by " +
                               std::to_string(residual));
  return QuantumChannel(std::move(kraus), 1e-8);
}

namespace {

struct ProbeRetry {};

// Groups ascending eigenvalues separated by more than `gap`.
std::vector<std::vector<Index>> split_spectrum(const Eigen::VectorXd& w, double gap) {
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < w.size(); ++i) {
    if (i == 0 || w(i) - w(i - 1) > gap) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

ComplexMatrix columns_of(const ComplexMatrix& v, const std::vector<Index>& idx) {
  ComplexMatrix out(v.rows(), static_cast<Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = v.col(idx[i]);
  return out;
}

// Orthonormal basis (as matrices) of span{S^dagger X S : X in algebra}.
std::vector<ComplexMatrix> compress_algebra(const std::vector<ComplexMatrix>& algebra,
                                            const ComplexMatrix& s) {
  const Index n = s.cols();
  ComplexMatrix stacked(n * n, static_cast<Index>(algebra.size()));
  for (size_t i = 0; i < algebra.size(); ++i)
    stacked.col(static_cast<Index>(i)) = vectorize(ComplexMatrix(s.adjoint() * algebra[i] * s));
  const Svd svd = checked_svd(stacked);
  Index rank = 0;
  while (rank < svd.s.size() && svd.s(rank) > 1e-6) ++rank;
  std::vector<ComplexMatrix> out;
  for (Index j = 0; j < rank; ++j) out.push_back(devectorize(svd.u.col(j), n, n));
  return out;
}

double probe_gap(const Eigen::VectorXd& w) {
  return 1e-4 * std::max(1.0, w.maxCoeff() - w.minCoeff());
}

// Matrix units inside one central block: returns V (n x n) with columns in
// DFS-major order a*m + j such that the restricted algebra is M_d (x) I_m.
ComplexMatrix block_basis(const std::vector<ComplexMatrix>& local, Index d, Index m, Rng& rng,
                          const Tolerances& tol) {
  const Index n = d * m;
  if (d == 1) return ComplexMatrix::Identity(n, n);
  const ComplexMatrix h = random_hermitian_element(local, rng);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto groups = split_spectrum(es.eigenvalues(), probe_gap(es.eigenvalues()));
  if (static_cast<Index>(groups.size()) != d) throw ProbeRetry{};
  for (size_t g = 1; g < groups.size(); ++g)
    if (es.eigenvalues()(groups[g].front()) - es.eigenvalues()(groups[g - 1].back()) < tol.probe)
      throw ProbeRetry{};
  for (const auto& g : groups)
    if (static_cast<Index>(g.size()) != m) throw ProbeRetry{};

  const ComplexMatrix w0 = columns_of(es.eigenvectors(), groups[0]);
  ComplexMatrix v(n, n);
  v.leftCols(m) = w0;
  for (Index i = 1; i < d; ++i) {
    const ComplexMatrix wi = columns_of(es.eigenvectors(), groups[static_cast<size_t>(i)]);
    ComplexMatrix best;
    double best_norm = 0.0;
    for (const auto& x : local) {
      const ComplexMatrix coupling = wi.adjoint() * x * w0;
      const double nrm = coupling.norm();
      if (nrm > best_norm) best_norm = nrm, best = coupling;
    }
    if (best_norm < 1e-8) throw ProbeRetry{};
    v.middleCols(i * m, m) = wi * polar_unitary(best);
  }
  return v;
}

struct RawBlock {
  ComplexMatrix support;  // D x n, columns in DFS-major canonical order
  StructureBlock block;
};

// Van Loan rearrangement over all Kraus operators: X_l = U (x) B_l.
void split_factors(const std::vector<ComplexMatrix>& xs, StructureBlock& b, const Tolerances& tol) {
  const Index d = b.d, m = b.m;
  const auto nk = static_cast<Index>(xs.size());
  ComplexMatrix r(d * d, nk * m * m);
  for (Index l = 0; l < nk; ++l)
    for (Index a = 0; a < d; ++a)
      for (Index bb = 0; bb < d; ++bb)
        for (Index i = 0; i < m; ++i)
          for (Index j = 0; j < m; ++j)
            r(a * d + bb, l * m * m + i * m + j) = xs[static_cast<size_t>(l)](a * m + i, bb * m + j);
  const Svd svd = checked_svd(r);
  ComplexMatrix u = devectorize(svd.u.col(0), d, d) * std::sqrt(double(d));
  const double nonunitary = (u.adjoint() * u - ComplexMatrix::Identity(d, d)).norm();
  if (nonunitary > 1e-6)
    throw NonCanonicalShape("noiseless factor is not unitary (residual " +
                            std::to_string(nonunitary) + ")");
  u = polar_unitary(u);

  b.aux_kraus.clear();
  const ComplexMatrix lift = kron(u.adjoint(), ComplexMatrix::Identity(m, m));
  for (const auto& x : xs) {
    const ComplexMatrix y = lift * x;
    ComplexMatrix aux = ComplexMatrix::Zero(m, m);
    for (Index a = 0; a < d; ++a) aux += y.block(a * m, a * m, m, m);
    aux /= double(d);
    const double res = (x - kron(u, aux)).norm();
    if (res > tol.shape)
      throw NonCanonicalShape("Kraus operator is not of the form U (x) B (residual " +
                              std::to_string(res) + ")");
    b.aux_kraus.push_back(std::move(aux));
  }
  b.u = u;
}

// Diagonalizes U; returns the unitary Z with U = Z diag Z^dagger, columns
// ordered by eigenphase, and the global phase moved into the aux factor.
ComplexMatrix diagonalize_unitary(StructureBlock& b) {
  Eigen::ComplexSchur<ComplexMatrix> schur(b.u);
  const ComplexMatrix& t = schur.matrixT();
  std::vector<Index> order(static_cast<size_t>(b.d));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index x, Index y) { return std::arg(t(x, x)) < std::arg(t(y, y)); });
  const Complex g = t(order[0], order[0]) / std::abs(t(order[0], order[0]));
  ComplexMatrix z(b.d, b.d);
  b.u = ComplexMatrix::Zero(b.d, b.d);
  for (Index a = 0; a < b.d; ++a) {
    const Complex ev = t(order[static_cast<size_t>(a)], order[static_cast<size_t>(a)]);
    b.u(a, a) = (ev / std::abs(ev)) * std::conj(g);
    z.col(a) = schur.matrixU().col(order[static_cast<size_t>(a)]);
  }
  for (auto& k : b.aux_kraus) k *= g;
  return z;
}

void fill_fixed_point(StructureBlock& b, const Tolerances& tol) {
  const Superoperator s = Superoperator::from_kraus(b.aux_kraus);
  const ComplexVector ev = eigenvalues(s.matrix);
  Index peripheral = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) >= 1.0 - tol.per) ++peripheral;
  if (peripheral != 1)
    throw NonCanonicalShape("auxiliary factor is not primitive (" + std::to_string(peripheral) +
                            " peripheral eigenvalues)");
  const NullSpace ns = null_space(s.matrix - ComplexMatrix::Identity(s.matrix.rows(), s.matrix.cols()), 1);
  ComplexMatrix rho = devectorize(ns.right.col(0), b.m, b.m);
  rho /= rho.trace();
  b.rho = hermitian_part(rho);
}

// Lexicographic block order: (d, m, eigenphases).
bool block_less(const StructureBlock& x, const StructureBlock& y) {
  if (x.d != y.d) return x.d < y.d;
  if (x.m != y.m) return x.m < y.m;
  const Eigen::VectorXd px = x.phases(), py = y.phases();
  for (Index a = 0; a < px.size(); ++a)
    if (std::abs(px(a) - py(a)) > 1e-9) return px(a) < py(a);
  return false;
}

CanonicalStructure attempt(const QuantumChannel& e, const std::vector<ComplexMatrix>& algebra,
                           Rng& rng, const Tolerances& tol) {
  const Index dim = e.dim();
  const std::vector<ComplexMatrix> center = algebra_center(algebra, rng, tol.probe);
  if (center.empty()) throw NonCanonicalShape("algebra has a trivial center");

  const ComplexMatrix hc = random_hermitian_element(center, rng);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hc);
  const auto groups = split_spectrum(es.eigenvalues(), probe_gap(es.eigenvalues()));
  if (groups.size() != center.size()) throw ProbeRetry{};

  std::vector<RawBlock> raw;
  for (const auto& g : groups) {
    const ComplexMatrix support = columns_of(es.eigenvectors(), g);
    const ComplexMatrix proj = support * support.adjoint();
    for (const auto& x : algebra)
      if ((proj * x - x * proj).norm() > 1e-6) throw ProbeRetry{};
    const auto local = compress_algebra(algebra, support);
    const Index n = support.cols();
    const auto d = static_cast<Index>(std::llround(std::sqrt(double(local.size()))));
    if (d * d != static_cast<Index>(local.size()) || n % d != 0)
      throw NonCanonicalShape("central block algebra is not a full matrix algebra times identity");
    RawBlock rb;
    rb.block.d = d;
    rb.block.m = n / d;
    rb.support = support * block_basis(local, d, n / d, rng, tol);
    raw.push_back(std::move(rb));
  }

  // Kraus operators in the provisional canonical basis.
  ComplexMatrix v(dim, dim);
  Index offset = 0;
  for (auto& rb : raw) {
    v.middleCols(offset, rb.support.cols()) = rb.support;
    rb.block.offset = offset;
    offset += rb.support.cols();
  }
  std::vector<ComplexMatrix> rotated;
  for (const auto& a : e.kraus()) rotated.push_back(v.adjoint() * a * v);
  for (const auto& x : rotated) {
    ComplexMatrix off = x;
    for (const auto& rb : raw)
      off.block(rb.block.offset, rb.block.offset, rb.support.cols(), rb.support.cols()).setZero();
    if (off.norm() > tol.shape)
      throw NonCanonicalShape("Kraus operators couple different central blocks (residual " +
                              std::to_string(off.norm()) + ")");
  }

  for (auto& rb : raw) {
    const Index n = rb.support.cols();
    std::vector<ComplexMatrix> xs;
    for (const auto& x : rotated) xs.push_back(x.block(rb.block.offset, rb.block.offset, n, n));
    split_factors(xs, rb.block, tol);
    const ComplexMatrix z = diagonalize_unitary(rb.block);
    rb.support = rb.support * kron(z, ComplexMatrix::Identity(rb.block.m, rb.block.m));
    fill_fixed_point(rb.block, tol);
  }

  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawBlock& x, const RawBlock& y) { return block_less(x.block, y.block); });
  CanonicalStructure out;
  out.basis_change = ComplexMatrix(dim, dim);
  offset = 0;
  for (auto& rb : raw) {
    out.basis_change.middleCols(offset, rb.support.cols()) = rb.support;
    rb.block.offset = offset;
    offset += rb.support.cols();
    out.blocks.push_back(std::move(rb.block));
  }
  return out;
}

double snap_phase(double lambda) {
  double l = canonical_phase(lambda);
  if (l <= -kPi + 1e-9) l = kPi;
  if (std::abs(l) <= 1e-12) l = 0.0;
  return l;
}

}  // namespace

CanonicalStructure canonical_decomposition(const QuantumChannel& e,
                                           const std::vector<PeripheralPair>& pairs,
                                           std::uint64_t seed, const Tolerances& tol) {
  const std::vector<PeripheralPair> own = pairs.empty() ? peripheral_spectrum(e, tol) : pairs;
  std::vector<ComplexMatrix> gens;
  for (const auto& p : own) gens.push_back(p.j);
  const std::vector<ComplexMatrix> algebra = generate_algebra(gens, 1e-8);
  Rng rng(seed);
  for (int tries = 0; tries < 8; ++tries) {
    try {
      return attempt(e, algebra, rng, tol);
    } catch (const ProbeRetry&) {
    }
  }
  throw DegenerateProbe("random probes stayed degenerate after 8 draws");
}

std::vector<PeripheralPair> canonical_pairs(const CanonicalStructure& s) {
  const Index dim = s.basis_change.rows();
  const ComplexMatrix& v = s.basis_change;
  std::vector<PeripheralPair> out;
  for (const auto& b : s.blocks) {
    const double rn = b.rho.norm();
    const ComplexMatrix id = ComplexMatrix::Identity(b.m, b.m);
    for (Index a = 0; a < b.d; ++a)
      for (Index c = 0; c < b.d; ++c) {
        ComplexMatrix e = ComplexMatrix::Zero(b.d, b.d);
        e(a, c) = 1.0;
        const Index n = b.d * b.m;
        ComplexMatrix psi = ComplexMatrix::Zero(dim, dim), j = ComplexMatrix::Zero(dim, dim);
        psi.block(b.offset, b.offset, n, n) = kron(e, b.rho) / rn;
        j.block(b.offset, b.offset, n, n) = kron(e, id) * rn;
        PeripheralPair p;
        p.lambda = snap_phase(std::arg(b.u(a, a)) - std::arg(b.u(c, c)));
        p.psi = v * psi * v.adjoint();
        p.j = v * j * v.adjoint();
        out.push_back(std::move(p));
      }
  }
  std::stable_sort(out.begin(), out.end(), [](const PeripheralPair& x, const PeripheralPair& y) {
    if (std::abs(std::abs(x.lambda) - std::abs(y.lambda)) > 1e-9)
      return std::abs(x.lambda) < std::abs(y.lambda);
    if (std::abs(x.lambda - y.lambda) > 1e-9) return x.lambda > y.lambda;
    return false;
  });
  for (size_t i = 0; i < out.size(); ++i)
    out[i].mu = (i > 0 && std::abs(out[i].lambda - out[i - 1].lambda) <= 1e-9) ? out[i - 1].mu + 1 : 0;
  return out;
}

double shape_residual(const CanonicalStructure& s, const QuantumChannel& c) {
  const ComplexMatrix& v = s.basis_change;
  const Index n_ul = s.ul_dim();
  double worst = 0.0;
  for (size_t l = 0; l < c.kraus().size(); ++l) {
    const ComplexMatrix x = v.adjoint() * c.kraus()[l] * v;
    ComplexMatrix model = ComplexMatrix::Zero(n_ul, n_ul);
    for (const auto& b : s.blocks)
      model.block(b.offset, b.offset, b.d * b.m, b.d * b.m) = kron(b.u, b.aux_kraus.at(l));
    const double ul = (x.topLeftCorner(n_ul, n_ul) - model).norm();
    const double ll = x.bottomLeftCorner(x.rows() - n_ul, n_ul).norm();
    worst = std::max(worst, std::hypot(ul, ll));
  }
  return worst;
}

DivisionReport division_identity_check(const CanonicalStructure& s, double tol) {
  DivisionReport report;
  const ComplexMatrix& v = s.basis_change;
  const Index dim = v.rows();
  // (+)_k I (x) rho_k, pseudo-inverted, in the canonical basis.
  ComplexMatrix inv = ComplexMatrix::Zero(dim, dim);
  for (const auto& b : s.blocks) {
    const ComplexMatrix r = hermitian_function(b.rho, [](double x) { return x > 1e-12 ? 1.0 / x : 0.0; });
    inv.block(b.offset, b.offset, b.d * b.m, b.d * b.m) =
        kron(ComplexMatrix::Identity(b.d, b.d), r) * b.rho.squaredNorm();
  }
  const ComplexMatrix inv_full = v * inv * v.adjoint();
  for (const auto& p : canonical_pairs(s))
    report.max_residual = std::max(report.max_residual, (p.j - p.psi * inv_full).norm());
  report.passed = report.max_residual <= tol;
  return report;
}

OrganizedAsymptotics find_and_organize(const QuantumChannel& c, std::uint64_t seed,
                                       const Tolerances& tol) {
  OrganizedAsymptotics out;
  out.projection = asymptotic_projection(c, tol);
  out.corners = four_corners(out.projection.superop, tol);
  const FourCorners& fc = out.corners;
  const ComplexMatrix& w = fc.ul_basis;
  const QuantumChannel e = faithful_restriction(c, fc);

  std::vector<PeripheralPair> ul_pairs;
  for (const auto& p : out.projection.pairs) {
    PeripheralPair q = p;
    q.psi = w.adjoint() * p.psi * w;
    q.j = w.adjoint() * p.j * w;
    ul_pairs.push_back(std::move(q));
  }

  try {
    const CanonicalStructure local = canonical_decomposition(e, ul_pairs, seed, tol);
    CanonicalStructure full = local;
    full.basis_change = ComplexMatrix(c.dim(), c.dim());
    full.basis_change.leftCols(fc.ul_dim()) = w * local.basis_change;
    full.basis_change.rightCols(fc.lr_dim()) = fc.lr_basis;
    full.decay_dim = fc.lr_dim();
    for (auto p : canonical_pairs(full)) {
      p.j = extend_conserved(c, fc, p.j, p.lambda, tol);
      out.pairs.push_back(std::move(p));
    }
    out.structure = std::move(full);
  } catch (const NonCanonicalShape& err) {
    out.note = std::string("no blocks-of-factors form: ") + err.what();
    for (const auto& p : out.projection.pairs) {
      PeripheralPair q = p;
      q.j = extend_conserved(c, fc, corner_project(fc, p.j, Corner::ul), p.lambda, tol);
      out.pairs.push_back(std::move(q));
    }
  }
  try {
    std::vector<PeripheralPair> copy = out.pairs;
    const Index alpha = blocking_exponent(copy, 0, tol.rat);
    (void)alpha;
    out.pairs = std::move(copy);
  } catch (const IrrationalPhase&) {
  }
  out.projection_residual =
      (projection_from_pairs(out.pairs).matrix - out.projection.superop.matrix).norm();
  return out;
}

std::optional<DfsForm> dfs_check(const QuantumChannel& c, const FourCorners& fc, double tol) {
  const Index n = fc.ul_dim();
  if (n == 0) return std::nullopt;
  const ComplexMatrix& w = fc.ul_basis;
  std::vector<ComplexMatrix> ul;
  for (const auto& a : c.kraus()) ul.push_back(w.adjoint() * a * w);
  size_t lead = 0;
  for (size_t l = 1; l < ul.size(); ++l)
    if (ul[l].norm() > ul[lead].norm()) lead = l;
  if (ul[lead].norm() < 1e-12) return std::nullopt;

  DfsForm form;
  form.u = polar_unitary(ul[lead]);
  form.a.resize(static_cast<Index>(ul.size()));
  for (size_t l = 0; l < ul.size(); ++l)
    form.a(static_cast<Index>(l)) = (form.u.adjoint() * ul[l]).trace() / double(n);
  const Complex g = form.a(static_cast<Index>(lead)) / std::abs(form.a(static_cast<Index>(lead)));
  form.u *= g;
  form.a *= std::conj(g);
  for (size_t l = 0; l < ul.size(); ++l)
    form.residual = std::max(form.residual, (ul[l] - form.a(static_cast<Index>(l)) * form.u).norm());
  const double weight = form.a.squaredNorm();
  if (form.residual > tol || std::abs(weight - 1.0) > tol) return std::nullopt;
  return form;
}

RecoveryMap recovery_channel(const QuantumChannel& c, const Tolerances& tol) {
  const AsymptoticProjection ap = asymptotic_projection(c, tol);
  const FourCorners fc = four_corners(ap.superop, tol);
  const double n_ul = double(fc.ul_dim());
  RecoveryMap out;
  out.transfer = Superoperator::zero(c.dim());
  for (const auto& a : c.kraus()) {
    if ((fc.q * a * fc.q).norm() > 1e-9) throw NotRecoveryForm("A_lr is not zero");
    const ComplexMatrix ul = fc.p * a * fc.p;
    if ((ul - (ul.trace() / n_ul) * fc.p).norm() > 1e-9)
      throw NotRecoveryForm("A_ul is not proportional to P");
    out.kraus.push_back(fc.p * a * fc.q);
    out.transfer.matrix += kron(out.kraus.back(), out.kraus.back().conjugate());
  }
  out.residual =
      (ap.superop * corner_superop(fc, Corner::lr) - out.transfer).norm();
  return out;
}

}  // namespace chasym

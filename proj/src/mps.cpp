#include "chasym/mps.hpp"

#include <string>

namespace chasym {

MatrixProductState::MatrixProductState(std::vector<ComplexMatrix> t, ComplexMatrix b)
    : tensors(std::move(t)), boundary(std::move(b)) {
  if (tensors.empty()) throw DimensionError("MPS needs at least one site tensor");
  phys_dim = static_cast<Index>(tensors.size());
  bond_dim = tensors.front().rows();
  for (const auto& a : tensors)
    if (a.rows() != bond_dim || a.cols() != bond_dim)
      throw DimensionError("site tensors must all be bond_dim x bond_dim");
  if (boundary.rows() != bond_dim || boundary.cols() != bond_dim)
    throw DimensionError("boundary must be bond_dim x bond_dim");
}

QuantumChannel transfer_channel(const MatrixProductState& m, const Tolerances& tol) {
  const double residual =
      (kraus_gram(m.tensors) - ComplexMatrix::Identity(m.bond_dim, m.bond_dim)).norm();
  if (residual > tol.tp)
    throw NotCanonical("sum A^dagger A differs from I by " + std::to_string(residual));
  return QuantumChannel(m.tensors, tol.tp);
}

std::vector<ComplexMatrix> canonicalize(std::span<const ComplexMatrix> tensors,
                                        const Tolerances& tol) {
  if (tensors.empty()) throw DimensionError("canonicalize needs at least one tensor");
  const Superoperator raw = Superoperator::from_kraus(tensors);
  const double radius = eigenvalues(raw.matrix).cwiseAbs().maxCoeff();
  if (radius < tol.sing) throw CannotCanonicalize("transfer map is nilpotent");

  std::vector<ComplexMatrix> scaled;
  for (const auto& a : tensors) scaled.push_back(a / std::sqrt(radius));
  const auto pairs = peripheral_spectrum(Superoperator::from_kraus(scaled), tol);
  const Index n = tensors.front().rows();
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  for (const auto& p : pairs)
    if (p.lambda == 0.0) x += p.j * std::conj(p.psi.trace());
  x = hermitian_part(x);
  const Eigen::VectorXd w = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(x).eigenvalues();
  if (w.maxCoeff() <= 0.0 || w.minCoeff() <= tol.rank * w.maxCoeff())
    throw CannotCanonicalize("leading left eigenmatrix is not positive definite (eigenvalues " +
                             std::to_string(w.minCoeff()) + " to " + std::to_string(w.maxCoeff()) +
                             ")");
  const ComplexMatrix root = hermitian_function(x, [](double v) { return std::sqrt(v); });
  const ComplexMatrix inv_root = hermitian_function(x, [](double v) { return 1.0 / std::sqrt(v); });
  std::vector<ComplexMatrix> out;
  for (const auto& a : scaled) out.push_back(root * a * inv_root);
  const double residual = (kraus_gram(out) - ComplexMatrix::Identity(n, n)).norm();
  if (residual > 1e-9)
    throw CannotCanonicalize("canonicalized tensors miss trace preservation by " +
                             std::to_string(residual));
  return out;
}

Superoperator observable_superop(std::span<const ComplexMatrix> tensors, const ComplexMatrix& o) {
  const auto d = static_cast<Index>(tensors.size());
  if (o.rows() != d || o.cols() != d)
    throw DimensionError("observable must be phys_dim x phys_dim");
  const Index n = tensors.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l)
      if (o(l, k) != Complex(0.0))
        s += o(l, k) * kron(tensors[static_cast<size_t>(k)],
                            ComplexMatrix(tensors[static_cast<size_t>(l)].conjugate()));
  return {n, s};
}

Superoperator observable_superop(const MatrixProductState& m, const ComplexMatrix& o) {
  return observable_superop(m.tensors, o);
}

MatrixProductState rotate_physical(const MatrixProductState& m, const ComplexMatrix& u) {
  if (u.rows() != m.phys_dim || u.cols() != m.phys_dim)
    throw DimensionError("rotation must be phys_dim x phys_dim");
  std::vector<ComplexMatrix> out;
  for (Index k = 0; k < m.phys_dim; ++k) {
    ComplexMatrix a = ComplexMatrix::Zero(m.bond_dim, m.bond_dim);
    for (Index kp = 0; kp < m.phys_dim; ++kp) a += u(k, kp) * m.tensors[static_cast<size_t>(kp)];
    out.push_back(std::move(a));
  }
  return {std::move(out), m.boundary};
}

Superoperator boundary_superop(const ComplexMatrix& b) { return Superoperator::sandwich(b, b); }

Complex ThermoValue::normalized() const {
  if (std::abs(norm) < 1e-10)
    throw DegenerateBoundary("boundary has no weight on the peripheral duals (norm " +
                             std::to_string(std::abs(norm)) + ")");
  return raw / norm;
}

namespace {

Complex trace_of(const ComplexMatrix& m) { return m.trace(); }

// Lift from range(P) (ul_basis coordinates) to the full bond space.
ComplexMatrix lift_matrix(const FourCorners& fc) {
  return kron(fc.ul_basis, ComplexMatrix(fc.ul_basis.conjugate()));
}

ComplexMatrix matrix_power(const ComplexMatrix& m, Index n) {
  ComplexMatrix result = ComplexMatrix::Identity(m.rows(), m.cols()), base = m;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

}  // namespace

ThermodynamicLimit::ThermodynamicLimit(MatrixProductState m, const Tolerances& tol)
    : m_(std::move(m)), tol_(tol), channel_(transfer_channel(m_, tol)) {
  proj_ = asymptotic_projection(channel_, tol_);
  if (!proj_.alpha) throw IrrationalPhase("transfer channel has no blocking exponent");
  alpha_ = *proj_.alpha;
  corners_ = four_corners(proj_.superop, tol_);
  subleading_ = subleading_modulus(channel_.liouville(), tol_);
  bb_ = boundary_superop(m_.boundary);
  for (const auto& a : m_.tensors)
    reduced_.push_back(corners_.ul_basis.adjoint() * a * corners_.ul_basis);
  const ComplexMatrix up = lift_matrix(corners_);
  pe_reduced_ = Superoperator{corners_.ul_dim(), up.adjoint() * proj_.superop.matrix * up};
}

Complex ThermodynamicLimit::normalization() const {
  return trace_of(proj_.superop.matrix * bb_.matrix);
}

ThermoValue ThermodynamicLimit::expectation(const ComplexMatrix& o) const {
  const ComplexMatrix& p = proj_.superop.matrix;
  const Superoperator obs = observable_superop(m_, o);
  return {trace_of(p * obs.matrix * p * bb_.matrix), normalization()};
}

ThermoValue ThermodynamicLimit::reduced_expectation(const ComplexMatrix& o) const {
  const ComplexMatrix up = lift_matrix(corners_);
  const ComplexMatrix bbar = up.adjoint() * mixture().effective.matrix * up;
  const ComplexMatrix& pe = pe_reduced_.matrix;
  const ComplexMatrix dressed = pe * observable_superop(reduced_, o).matrix * pe;
  return {trace_of(dressed * bbar), trace_of(pe * bbar)};
}

ThermoValue ThermodynamicLimit::correlator(const ComplexMatrix& o1, const ComplexMatrix& o2,
                                           std::optional<Index> w) const {
  const ComplexMatrix& p = proj_.superop.matrix;
  const ComplexMatrix s1 = observable_superop(m_, o1).matrix;
  const ComplexMatrix s2 = observable_superop(m_, o2).matrix;
  if (w && *w < 0) throw DimensionError("separation must be nonnegative");
  const ComplexMatrix middle = w ? matrix_power(channel_.liouville().matrix, *w) : p;
  return {trace_of(p * s1 * middle * s2 * p * bb_.matrix), normalization()};
}

ThermoValue ThermodynamicLimit::boundary_observable(const ComplexMatrix& o, Side side) const {
  const ComplexMatrix& p = proj_.superop.matrix;
  const ComplexMatrix s = observable_superop(m_, o).matrix;
  const ComplexMatrix inner = side == Side::left ? ComplexMatrix(s * p) : ComplexMatrix(p * s);
  return {trace_of(inner * bb_.matrix), normalization()};
}

const BoundaryMixture& ThermodynamicLimit::mixture() const {
  if (mixture_) return *mixture_;
  const FourCorners& fc = corners_;
  const ComplexMatrix& w = fc.ul_basis;
  const ComplexMatrix b_ul = fc.p * m_.boundary * fc.p;
  const ComplexMatrix b_ll = fc.q * m_.boundary * fc.p;
  const Superoperator decay_part = proj_.superop * corner_superop(fc, Corner::lr);

  BoundaryMixture mix;
  mix.effective = boundary_superop(b_ul) + decay_part * boundary_superop(b_ll);
  mix.components.push_back(w.adjoint() * b_ul * w);
  if (fc.lr_dim() > 0 && b_ll.norm() > 0.0) {
    // B_k = F^k B_ll, then recombined into the fewest components carrying the same map.
    const auto f = kraus_from_choi(decay_part, tol_.rank);
    Superoperator carried = Superoperator::zero(fc.dim());
    for (const auto& fk : f) carried = carried + boundary_superop(ComplexMatrix(fk * b_ll));
    for (const auto& bk : kraus_from_choi(carried, tol_.rank))
      mix.components.push_back(w.adjoint() * bk * w);
  }
  mixture_ = std::move(mix);
  return *mixture_;
}

Complex ThermodynamicLimit::mixture_expectation(const ComplexMatrix& o) const {
  const ComplexMatrix& pe = pe_reduced_.matrix;
  const ComplexMatrix dressed = pe * observable_superop(reduced_, o).matrix * pe;
  Complex total = 0.0;
  for (const auto& bk : mixture().components)
    total += trace_of(dressed * boundary_superop(bk).matrix);
  return total;
}

namespace {

std::vector<const ComplexMatrix*> site_table(
    const std::vector<std::pair<Index, ComplexMatrix>>& observables, Index length, Index d) {
  if (length < 1) throw DimensionError("chain length must be positive");
  std::vector<const ComplexMatrix*> table(static_cast<size_t>(length), nullptr);
  for (const auto& [site, o] : observables) {
    if (site < 0 || site >= length) throw DimensionError("observable site outside the chain");
    if (o.rows() != d || o.cols() != d) throw DimensionError("observable must be phys_dim x phys_dim");
    if (table[static_cast<size_t>(site)]) throw DimensionError("two observables on one site");
    table[static_cast<size_t>(site)] = &o;
  }
  return table;
}

}  // namespace

ThermoValue finite_chain_oracle(const MatrixProductState& m,
                                const std::vector<std::pair<Index, ComplexMatrix>>& observables,
                                Index length) {
  const auto table = site_table(observables, length, m.phys_dim);
  const ComplexMatrix t = Superoperator::from_kraus(m.tensors).matrix;
  ComplexMatrix raw = boundary_superop(m.boundary).matrix;
  ComplexMatrix norm = raw;
  for (Index i = 0; i < length; ++i) {
    const ComplexMatrix* o = table[static_cast<size_t>(i)];
    raw = o ? ComplexMatrix(raw * observable_superop(m, *o).matrix) : ComplexMatrix(raw * t);
    norm = norm * t;
  }
  return {raw.trace(), norm.trace()};
}

ThermoValue finite_chain_enumerate(const MatrixProductState& m,
                                   const std::vector<std::pair<Index, ComplexMatrix>>& observables,
                                   Index length) {
  if (length > 3) throw DimensionError("enumeration is limited to three sites");
  const auto table = site_table(observables, length, m.phys_dim);
  Index strings = 1;
  for (Index i = 0; i < length; ++i) strings *= m.phys_dim;
  const auto digit = [&](Index s, Index i) {
    for (Index k = 0; k < i; ++k) s /= m.phys_dim;
    return s % m.phys_dim;
  };
  ComplexVector coef(strings);
  for (Index s = 0; s < strings; ++s) {
    ComplexMatrix prod = m.boundary;
    for (Index i = 0; i < length; ++i) prod = prod * m.tensors[static_cast<size_t>(digit(s, i))];
    coef(s) = prod.trace();
  }
  ThermoValue out{0.0, coef.squaredNorm()};
  for (Index s = 0; s < strings; ++s)
    for (Index sp = 0; sp < strings; ++sp) {
      Complex weight = 1.0;
      for (Index i = 0; i < length && weight != Complex(0.0); ++i) {
        const ComplexMatrix* o = table[static_cast<size_t>(i)];
        weight *= o ? (*o)(digit(sp, i), digit(s, i))
                    : Complex(digit(sp, i) == digit(s, i) ? 1.0 : 0.0);
      }
      out.raw += std::conj(coef(sp)) * coef(s) * weight;
    }
  return out;
}

}  // namespace chasym

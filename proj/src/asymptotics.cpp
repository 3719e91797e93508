#include "chasym/asymptotics.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/SVD>

namespace chasym {

namespace {

// Fixes the free phase of a singleton pair: trace of psi real positive, or
// failing that its largest entry.
void fix_phase(PeripheralPair& p) {
  Complex ref = p.psi.trace();
  if (std::abs(ref) < 1e-8) {
    Index r = 0, c = 0;
    p.psi.cwiseAbs().maxCoeff(&r, &c);
    ref = p.psi(r, c);
  }
  if (std::abs(ref) == 0.0) return;
  const Complex phase = std::conj(ref) / std::abs(ref);
  p.psi *= phase;
  p.j *= phase;
}

}  // namespace

std::vector<PeripheralPair> peripheral_spectrum(const Superoperator& s, const Tolerances& tol) {
  const Index n = s.matrix.rows();
  const Index d = s.dim;
  const ComplexVector ev = eigenvalues(s.matrix);

  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i)
    if (std::abs(ev(i)) >= 1.0 - tol.per) keep.push_back(i);
  ComplexVector per(static_cast<Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) per(static_cast<Index>(i)) = ev(keep[i]);

  struct Group {
    double lambda;
    std::vector<PeripheralPair> pairs;
  };
  std::vector<Group> groups;
  const double scale = std::max(1.0, s.matrix.norm());
  for (const auto& cluster : cluster_values(per, tol.group)) {
    const auto k = static_cast<Index>(cluster.size());
    Complex mean = 0;
    for (Index i : cluster) mean += per(i);
    mean /= double(k);

    const NullSpace ns = null_space(s.matrix - mean * ComplexMatrix::Identity(n, n), k);
    if (ns.singular_values.maxCoeff() > 1e-6 * scale)
      throw PeripheralJordanError("geometric multiplicity below algebraic multiplicity at |mu| = " +
                                  std::to_string(std::abs(mean)));
    const ComplexMatrix gram = ns.left.adjoint() * ns.right;
    Eigen::JacobiSVD<ComplexMatrix> gsvd(gram);
    if (gsvd.singularValues()(k - 1) < 1e-10)
      throw PeripheralJordanError("left/right Gram matrix is singular for a peripheral group");
    const ComplexMatrix left = ns.left * gram.inverse().adjoint();

    double lambda = canonical_phase(std::arg(mean));
    if (lambda <= -kPi + tol.group) lambda = kPi;
    if (std::abs(lambda) <= tol.group) lambda = 0.0;

    Group g{lambda, {}};
    for (Index c = 0; c < k; ++c) {
      PeripheralPair p;
      p.lambda = lambda;
      p.mu = c;
      p.psi = devectorize(ns.right.col(c), d, d);
      p.j = devectorize(left.col(c), d, d);
      if (k == 1) fix_phase(p);
      g.pairs.push_back(std::move(p));
    }
    groups.push_back(std::move(g));
  }

  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (std::abs(std::abs(a.lambda) - std::abs(b.lambda)) > 1e-9)
      return std::abs(a.lambda) < std::abs(b.lambda);
    return a.lambda > b.lambda;
  });
  std::vector<PeripheralPair> out;
  for (auto& g : groups)
    for (auto& p : g.pairs) out.push_back(std::move(p));
  return out;
}

std::vector<PeripheralPair> peripheral_spectrum(const QuantumChannel& c, const Tolerances& tol) {
  return peripheral_spectrum(c.liouville(), tol);
}

std::optional<Index> root_order(double lambda, Index n_max, double tol_rat) {
  for (Index big_n = 1; big_n <= n_max; ++big_n) {
    const double step = 2.0 * kPi / double(big_n);
    const double n = std::round(lambda / step);
    if (std::abs(lambda - n * step) <= tol_rat) return big_n;
  }
  return std::nullopt;
}

Index blocking_exponent(std::vector<PeripheralPair>& pairs, Index n_max, double tol_rat) {
  Index alpha = 1;
  for (auto& p : pairs) {
    const Index limit = n_max > 0 ? n_max : std::max<Index>(p.psi.rows() * p.psi.rows(), 64);
    p.root_order = root_order(p.lambda, limit, tol_rat);
    if (!p.root_order)
      throw IrrationalPhase("phase " + std::to_string(p.lambda) +
                            " is not a root of unity of order <= " + std::to_string(limit));
    alpha = std::lcm(alpha, *p.root_order);
  }
  return alpha;
}

Superoperator projection_from_pairs(std::span<const PeripheralPair> pairs) {
  if (pairs.empty()) throw DimensionError("projection_from_pairs: no pairs");
  const Index d = pairs.front().psi.rows();
  Superoperator out = Superoperator::zero(d);
  for (const auto& p : pairs) out.matrix.noalias() += vectorize(p.psi) * vectorize(p.j).adjoint();
  return out;
}

AsymptoticProjection asymptotic_projection(const Superoperator& s, const Tolerances& tol) {
  AsymptoticProjection out;
  out.pairs = peripheral_spectrum(s, tol);
  try {
    out.alpha = blocking_exponent(out.pairs, 0, tol.rat);
  } catch (const IrrationalPhase&) {
    out.alpha.reset();
  }
  out.superop = projection_from_pairs(out.pairs);
  return out;
}

AsymptoticProjection asymptotic_projection(const QuantumChannel& c, const Tolerances& tol) {
  return asymptotic_projection(c.liouville(), tol);
}

Superoperator power_limit_oracle(const Superoperator& s, Index alpha, double eps) {
  if (alpha < 1) throw DimensionError("power_limit_oracle: alpha must be positive");
  ComplexMatrix m = ComplexMatrix::Identity(s.matrix.rows(), s.matrix.cols());
  ComplexMatrix base = s.matrix;
  for (Index e = alpha; e > 0; e >>= 1) {
    if (e & 1) m = m * base;
    if (e > 1) base = base * base;
  }
  const ComplexMatrix step = m;
  for (int round = 0; round < 60; ++round) {
    ComplexMatrix next = m * m;
    const double diff = (next - m).norm();
    m = std::move(next);
    if (diff > eps) continue;
    // Squaring also converges for an alpha that is off by a power of two, so
    // the limit must be invariant under one more alpha-block.
    const double drift = (m * step - m).norm();
    if (drift > std::max(eps, 1e-9) * std::max(1.0, m.norm()))
      throw ConvergenceError("limit is not invariant under the blocked channel; alpha is wrong");
    return {s.dim, m};
  }
  throw ConvergenceError("blocked powers did not converge after 2^60 applications");
}

Superoperator power_limit_oracle(const QuantumChannel& c, Index alpha, double eps) {
  return power_limit_oracle(c.liouville(), alpha, eps);
}

double subleading_modulus(const Superoperator& s, const Tolerances& tol) {
  const ComplexVector ev = eigenvalues(s.matrix);
  double best = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    const double a = std::abs(ev(i));
    if (a < 1.0 - tol.per) best = std::max(best, a);
  }
  return best;
}

namespace {

Superoperator lr_inverse(const Superoperator& shifted, const FourCorners& fc, const Tolerances& tol) {
  const Superoperator r = corner_superop(fc, Corner::lr);
  const auto basis = corner_basis(fc, Corner::lr);
  try {
    return restricted_inverse(r * shifted * r, basis, tol.sing);
  } catch (const SingularRestriction& e) {
    throw EigenvalueCollision(std::string("peripheral eigenvalue also in the lr spectrum: ") +
                              e.what());
  }
}

}  // namespace

Superoperator lr_resolvent(const Superoperator& s, const FourCorners& fc, double lambda,
                           const Tolerances& tol) {
  return lr_inverse(s - std::polar(1.0, lambda) * Superoperator::identity(s.dim), fc, tol);
}

Superoperator lr_adjoint_resolvent(const Superoperator& s, const FourCorners& fc, double lambda,
                                   const Tolerances& tol) {
  return lr_inverse(s.adjoint() - std::polar(1.0, -lambda) * Superoperator::identity(s.dim), fc,
                    tol);
}

ComplexMatrix extend_conserved(const QuantumChannel& c, const FourCorners& fc,
                               const ComplexMatrix& j_ul, double lambda, const Tolerances& tol) {
  const ComplexMatrix ul = corner_project(fc, j_ul, Corner::ul);
  if (fc.lr_dim() == 0) return ul;
  const Superoperator inv = lr_adjoint_resolvent(c.liouville(), fc, lambda, tol);
  const ComplexMatrix pushed = corner_project(fc, apply_adjoint(c, ul), Corner::lr);
  return ul - inv(pushed);
}

Complex asymptotic_coefficient(const QuantumChannel& c, const FourCorners& fc,
                               const ComplexMatrix& j_ul, double lambda, const ComplexMatrix& rho,
                               const Tolerances& tol) {
  const ComplexMatrix ul = corner_project(fc, j_ul, Corner::ul);
  Complex value = (ul.adjoint() * rho).trace();
  if (fc.lr_dim() == 0) return value;
  const Superoperator res = lr_resolvent(c.liouville(), fc, lambda, tol);
  value -= (ul.adjoint() * chasym::apply(c, res(rho))).trace();
  return value;
}

}  // namespace chasym

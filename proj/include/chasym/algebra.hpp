#pragma once

#include <span>
#include <vector>

#include "chasym/numerics.hpp"
#include "chasym/random.hpp"

namespace chasym {

// Frobenius-orthonormal basis of the smallest subspace containing `gens` that
// is closed under products and adjoints. Iterates until the dimension has
// been stable for two rounds. Directions with residual norm below tol are
// treated as already contained.
std::vector<ComplexMatrix> generate_algebra(std::span<const ComplexMatrix> gens, double tol = 1e-8);

// Orthonormal basis of the center of a *-algebra given by an orthonormal
// basis. Solves the commutator equations against two random elements and
// then checks the result against every basis element; redraws up to
// `attempts` times. Throws DegenerateProbe if no draw separates the algebra.
std::vector<ComplexMatrix> algebra_center(std::span<const ComplexMatrix> basis, Rng& rng,
                                          double tol = 1e-8, int attempts = 8);

// Random Hermitian element of span(basis) (basis closed under adjoint).
ComplexMatrix random_hermitian_element(std::span<const ComplexMatrix> basis, Rng& rng);

// Columns = vectorized matrices.
ComplexMatrix stack_vectorized(std::span<const ComplexMatrix> ms);

}  // namespace chasym

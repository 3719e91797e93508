#pragma once

#include <cstdint>
#include <random>

#include "chasym/numerics.hpp"

namespace chasym {

// Seeded source for every random draw in the library. Same seed, same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  std::uint64_t next() { return engine_(); }

  ComplexMatrix ginibre(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Haar-distributed isometry (rows >= cols) and unitary.
ComplexMatrix random_isometry(Index rows, Index cols, Rng& rng);
ComplexMatrix random_unitary(Index n, Rng& rng);

ComplexMatrix random_hermitian(Index n, Rng& rng);
// Full-rank density matrix with trace one.
ComplexMatrix random_density(Index n, Rng& rng);

}  // namespace chasym

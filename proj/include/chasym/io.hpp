#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chasym/asymptotics.hpp"
#include "chasym/channel.hpp"
#include "chasym/mps.hpp"
#include "chasym/structure.hpp"

namespace chasym {

using Json = nlohmann::json;

// Malformed or out-of-schema input. path() is a JSON pointer-like location.
class InputError : public Error {
 public:
  InputError(std::string path, const std::string& what)
      : Error("InputError", path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Matrices are row lists of [re, im] pairs; plain numbers are read as real entries.
Json to_json(const ComplexMatrix& m);
Json to_json(Complex z);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);

// Parse errors carry the line and column reported by the parser.
Json parse_json(const std::string& text, const std::string& source);
std::string read_file(const std::string& filename);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

// {"dim": D, "kraus": [matrix, ...]}; "dim" is optional on input.
QuantumChannel channel_from_json(const Json& j, const Tolerances& tol = {});
Json channel_to_json(const QuantumChannel& c);

// {"rho": matrix}; must be Hermitian, PSD and of unit trace to 1e-8.
ComplexMatrix state_from_json(const Json& j);

// {"phys_dim": d, "bond_dim": N, "tensors": [matrix x d], "boundary": matrix}
MatrixProductState mps_from_json(const Json& j);
Json mps_to_json(const MatrixProductState& m);

// A bare d x d matrix or {"observable": matrix}.
ComplexMatrix observable_from_json(const Json& j);

Json pairs_to_json(const std::vector<PeripheralPair>& pairs);
Json structure_to_json(const CanonicalStructure& s);

// Two-space indentation; doubles in shortest round-trip form.
std::string dump(const Json& j);

}  // namespace chasym

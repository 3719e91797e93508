#include "chasym/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace chasym {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

Complex entry_from_json(const Json& e, const std::string& path) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InputError(path, "expected a number or a [re, im] pair");
}

const Json& field(const Json& j, const char* name, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  const auto it = j.find(name);
  if (it == j.end()) throw InputError(path, std::string("missing field \"") + name + "\"");
  return *it;
}

Index positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw InputError(path, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw InputError(path, "expected a non-empty list of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw InputError(at(path, 0), "expected a non-empty row");
  ComplexMatrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string rp = at(path, r);
    if (!j[r].is_array()) throw InputError(rp, "expected a row");
    if (j[r].size() != cols)
      throw InputError(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                               std::to_string(cols));
    for (size_t c = 0; c < cols; ++c) {
      const Complex z = entry_from_json(j[r][c], at(rp, c));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InputError(at(rp, c), "entry is not finite");
      m(static_cast<Index>(r), static_cast<Index>(c)) = z;
    }
  }
  return m;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is the 1-based offset of the failure; turn it into line:column.
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col),
                     "malformed JSON");
  }
}

std::string read_file(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw InputError(filename, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

QuantumChannel channel_from_json(const Json& j, const Tolerances& tol) {
  const Json& list = field(j, "kraus", "");
  if (!list.is_array() || list.empty()) throw InputError("kraus", "expected a non-empty list");
  std::vector<ComplexMatrix> kraus;
  for (size_t i = 0; i < list.size(); ++i) {
    kraus.push_back(matrix_from_json(list[i], at("kraus", i)));
    if (kraus.back().rows() != kraus.back().cols() || kraus.back().rows() != kraus.front().rows())
      throw InputError(at("kraus", i), "Kraus operators must be square and of equal size");
  }
  if (const auto it = j.find("dim"); it != j.end() && positive_int(*it, "dim") != kraus.front().rows())
    throw InputError("dim", "does not match the Kraus operator size");
  return QuantumChannel(std::move(kraus), tol.tp);
}

Json channel_to_json(const QuantumChannel& c) {
  Json list = Json::array();
  for (const auto& a : c.kraus()) list.push_back(to_json(a));
  return {{"dim", c.dim()}, {"kraus", list}};
}

ComplexMatrix state_from_json(const Json& j) {
  const ComplexMatrix rho = matrix_from_json(field(j, "rho", ""), "rho");
  if (rho.rows() != rho.cols()) throw InputError("rho", "state must be square");
  if ((rho - rho.adjoint()).norm() > 1e-8) throw InputError("rho", "state is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-8) throw InputError("rho", "state trace is not 1");
  const double low = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hermitian_part(rho))
                         .eigenvalues()
                         .minCoeff();
  if (low < -1e-8) throw InputError("rho", "state has a negative eigenvalue");
  return rho;
}

MatrixProductState mps_from_json(const Json& j) {
  const Index d = positive_int(field(j, "phys_dim", ""), "phys_dim");
  const Index n = positive_int(field(j, "bond_dim", ""), "bond_dim");
  const Json& list = field(j, "tensors", "");
  if (!list.is_array() || static_cast<Index>(list.size()) != d)
    throw InputError("tensors", "expected phys_dim = " + std::to_string(d) + " matrices");
  std::vector<ComplexMatrix> tensors;
  for (size_t i = 0; i < list.size(); ++i) {
    tensors.push_back(matrix_from_json(list[i], at("tensors", i)));
    if (tensors.back().rows() != n || tensors.back().cols() != n)
      throw InputError(at("tensors", i), "expected a bond_dim x bond_dim matrix");
  }
  ComplexMatrix b = matrix_from_json(field(j, "boundary", ""), "boundary");
  if (b.rows() != n || b.cols() != n) throw InputError("boundary", "expected a bond_dim x bond_dim matrix");
  return {std::move(tensors), std::move(b)};
}

Json mps_to_json(const MatrixProductState& m) {
  Json list = Json::array();
  for (const auto& a : m.tensors) list.push_back(to_json(a));
  return {{"phys_dim", m.phys_dim},
          {"bond_dim", m.bond_dim},
          {"tensors", list},
          {"boundary", to_json(m.boundary)}};
}

ComplexMatrix observable_from_json(const Json& j) {
  const bool wrapped = j.is_object();
  const ComplexMatrix o =
      matrix_from_json(wrapped ? field(j, "observable", "") : j, wrapped ? "observable" : "");
  if (o.rows() != o.cols()) throw InputError(wrapped ? "observable" : "", "observable must be square");
  return o;
}

Json pairs_to_json(const std::vector<PeripheralPair>& pairs) {
  Json out = Json::array();
  for (const auto& p : pairs) {
    Json e = {{"lambda", p.lambda},
              {"mu", p.mu},
              {"eigenvalue", to_json(p.eigenvalue())},
              {"root_order", p.root_order ? Json(*p.root_order) : Json(nullptr)},
              {"psi", to_json(p.psi)},
              {"j", to_json(p.j)}};
    out.push_back(std::move(e));
  }
  return out;
}

Json structure_to_json(const CanonicalStructure& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks) {
    Json aux = Json::array();
    for (const auto& k : b.aux_kraus) aux.push_back(to_json(k));
    blocks.push_back({{"d", b.d}, {"m", b.m}, {"U", to_json(b.u)}, {"aux_kraus", aux}, {"rho", to_json(b.rho)}});
  }
  return {{"basis_change", to_json(s.basis_change)}, {"blocks", blocks}, {"decay_dim", s.decay_dim}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace chasym

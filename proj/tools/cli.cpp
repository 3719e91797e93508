#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chasym/io.hpp"

namespace chasym::cli {
namespace {

struct Options {
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  bool verify = false;
  bool raw = false;
  bool timings = false;
  int jobs = 1;
  std::string format = "json";
  // mps
  std::string sep;
  std::string side = "left";
  std::optional<Index> oracle;

  Tolerances tol() const { return Tolerances{}.scaled(tol_scale); }
  double scaled(double t) const { return t * tol_scale; }
};

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on) {}
  void mark(const std::string& stage) {
    if (!on_) return;
    const auto now = std::chrono::steady_clock::now();
    stages_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  void attach(Json& report) const {
    if (on_) report["timings"] = stages_;
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  Json stages_ = Json::object();
};

class Checks {
 public:
  void add(const std::string& name, double residual, double tolerance, const std::string& note = {}) {
    Json c = {{"name", name}, {"status", residual <= tolerance ? "pass" : "fail"},
              {"residual", residual}, {"tolerance", tolerance}};
    if (!note.empty()) c["note"] = note;
    failed_ = failed_ || residual > tolerance;
    list_.push_back(std::move(c));
  }
  void flag(const std::string& name, bool passed, double residual, const std::string& note) {
    list_.push_back({{"name", name}, {"status", passed ? "pass" : "fail"}, {"residual", residual}, {"note", note}});
    failed_ = failed_ || !passed;
  }
  void skip(const std::string& name, const std::string& note) {
    list_.push_back({{"name", name}, {"status", "skip"}, {"note", note}});
  }
  bool failed() const { return failed_; }
  const Json& json() const { return list_; }

 private:
  Json list_ = Json::array();
  bool failed_ = false;
};

Json header(const std::string& command, const std::string& digest, const Options& o) {
  return {{"schema", 1}, {"command", command}, {"input_digest", "fnv1a64:" + digest},
          {"seed", o.seed}, {"tol_scale", o.tol_scale}};
}

struct Outcome {
  Json report;
  int code = kOk;
};

// Runs body and converts library errors into a report with the matching exit code.
Outcome guarded(const std::string& command, const std::function<Outcome()>& body) {
  const auto fail = [&](int code, const std::string& name, const std::string& what) {
    Outcome o;
    o.code = code;
    o.report = {{"schema", 1}, {"command", command}, {"error", {{"name", name}, {"message", what}}}};
    return o;
  };
  try {
    return body();
  } catch (const InputError& e) {
    return fail(kInput, e.name(), e.what());
  } catch (const InvalidChannel& e) {
    return fail(kInput, e.name(), e.what());
  } catch (const NotCanonical& e) {
    return fail(kInput, e.name(), e.what());
  } catch (const DegenerateBoundary& e) {
    return fail(kDegenerate, e.name(), e.what());
  } catch (const Error& e) {
    return fail(kNumerical, e.name(), e.what());
  } catch (const Json::exception& e) {
    return fail(kInput, "InputError", e.what());
  } catch (const std::exception& e) {
    return fail(kNumerical, "InternalError", e.what());
  }
}

double biorthogonality(const std::vector<PeripheralPair>& pairs) {
  double worst = 0.0;
  for (size_t a = 0; a < pairs.size(); ++a)
    for (size_t b = 0; b < pairs.size(); ++b)
      worst = std::max(worst, std::abs((pairs[a].j.adjoint() * pairs[b].psi).trace() - (a == b ? 1.0 : 0.0)));
  return worst;
}

// Whether the Hadamard matrix is conserved, tested directly and against the
// span of the computed conserved quantities; the check passes when both agree.
void hadamard_check(const QuantumChannel& c, const std::vector<PeripheralPair>& pairs, Checks& checks) {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const ComplexMatrix image = apply_adjoint(c, h);
  double direct = 1e300, span = 1e300;
  for (const auto& p : pairs) {
    direct = std::min(direct, (image - std::polar(1.0, -p.lambda) * h).norm());
    ComplexMatrix basis(4, 0);
    for (const auto& q : pairs)
      if (std::abs(q.lambda - p.lambda) < 1e-9) {
        basis.conservativeResize(4, basis.cols() + 1);
        basis.col(basis.cols() - 1) = vectorize(q.j);
      }
    const ComplexMatrix q = orthonormal_columns(basis, 1e-10);
    const ComplexVector v = vectorize(h);
    span = std::min(span, (v - q * (q.adjoint() * v)).norm());
  }
  const bool conserved = direct <= 1e-8;
  const bool consistent = conserved == (span <= 1e-7);
  checks.flag(conserved ? "hadamard-conserved" : "hadamard-not-conserved", consistent, direct,
              "direct test agrees with the conserved-quantity span");
}

Outcome analyze_one(const std::string& file, const Options& opt) {
  return guarded("analyze", [&] {
    Stopwatch clock(opt.timings);
    const std::string text = read_file(file);
    const Tolerances tol = opt.tol();
    const QuantumChannel c = channel_from_json(parse_json(text, file), tol);
    clock.mark("parse");
    const OrganizedAsymptotics org = find_and_organize(c, opt.seed, tol);
    clock.mark("organize");
    const FourCorners& fc = org.corners;

    Outcome out;
    Json& r = out.report;
    r = header("analyze", fnv1a_hex(text), opt);
    r["input"] = file;
    r["dim"] = c.dim();
    r["alpha"] = org.projection.alpha ? Json(*org.projection.alpha) : Json(nullptr);
    r["corners"] = {{"ul_dim", fc.ul_dim()}, {"lr_dim", fc.lr_dim()}, {"p", to_json(fc.p)}};
    r["peripheral"] = pairs_to_json(org.pairs);
    r["structure"] = org.structure ? structure_to_json(*org.structure) : Json(nullptr);
    if (!org.note.empty()) r["note"] = org.note;

    Checks checks;
    checks.add("trace-preservation", c.tp_residual(), tol.tp);
    checks.add("biorthogonality", biorthogonality(org.pairs), opt.scaled(1e-7));
    checks.add("projection-reconstruction", org.projection_residual, opt.scaled(1e-7));
    const Superoperator& proj = org.projection.superop;
    checks.add("projection-idempotent", (proj * proj - proj).norm(), opt.scaled(1e-8));
    double leak = 0.0, gram = 0.0;
    ComplexMatrix g = ComplexMatrix::Zero(fc.ul_dim(), fc.ul_dim());
    for (const auto& a : c.kraus()) {
      leak = std::max(leak, (fc.q * a * fc.p).norm());
      const ComplexMatrix ul = fc.ul_basis.adjoint() * a * fc.ul_basis;
      g += ul.adjoint() * ul;
    }
    gram = (g - ComplexMatrix::Identity(fc.ul_dim(), fc.ul_dim())).norm();
    checks.add("corner-invariance", leak, opt.scaled(1e-9));
    checks.add("faithful-restriction", gram, opt.scaled(1e-8));
    if (org.structure) {
      checks.add("block-form", shape_residual(*org.structure, c), tol.shape);
      checks.add("division-identity", division_identity_check(*org.structure).max_residual, opt.scaled(1e-7));
    } else {
      checks.skip("block-form", org.note);
    }
    clock.mark("checks");

    if (opt.verify) {
      const ComplexMatrix& w = fc.ul_basis;
      double commute = 0.0;
      bool rational = true;
      double worst_phase = 0.0;
      const Index dul = fc.ul_dim();
      for (const auto& p : org.pairs) {
        const ComplexMatrix j = w.adjoint() * p.j * w;
        for (const auto& a : c.kraus()) {
          const ComplexMatrix e = w.adjoint() * a * w;
          const double scale = std::max(1e-300, j.norm() * e.norm());
          commute = std::max(commute, (j * e - std::polar(1.0, -p.lambda) * e * j).norm() / scale);
        }
        ComplexMatrix power = ComplexMatrix::Identity(dul, dul);
        for (Index k = 0; k < dul; ++k) power = power * (j / j.norm());
        if (power.norm() > 1e-8 && !root_order(p.lambda, dul, tol.rat)) {
          rational = false;
          worst_phase = std::max(worst_phase, std::abs(p.lambda));
        }
      }
      checks.add("conserved-commutation", commute, opt.scaled(1e-8));
      checks.flag("rational-phases", rational, worst_phase,
                  "non-nilpotent conserved quantities have root-of-unity eigenvalues of order <= D_ul");
      if (c.dim() == 2) hadamard_check(c, org.pairs, checks);
      if (org.projection.alpha) {
        const Superoperator lim = power_limit_oracle(c, *org.projection.alpha, 1e-11);
        checks.add("power-oracle", (lim - proj).norm(), opt.scaled(1e-7));
      } else {
        checks.skip("power-oracle", "irrational peripheral phase; no blocking exponent");
      }
      clock.mark("verify");
    }
    r["checks"] = checks.json();
    clock.attach(r);
    out.code = checks.failed() ? kNumerical : kOk;
    return out;
  });
}

Outcome state_cmd(const std::string& channel_file, const std::string& state_file, const Options& opt) {
  return guarded("state", [&] {
    Stopwatch clock(opt.timings);
    const std::string ctext = read_file(channel_file), stext = read_file(state_file);
    const Tolerances tol = opt.tol();
    const QuantumChannel c = channel_from_json(parse_json(ctext, channel_file), tol);
    const ComplexMatrix rho = state_from_json(parse_json(stext, state_file));
    if (rho.rows() != c.dim()) throw InputError("rho", "state dimension does not match the channel");
    clock.mark("parse");
    const OrganizedAsymptotics org = find_and_organize(c, opt.seed, tol);
    const FourCorners& fc = org.corners;
    const ComplexMatrix limit = org.projection.superop(rho);
    clock.mark("organize");

    Outcome out;
    Json& r = out.report;
    r = header("state", fnv1a_hex(ctext + '\0' + stext), opt);
    r["asymptotic_state"] = to_json(limit);
    Json coeffs = Json::array();
    double closed_vs_direct = 0.0;
    ComplexMatrix rebuilt = ComplexMatrix::Zero(c.dim(), c.dim());
    for (const auto& p : org.pairs) {
      const Complex closed = asymptotic_coefficient(c, fc, corner_project(fc, p.j, Corner::ul), p.lambda, rho, tol);
      const Complex direct = (p.j.adjoint() * limit).trace();
      closed_vs_direct = std::max(closed_vs_direct, std::abs(closed - direct));
      rebuilt += closed * p.psi;
      // weight is the trace the term contributes; the fixed-point weights sum to one.
      coeffs.push_back({{"lambda", p.lambda}, {"mu", p.mu}, {"value", to_json(closed)},
                        {"weight", to_json(closed * p.psi.trace())}});
    }
    r["coefficients"] = coeffs;
    Checks checks;
    checks.add("coefficient-closed-form", closed_vs_direct, opt.scaled(1e-8));
    checks.add("state-reconstruction", (rebuilt - limit).norm(), opt.scaled(1e-8));
    if (opt.verify) {
      if (org.projection.alpha) {
        const Superoperator lim = power_limit_oracle(c, *org.projection.alpha, 1e-11);
        checks.add("power-oracle", (lim(rho) - limit).norm(), opt.scaled(1e-7));
      } else {
        checks.skip("power-oracle", "irrational peripheral phase; no blocking exponent");
      }
      clock.mark("verify");
    }
    r["checks"] = checks.json();
    clock.attach(r);
    out.code = checks.failed() ? kNumerical : kOk;
    return out;
  });
}

Json value_json(const ThermoValue& v, bool raw) {
  return {{"raw", to_json(v.raw)}, {"norm", to_json(v.norm)}, {"value", to_json(raw ? v.raw : v.normalized())}};
}

Outcome mps_cmd(const std::string& sub, const std::string& mps_file, const std::vector<std::string>& obs_files,
                const Options& opt) {
  return guarded("mps " + sub, [&] {
    Stopwatch clock(opt.timings);
    const std::string mtext = read_file(mps_file);
    std::string all = mtext;
    const MatrixProductState m = mps_from_json(parse_json(mtext, mps_file));
    std::vector<ComplexMatrix> obs;
    for (const auto& f : obs_files) {
      const std::string t = read_file(f);
      all += '\0' + t;
      obs.push_back(observable_from_json(parse_json(t, f)));
      if (obs.back().rows() != m.phys_dim) throw InputError(f, "observable must be phys_dim x phys_dim");
    }
    const bool arity_ok = sub == "norm"         ? obs.empty()
                          : sub == "correlator" ? obs.size() == 2
                          : sub == "mixture"    ? obs.size() <= 1
                                                : obs.size() == 1;
    if (!arity_ok) throw InputError("", "wrong number of observable files for mps " + sub);
    clock.mark("parse");
    const ThermodynamicLimit t(m, opt.tol());
    clock.mark("asymptotics");

    Outcome out;
    Json& r = out.report;
    r = header("mps " + sub, fnv1a_hex(all), opt);
    r["alpha"] = t.alpha();
    r["subleading_modulus"] = t.subleading();
    r["corners"] = {{"ul_dim", t.corners().ul_dim()}, {"lr_dim", t.corners().lr_dim()}};
    Checks checks;
    std::optional<ThermoValue> thermo;
    std::optional<ThermoValue> fin;
    const Index half = opt.oracle.value_or(0);

    if (sub == "norm") {
      // The normalization is compared as is, so both values carry a unit norm.
      thermo = ThermoValue{t.normalization(), 1.0};
      r["value"] = to_json(t.normalization());
      if (opt.oracle) fin = ThermoValue{finite_chain_oracle(m, {}, 2 * half).norm, 1.0};
    } else if (sub == "expect") {
      thermo = t.expectation(obs[0]);
      const ThermoValue reduced = t.reduced_expectation(obs[0]);
      checks.add("reduced-form", std::abs(thermo->raw - reduced.raw), opt.scaled(1e-8));
      r.update(value_json(*thermo, opt.raw));
      if (opt.oracle) fin = finite_chain_oracle(m, {{half, obs[0]}}, 2 * half + 1);
    } else if (sub == "correlator") {
      if (opt.sep.empty()) throw InputError("--sep", "correlator needs --sep W or --sep inf");
      std::optional<Index> w;
      if (opt.sep != "inf") {
        try {
          w = std::stoll(opt.sep);
        } catch (const std::exception&) {
          throw InputError("--sep", "expected a nonnegative integer or inf");
        }
        if (*w < 0) throw InputError("--sep", "expected a nonnegative integer or inf");
      }
      thermo = t.correlator(obs[0], obs[1], w);
      r["separation"] = w ? Json(*w) : Json("inf");
      r.update(value_json(*thermo, opt.raw));
      if (opt.oracle) {
        const Index gap = w.value_or(half);
        fin = finite_chain_oracle(m, {{half, obs[0]}, {half + 1 + gap, obs[1]}}, 2 * half + 2 + gap);
      }
    } else if (sub == "boundary") {
      if (opt.side != "left" && opt.side != "right") throw InputError("--side", "expected left or right");
      const Side side = opt.side == "left" ? Side::left : Side::right;
      thermo = t.boundary_observable(obs[0], side);
      r["side"] = opt.side;
      r.update(value_json(*thermo, opt.raw));
      if (opt.oracle) fin = finite_chain_oracle(m, {{side == Side::left ? 0 : half, obs[0]}}, half + 1);
    } else {  // mixture
      const BoundaryMixture& mix = t.mixture();
      Json comps = Json::array();
      for (const auto& b : mix.components) comps.push_back(to_json(b));
      const Index ul = t.corners().ul_dim(), lr = t.corners().lr_dim();
      r["components"] = comps;
      r["k"] = mix.k();
      r["k_within_min_corner_dim"] = mix.k() <= std::min(ul, lr);
      const ComplexMatrix& w = t.corners().ul_basis;
      const ComplexMatrix up = kron(w, ComplexMatrix(w.conjugate()));
      ComplexMatrix sum = ComplexMatrix::Zero(ul * ul, ul * ul);
      for (const auto& b : mix.components) sum += boundary_superop(b).matrix;
      checks.add("mixture-reconstruction", (sum - up.adjoint() * mix.effective.matrix * up).norm(), opt.scaled(1e-8));
      checks.flag("mixture-rank", mix.k() <= ul * lr, double(mix.k()),
                  "number of decay components is at most dim(ul) * dim(lr)");
      if (!obs.empty()) {
        const Complex reduced = t.mixture_expectation(obs[0]);
        const ThermoValue full = t.expectation(obs[0]);
        checks.add("mixture-expectation", std::abs(reduced - full.raw), opt.scaled(1e-8));
        r["mixture_expectation"] = to_json(reduced);
        r.update(value_json(full, opt.raw));
        thermo = full;
      }
    }
    clock.mark("evaluate");

    if (opt.oracle && fin) {
      const Complex a = opt.raw ? fin->raw : fin->normalized();
      const Complex b = opt.raw ? thermo->raw : thermo->normalized();
      r["oracle"] = {{"half_length", half}, {"value", to_json(a)}, {"difference", std::abs(a - b)}};
    } else if (opt.oracle) {
      r["oracle"] = nullptr;
    }
    if (opt.verify) {
      const Superoperator lim = power_limit_oracle(t.channel(), t.alpha(), 1e-11);
      checks.add("power-oracle", (lim - t.projection().superop).norm(), opt.scaled(1e-7));
      clock.mark("verify");
    }
    r["checks"] = checks.json();
    clock.attach(r);
    out.code = checks.failed() ? kNumerical : kOk;
    return out;
  });
}

void emit(const Json& report, const Options& opt, std::ostream& out) {
  if (opt.format == "json") {
    out << dump(report);
    return;
  }
  const auto line = [&](const Json& r) {
    out << r.value("command", std::string("?"));
    if (r.contains("input")) out << " " << r["input"].get<std::string>();
    out << "\n";
    if (r.contains("error")) {
      out << "  error " << r["error"]["name"].get<std::string>() << ": " << r["error"]["message"].get<std::string>()
          << "\n";
      return;
    }
    if (r.contains("peripheral")) out << "  peripheral pairs: " << r["peripheral"].size() << "\n";
    if (r.contains("alpha") && !r["alpha"].is_null()) out << "  alpha: " << r["alpha"] << "\n";
    if (r.contains("structure") && !r["structure"].is_null())
      for (const auto& b : r["structure"]["blocks"]) out << "  block d=" << b["d"] << " m=" << b["m"] << "\n";
    if (r.contains("value")) out << "  value: " << r["value"][0] << " + " << r["value"][1] << "i\n";
    if (r.contains("checks"))
      for (const auto& c : r["checks"]) {
        out << "  " << c["status"].get<std::string>() << "  " << c["name"].get<std::string>();
        if (c.contains("residual")) out << "  (residual " << c["residual"] << ")";
        out << "\n";
      }
  };
  if (report.contains("reports"))
    for (const auto& r : report["reports"]) line(r);
  else
    line(report);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotics of quantum channels and thermodynamic limits of matrix product states", "chasym"};
  app.require_subcommand(1);
  Options opt;
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Random seed for structure probes (fallback: CHASYM_SEED, then 1)");
  app.add_option("--tol", opt.tol_scale, "Multiply every default tolerance by this factor")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verify", opt.verify, "Run the extended property checks and the power-limit oracle");
  app.add_flag("--raw", opt.raw, "Report unnormalized MPS limits");
  app.add_option("--jobs", opt.jobs, "Worker threads for several analyze inputs")->check(CLI::PositiveNumber);
  app.add_flag("--timings", opt.timings, "Include per-stage milliseconds in reports");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::vector<std::string> files;
  auto* analyze = app.add_subcommand("analyze", "Peripheral spectrum, projection and structure of a channel");
  analyze->add_option("channel", files, "Channel JSON file(s)")->required();
  analyze->fallthrough();

  std::string channel_file, state_file;
  auto* state = app.add_subcommand("state", "Asymptotic image of a state and its coefficients");
  state->add_option("channel", channel_file, "Channel JSON file")->required();
  state->add_option("state", state_file, "State JSON file")->required();
  state->fallthrough();

  auto* mps = app.add_subcommand("mps", "Thermodynamic limits of a matrix product state");
  mps->require_subcommand(1);
  mps->fallthrough();
  std::string mps_file;
  std::vector<std::string> obs_files;
  std::vector<CLI::App*> mps_subs;
  for (const char* name : {"norm", "expect", "correlator", "boundary", "mixture"}) {
    auto* s = mps->add_subcommand(name);
    s->add_option("mps", mps_file, "MPS JSON file")->required();
    s->add_option("observables", obs_files, "Observable JSON file(s)");
    s->add_option("--oracle", opt.oracle, "Also contract a finite chain with this many sites per side")
        ->check(CLI::PositiveNumber);
    s->fallthrough();
    mps_subs.push_back(s);
  }
  mps_subs[2]->add_option("--sep", opt.sep, "Separation W in sites, or inf");
  mps_subs[3]->add_option("--side", opt.side, "left or right");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }

  if (seed) {
    opt.seed = *seed;
  } else if (const char* env = std::getenv("CHASYM_SEED")) {
    try {
      opt.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "chasym: CHASYM_SEED is not an integer\n";
      return kInput;
    }
  }

  Outcome result;
  if (analyze->parsed()) {
    std::vector<Outcome> outcomes(files.size());
    std::atomic<size_t> next{0};
    const auto worker = [&] {
      for (size_t i = next++; i < files.size(); i = next++) outcomes[i] = analyze_one(files[i], opt);
    };
    const size_t threads = std::min<size_t>(static_cast<size_t>(opt.jobs), files.size());
    std::vector<std::thread> pool;
    for (size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (outcomes.size() == 1) {
      result = outcomes[0];
    } else {
      result.report = {{"schema", 1}, {"command", "analyze"}, {"reports", Json::array()}};
      for (const auto& o : outcomes) {
        result.report["reports"].push_back(o.report);
        result.code = std::max(result.code, o.code);
      }
    }
  } else if (state->parsed()) {
    result = state_cmd(channel_file, state_file, opt);
  } else {
    for (auto* s : mps_subs)
      if (s->parsed()) result = mps_cmd(s->get_name(), mps_file, obs_files, opt);
  }
  emit(result.report, opt, out);
  if (result.report.contains("error"))
    err << "chasym: " << result.report["error"]["name"].get<std::string>() << ": "
        << result.report["error"]["message"].get<std::string>() << "\n";
  return result.code;
}

}  // namespace chasym::cli

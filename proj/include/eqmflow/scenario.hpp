// scenario.hpp - JSON scenarios: parsing, dispatch to the solvers, and output.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eqmflow/suites.hpp"

namespace eqmflow {

namespace cfgjson {

inline const Json& need(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Config, path + "." + key + ": missing");
  return j.at(key);
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number()) fail(ErrorKind::Config, path + "." + key + ": expected a number");
  return v.get<double>();
}

inline double number_or(const Json& j, const std::string& key, const std::string& path, double fallback) {
  return j.is_object() && j.contains(key) ? number(j, key, path) : fallback;
}

inline int integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number_integer()) fail(ErrorKind::Config, path + "." + key + ": expected an integer");
  return v.get<int>();
}

inline int integer_or(const Json& j, const std::string& key, const std::string& path, int fallback) {
  return j.is_object() && j.contains(key) ? integer(j, key, path) : fallback;
}

inline std::string string(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_string()) fail(ErrorKind::Config, path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::string string_or(const Json& j, const std::string& key, const std::string& path, std::string fallback) {
  return j.is_object() && j.contains(key) ? string(j, key, path) : fallback;
}

inline bool boolean_or(const Json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(ErrorKind::Config, path + "." + key + ": expected true or false");
  return j[key].get<bool>();
}

/// [re, im] or a bare number.
inline Complex complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::Config, path + ": expected a number or [re, im]");
}

}  // namespace cfgjson

// ---------------------------------------------------------------------------

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 42;
  std::string solver;
  Json system;
  Json generator;
  Json initial;
  double t_max = 1.0;
  SolverConfig cfg;
  std::vector<std::string> outputs{"csv", "json"};
  Json extra;  // solver-specific block ("illustration", "hf", "meanfield", "mixtures")
};

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<double> dt, t_max;
  std::optional<std::uint64_t> seed;
  std::optional<int> fock_dim;
  std::optional<double> alpha;
  std::optional<Complex> z;
};

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> s{"nls_direct", "nls_split",    "group",     "density_direct",
                                          "cocycle",    "weinberg",     "grid_nls",  "illustration",
                                          "meanfield",  "hf",           "mixtures"};
  return s;
}

inline Scenario parse_scenario(const Json& j, const Overrides& ov = {}) {
  if (!j.is_object()) fail(ErrorKind::Config, "scenario: top level must be an object");
  Scenario s;
  s.name = cfgjson::string_or(j, "name", "scenario", s.name);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(ErrorKind::Config, "scenario.seed: expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.solver = cfgjson::string(j, "solver", "scenario");
  if (std::find(known_solvers().begin(), known_solvers().end(), s.solver) == known_solvers().end())
    fail(ErrorKind::Config, "scenario.solver: unknown solver \"" + s.solver + "\"");
  s.system = j.value("system", Json::object());
  s.generator = j.value("generator", Json::object());
  s.initial = j.value("initial", Json::object());
  const Json time = j.value("time", Json::object());
  s.t_max = cfgjson::number_or(time, "t_max", "time", s.t_max);
  s.cfg.dt = cfgjson::number_or(time, "dt", "time", s.cfg.dt);
  s.cfg.method = cfgjson::string_or(time, "method", "time", s.cfg.method);
  s.cfg.renormalize = cfgjson::boolean_or(time, "renormalize", "time", s.cfg.renormalize);
  s.cfg.sample_stride = cfgjson::integer_or(time, "sample_stride", "time", s.cfg.sample_stride);
  s.cfg.tail_guard = cfgjson::number_or(j.value("solver_options", Json::object()), "tail_guard", "solver_options",
                                        s.cfg.tail_guard);
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) fail(ErrorKind::Config, "scenario.outputs: expected an array");
    s.outputs.clear();
    for (const auto& o : j["outputs"]) {
      if (!o.is_string() || (o != "csv" && o != "json"))
        fail(ErrorKind::Config, "scenario.outputs: entries must be \"csv\" or \"json\"");
      s.outputs.push_back(o.get<std::string>());
    }
  }
  if (j.contains(s.solver)) s.extra = j[s.solver];
  if (ov.dt) s.cfg.dt = *ov.dt;
  if (ov.t_max) s.t_max = *ov.t_max;
  if (ov.seed) s.seed = *ov.seed;
  require(std::isfinite(s.t_max) && s.t_max >= 0.0, ErrorKind::Config, "time.t_max: must be nonnegative");
  s.cfg.validate();
  return s;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Config, path + ": malformed JSON (" + e.what() + ")");
  }
}

inline Scenario load_scenario(const std::string& path, const Overrides& ov = {}) {
  return parse_scenario(read_json_file(path), ov);
}

// ---------------------------------------------------------------------------
// Building blocks

inline LieRepresentation build_representation(const Json& sys) {
  const std::string alg = cfgjson::string(sys, "algebra", "system");
  if (alg == "su2") {
    const double spin = cfgjson::number(sys, "spin", "system");
    const double twice = 2.0 * spin;
    require(spin > 0.0 && std::abs(twice - std::round(twice)) < 1e-12 && twice <= 64.0, ErrorKind::Config,
            "system.spin: must be a positive half-integer");
    return builtin_su2(spin);
  }
  if (alg == "wh_fock") {
    const int pairs = cfgjson::integer_or(sys, "pairs", "system", 1);
    const int levels = cfgjson::integer(sys, "levels", "system");
    const double lambda = cfgjson::number_or(sys, "lambda", "system", 1.0);
    require(pairs >= 1 && levels >= 2 && lambda > 0.0, ErrorKind::Config, "system: invalid Weyl-Heisenberg parameters");
    return builtin_wh_fock(pairs, levels, lambda);
  }
  fail(ErrorKind::Config, "system.algebra: unknown algebra \"" + alg + "\"");
}

inline ClassicalGenerator build_classical_generator(const Json& g, int arity) {
  const std::string kind = cfgjson::string(g, "kind", "generator");
  if (kind == "linear") return ClassicalGenerator::linear(real_vector_from_json(cfgjson::need(g, "coeffs", "generator"), "generator.coeffs"));
  if (kind != "classical") fail(ErrorKind::Config, "generator.kind: expected \"classical\" or \"linear\", got \"" + kind + "\"");
  const Json& terms = cfgjson::need(g, "terms", "generator");
  if (!terms.is_array()) fail(ErrorKind::Config, "generator.terms: expected an array");
  std::vector<Monomial> ms;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string path = "generator.terms[" + std::to_string(i) + "]";
    Monomial m;
    m.coef = cfgjson::number(terms[i], "coef", path);
    const Json& p = cfgjson::need(terms[i], "powers", path);
    if (!p.is_array()) fail(ErrorKind::Config, path + ".powers: expected an array");
    for (const auto& x : p) {
      if (!x.is_number_integer()) fail(ErrorKind::Config, path + ".powers: expected integers");
      m.powers.push_back(x.get<int>());
    }
    ms.push_back(std::move(m));
  }
  if (ms.empty()) return ClassicalGenerator::constant(arity, 0.0);
  if (static_cast<int>(ms.front().powers.size()) != arity)
    fail(ErrorKind::Config, "generator.terms: powers must have " + std::to_string(arity) + " entries");
  return ClassicalGenerator(arity, std::move(ms));
}

inline Vector build_initial_vector(const Json& init, int dim, std::uint64_t seed, const LieRepresentation* rep) {
  const std::string kind = cfgjson::string(init, "kind", "initial");
  if (kind == "pure") return pure_state_from_json(cfgjson::need(init, "state", "initial"), "initial.state").vec();
  if (kind == "basis") {
    const int k = cfgjson::integer(init, "index", "initial");
    require(k >= 0 && k < dim, ErrorKind::Config, "initial.index: out of range");
    return PureState::basis(dim, k).vec();
  }
  if (kind == "random_pure") return Rng(seed).unit_vector(dim);
  if (kind == "coherent") {
    require(rep && rep->wh, ErrorKind::Config, "initial.kind: \"coherent\" needs a wh_fock system");
    const RealVector x{{cfgjson::number(init, "q", "initial"), cfgjson::number(init, "p", "initial")}};
    return WeylDisplacer(*rep).apply(x, fock_vacuum(*rep));
  }
  fail(ErrorKind::Config, "initial.kind: expected a pure state kind, got \"" + kind + "\"");
}

inline Matrix build_initial_density(const Json& init, int dim, std::uint64_t seed, const LieRepresentation* rep) {
  const std::string kind = cfgjson::string(init, "kind", "initial");
  if (kind == "density") return density_from_json(cfgjson::need(init, "state", "initial"), "initial.state").mat();
  if (kind == "random_density") return Rng(seed).density(dim);
  if (kind == "maximally_mixed") return DensityMatrix::maximally_mixed(dim).mat();
  const Vector x = build_initial_vector(init, dim, seed, rep);
  return x * x.adjoint();
}

inline std::string state_kind(const Json& init) { return cfgjson::string(init, "kind", "initial"); }

// ---------------------------------------------------------------------------
// Running

struct RunResult {
  std::string summary;
  std::vector<std::string> files;
};

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());
}

inline void emit_all(const Scenario& s, const Trajectory& tr, const std::string& out, RunResult& res,
                     const std::string& stem = "trajectory") {
  for (const auto& fmt : s.outputs) {
    const std::string path = join_path(out, s.name + "." + stem + "." + fmt);
    emit_trajectory(tr, fmt == "csv" ? TrajectoryFormat::Csv : TrajectoryFormat::Json, path);
    res.files.push_back(path);
  }
}

inline std::string trajectory_summary(const Scenario& s, const Trajectory& tr) {
  std::ostringstream os;
  os << s.name << ": solver=" << s.solver << " samples=" << tr.size()
     << " t_end=" << format_double(tr.empty() ? 0.0 : tr.times.back())
     << " norm_dev=" << format_double(tr.max_norm_deviation()) << " Q_drift=" << format_double(tr.max_Q_drift())
     << " spectrum_drift=" << format_double(tr.max_spectrum_drift());
  return os.str();
}

inline void write_file(const std::string& out, const std::string& name, const std::string& text, RunResult& res) {
  const std::string path = join_path(out, name);
  write_text_file(path, text);
  res.files.push_back(path);
}

}  // namespace detail

inline std::string illustration_csv(const IllustrationResult& r) {
  std::string s =
      "t,numeric_re,numeric_im,true_re,true_im,restricted_re,restricted_im,restricted_closed_re,restricted_closed_im\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    auto c = [](Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); };
    s += format_double(r.times[i]) + "," + c(r.numeric[i]) + "," + c(r.true_closed[i]) + "," +
         c(r.restricted_numeric[i]) + "," + c(r.restricted_closed[i]) + "\n";
  }
  return s;
}

struct IllustrationParams {
  double alpha = 1.0;
  Complex z{1.0, 0.0};
  int fock_dim = 60;
};

inline IllustrationParams illustration_params(const Json& block, const Overrides& ov) {
  IllustrationParams p;
  p.alpha = cfgjson::number_or(block, "alpha", "illustration", p.alpha);
  if (block.is_object() && block.contains("z")) p.z = cfgjson::complex(block["z"], "illustration.z");
  p.fock_dim = cfgjson::integer_or(block, "fock_dim", "illustration", p.fock_dim);
  if (ov.alpha) p.alpha = *ov.alpha;
  if (ov.z) p.z = *ov.z;
  if (ov.fock_dim) p.fock_dim = *ov.fock_dim;
  require(p.fock_dim >= 2, ErrorKind::Config, "illustration.fock_dim: must be >= 2");
  return p;
}

inline RunResult run_illustration(const Scenario& s, const IllustrationParams& p, const std::string& out) {
  RunResult res;
  const IllustrationResult r = illustration_tangent_circles(p.alpha, p.z, s.t_max, p.fock_dim, s.cfg);
  detail::ensure_dir(out);
  detail::write_file(out, s.name + ".illustration.csv", illustration_csv(r), res);
  detail::emit_all(s, r.numeric_trajectory, out, res);
  std::ostringstream os;
  os << s.name << ": solver=illustration h0=" << format_double(r.h0) << " tail=" << format_double(r.tail)
     << " max|numeric-true|=" << format_double(r.max_numeric_vs_true())
     << " max|restricted-closed|=" << format_double(r.max_restricted_vs_closed());
  res.summary = os.str();
  return res;
}

/// Grid functions for the divergence fixture or an explicit mixture.
inline RunResult run_mixtures(const Scenario& s, const std::string& out) {
  RunResult res;
  const Json& b = s.extra;
  const double eps = cfgjson::number_or(b, "eps", "mixtures", 1.0);
  const double alpha = cfgjson::number_or(b, "alpha", "mixtures", 1.0);
  const int points = cfgjson::integer_or(b, "points", "mixtures", 64);
  const double dx = cfgjson::number_or(b, "dx", "mixtures", 1.0);
  GenuineMixture mu;
  if (s.initial.is_object() && s.initial.contains("components")) {
    mu = mixture_from_json(s.initial);
  } else {
    require(points == 64, ErrorKind::Config, "mixtures.points: the step-function fixture lives on 64 points");
    mu = GenuineMixture::of_pure({0.5, 0.5}, divergence_fixture());
  }
  require(mu.dim() == points, ErrorKind::Config, "mixtures: component size differs from mixtures.points");
  const StateFunction f = nls_grid_functional(discrete_laplacian_hamiltonian(points, dx), eps, GridNonlinearity::power(alpha));
  const DivergenceSeries ds = mixture_divergence_series(mu, f, s.t_max, s.cfg);
  std::string csv = "t,divergence_trace_norm\n";
  for (std::size_t i = 0; i < ds.times.size(); ++i) csv += format_double(ds.times[i]) + "," + format_double(ds.divergence[i]) + "\n";
  detail::ensure_dir(out);
  detail::write_file(out, s.name + ".divergence.csv", csv, res);
  std::ostringstream os;
  os << s.name << ": solver=mixtures samples=" << ds.times.size() << " max_divergence=" << format_double(ds.max());
  if (!(s.initial.is_object() && s.initial.contains("components"))) {
    std::vector<Vector> psis;
    std::vector<double> w;
    for (const auto& c : mu.components()) {
      psis.push_back(eigh_ordered(c.state).vectors.col(0));
      w.push_back(c.weight);
    }
    // delta is anti-Hermitian; i*delta carries the same trace norm.
    os << " delta_trace_norm=" << format_double(trace_norm_hermitian(Matrix(kI * delta_at_zero(psis, w, eps, alpha))));
  }
  res.summary = os.str();
  return res;
}

inline RunResult run_hf(const Scenario& s, const std::string& out) {
  RunResult res;
  const Json& b = s.extra;
  const int d = cfgjson::integer(b, "d", "hf");
  const int N = cfgjson::integer(b, "N", "hf");
  require(d >= 1 && N >= 1 && N <= d, ErrorKind::Config, "hf: need 1 <= N <= d");
  Rng rng(s.seed);
  Matrix h0;
  std::optional<TwoBodyOperator> v;
  if (b.contains("h0")) {
    h0 = matrix_from_json(b["h0"], "hf.h0");
    require(h0.rows() == d, ErrorKind::Config, "hf.h0: size differs from hf.d");
    require(is_hermitian(h0), ErrorKind::Config, "hf.h0: not Hermitian");
  } else {
    h0 = rng.hermitian(d);
  }
  if (b.contains("v")) {
    const Matrix vm = matrix_from_json(b["v"], "hf.v");
    require(vm.rows() == d * d, ErrorKind::Config, "hf.v: size must be d^2");
    try {
      v.emplace(vm);
    } catch (const Error& e) {
      fail(ErrorKind::Config, std::string("hf.v: ") + e.what());
    }
  } else {
    v.emplace(presets::repulsive_interaction(rng, d));
  }
  const Json scf = b.value("scf", Json::object());
  ScfOptions opt;
  opt.damping = cfgjson::number_or(scf, "damping", "hf.scf", opt.damping);
  opt.max_iter = cfgjson::integer_or(scf, "max_iter", "hf.scf", opt.max_iter);
  const ScfResult r = hf_scf(h0, *v, N, presets::core_guess(h0, N), opt);
  detail::ensure_dir(out);
  detail::write_file(out, s.name + ".scf.csv", scf_report_csv(r), res);
  std::ostringstream os;
  os << s.name << ": solver=hf iterations=" << r.iterations << " energy=" << format_double(r.energy)
     << " commutator=" << format_double(r.commutator_residual) << " hf_eq=" << format_double(r.hf_equation_residual)
     << (r.degenerate ? " degenerate_gap" : "");
  if (s.t_max > 0.0) {
    // Time-dependent run from a rotated Slater state so that the flow is not trivial.
    const SlaterState s0 = SlaterState::from_columns(rng.matrix(d).leftCols(N));
    const TdhfResult td = tdhf_evolve(h0, *v, s0, s.t_max, s.cfg);
    detail::emit_all(s, td.trajectory, out, res, "tdhf");
    os << " tdhf_projector_defect=" << format_double(td.max_projector_defect)
       << " tdhf_energy_drift=" << format_double(td.max_energy_drift());
  }
  if (d <= 5 && N <= 3) os << " exact_ground=" << format_double(exact_fermion_ground_energy(h0, *v, N));
  res.summary = os.str();
  return res;
}

inline RunResult run_meanfield(const Scenario& s, const std::string& out) {
  RunResult res;
  MeanFieldProblem p;
  p.site_rep = build_representation(s.system);
  p.Q = build_classical_generator(s.generator, p.site_rep.algebra.n);
  p.rho0 = build_initial_density(s.initial, p.site_rep.dim(), s.seed, &p.site_rep);
  std::vector<int> sizes{2, 4, 6, 8, 10};
  if (s.extra.is_object() && s.extra.contains("sizes")) {
    sizes.clear();
    for (const auto& n : s.extra["sizes"]) {
      if (!n.is_number_integer() || n.get<int>() < 1) fail(ErrorKind::Config, "meanfield.sizes: positive integers expected");
      sizes.push_back(n.get<int>());
    }
  }
  const int samples = cfgjson::integer_or(s.extra, "samples", "meanfield", 20);
  const MeanFieldScan scan = meanfield_error_scan(p, sizes, s.t_max, samples, s.cfg);
  detail::ensure_dir(out);
  detail::write_file(out, s.name + ".scan.csv", scan.csv(), res);
  std::ostringstream os;
  os << s.name << ": solver=meanfield";
  for (std::size_t i = 0; i < scan.sizes.size(); ++i) os << " error(" << scan.sizes[i] << ")=" << format_double(scan.max_error[i]);
  res.summary = os.str();
  return res;
}

inline RunResult run_grid_nls(const Scenario& s, const std::string& out) {
  const int points = cfgjson::integer(s.system, "points", "system");
  const double dx = cfgjson::number_or(s.system, "dx", "system", 1.0);
  const double mass = cfgjson::number_or(s.system, "mass", "system", 1.0);
  const double eps = cfgjson::number_or(s.generator, "eps", "generator", 1.0);
  const double alpha = cfgjson::number_or(s.generator, "alpha", "generator", 1.0);
  Vector psi0;
  const std::string kind = state_kind(s.initial);
  if (kind == "gaussian") {
    const double c = cfgjson::number(s.initial, "center", "initial");
    const double w = cfgjson::number(s.initial, "width", "initial");
    const double k = cfgjson::number_or(s.initial, "k", "initial", 0.0);
    require(w > 0.0, ErrorKind::Config, "initial.width: must be positive");
    psi0.resize(points);
    for (int i = 0; i < points; ++i) {
      const double x = i * dx;
      psi0(i) = std::exp(-0.5 * (x - c) * (x - c) / (w * w)) * std::exp(kI * (k * x));
    }
    psi0 /= psi0.norm();
  } else {
    psi0 = build_initial_vector(s.initial, points, s.seed, nullptr);
  }
  RunResult res;
  const Trajectory tr = nls_grid_evolve(discrete_laplacian_hamiltonian(points, dx, mass), eps,
                                        GridNonlinearity::power(alpha), psi0, s.t_max, s.cfg);
  detail::ensure_dir(out);
  detail::emit_all(s, tr, out, res);
  res.summary = detail::trajectory_summary(s, tr);
  return res;
}

inline RunResult run_scenario(const Scenario& s, const std::string& out, const Overrides& ov = {}) {
  if (s.solver == "illustration") return run_illustration(s, illustration_params(s.extra, ov), out);
  if (s.solver == "mixtures") return run_mixtures(s, out);
  if (s.solver == "hf") return run_hf(s, out);
  if (s.solver == "meanfield") return run_meanfield(s, out);
  if (s.solver == "grid_nls") return run_grid_nls(s, out);

  LieRepresentation rep = build_representation(s.system);
  if (ov.fock_dim && rep.wh) rep = builtin_wh_fock(rep.wh->pairs, *ov.fock_dim, rep.wh->lambda);
  const int n = rep.algebra.n;
  Trajectory tr;
  FlowOptions fo;
  fo.rep = &rep;
  if (s.solver == "nls_direct" || s.solver == "nls_split" || s.solver == "weinberg") {
    const ClassicalGenerator Q = build_classical_generator(s.generator, n);
    const Vector x0 = build_initial_vector(s.initial, rep.dim(), s.seed, &rep);
    if (s.solver == "nls_direct") tr = solve_nls_direct(rep, Q, x0, s.t_max, s.cfg, fo);
    if (s.solver == "nls_split") tr = solve_nls_split(rep, Q, x0, s.t_max, s.cfg, 1e-7, fo);
    if (s.solver == "weinberg") tr = weinberg_gauge_bridge(rep, Q, x0, s.t_max, s.cfg).weinberg;
  } else {
    const Matrix rho0 = build_initial_density(s.initial, rep.dim(), s.seed, &rep);
    const std::string gk = cfgjson::string(s.generator, "kind", "generator");
    if (s.solver == "group") {
      tr = quantum_flow_via_group(rep, build_classical_generator(s.generator, n), rho0, s.t_max, s.cfg, fo);
    } else {
      StateFunction f;
      if (gk == "hamiltonian") {
        const Matrix a = matrix_from_json(cfgjson::need(s.generator, "matrix", "generator"), "generator.matrix");
        require(a.rows() == rep.dim() && is_hermitian(a), ErrorKind::Config, "generator.matrix: must be Hermitian of the system size");
        f = linear_function(a);
      } else {
        f = pullback(rep, build_classical_generator(s.generator, n));
      }
      if (s.solver == "density_direct") {
        tr = evolve_density_direct(f, rho0, s.t_max, s.cfg, fo);
      } else {
        const std::string gauge = cfgjson::string_or(s.extra, "gauge", "cocycle", "zero");
        require(gauge == "zero" || gauge == "block", ErrorKind::Config, "cocycle.gauge: expected \"zero\" or \"block\"");
        tr = evolve_cocycle(f, rho0, s.t_max, gauge == "zero" ? zero_gauge(rep.dim()) : block_gauge(f), s.cfg, fo)
                 .trajectory;
      }
    }
  }
  RunResult res;
  detail::ensure_dir(out);
  detail::emit_all(s, tr, out, res);
  res.summary = detail::trajectory_summary(s, tr);
  return res;
}

}  // namespace eqmflow

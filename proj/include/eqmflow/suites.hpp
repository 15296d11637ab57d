// suites.hpp - seeded property suites over the module invariants, plus the
// reference configurations they share with the command-line tool.

#pragma once

#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eqmflow/hartree_fock.hpp"
#include "eqmflow/meanfield.hpp"
#include "eqmflow/mixtures.hpp"
#include "eqmflow/random.hpp"

namespace eqmflow {

// ---------------------------------------------------------------------------
// Reference configurations

namespace presets {

/// Q = F_3^2 + F_1 F_2 F_3 / 2 on su(2).
inline ClassicalGenerator su2_cubic() {
  return ClassicalGenerator(3, {Monomial{1.0, {0, 0, 2}}, Monomial{0.5, {1, 1, 1}}});
}

inline ClassicalGenerator su2_f3_squared() { return ClassicalGenerator::power(3, 2, 2); }

/// Spin-1 random initial ray drawn from the given seed.
inline Vector spin1_ray(std::uint64_t seed = 42) { return Rng(seed).unit_vector(3); }

/// Spin-1/2 rays with F_3 = 0 and F_3 = 1/4. Under Q = F_3^2 the first is
/// fixed and the second precesses, so their distance changes.
inline std::pair<Vector, Vector> dichotomy_pair() {
  Vector x(2), y(2);
  x << std::sqrt(0.5), std::sqrt(0.5);
  y << std::cos(std::numbers::pi / 6.0), std::sin(std::numbers::pi / 6.0);
  return {x, y};
}

/// Random repulsive two-body interaction: positive, exchange symmetric.
inline TwoBodyOperator repulsive_interaction(Rng& rng, int d, double scale = 1.0) {
  const Matrix g = rng.matrix(d * d);
  Matrix v = g * g.adjoint() * (scale / (d * d));
  const Matrix p = exchange_operator(d);
  v = hermitian_part(0.5 * (v + p * v * p));
  return TwoBodyOperator(v);
}

struct HfProblem {
  Matrix h0;
  TwoBodyOperator v;
  int N;
};

inline HfProblem random_hf_problem(Rng& rng, int d, int N) {
  Matrix h0 = rng.hermitian(d);
  TwoBodyOperator v = repulsive_interaction(rng, d);
  return {h0, v, N};
}

/// Lowest N eigenvectors of h0.
inline SlaterState core_guess(const Matrix& h0, int N) {
  return SlaterState(Matrix(eigh_ascending(h0).vectors.leftCols(N)), 1e-9);
}

}  // namespace presets

// ---------------------------------------------------------------------------
// Reports

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool lower_bound = false;  // value must reach the threshold instead of staying under it
  bool passed = false;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }

  void add(const std::string& name, double value, double threshold, bool lower_bound = false,
           std::string note = "") {
    const bool ok = std::isfinite(value) && (lower_bound ? value >= threshold : value <= threshold);
    checks.push_back({name, value, threshold, lower_bound, ok, std::move(note)});
  }

  void add_failure(const std::string& name, double threshold, const std::string& why) {
    checks.push_back({name, std::numeric_limits<double>::infinity(), threshold, false, false, why});
  }

  std::string text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
      os << (c.passed ? "PASS " : "FAIL ") << suite << "." << c.name << " value=" << format_double(c.value)
         << (c.lower_bound ? " min=" : " max=") << format_double(c.threshold);
      if (!c.note.empty()) os << " (" << c.note << ")";
      os << "\n";
    }
    return os.str();
  }
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  int trials = 0;    // 0 picks the suite's default
  double dt = 1e-3;  // integration step of the flow-based checks
};

namespace detail {

inline int trials_or(const SuiteOptions& o, int fallback) { return o.trials > 0 ? o.trials : fallback; }

/// Runs body and records any library error as a failed check.
template <class Body>
void guarded(SuiteReport& r, const std::string& name, double threshold, Body&& body) {
  try {
    body();
  } catch (const Error& e) {
    r.add_failure(name, threshold, e.what());
  }
}

inline double max_dist(const std::vector<Vector>& a, const std::vector<Vector>& b, bool projective) {
  double w = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    w = std::max(w, projective ? fs_distance(a[i], b[i]) : (a[i] - b[i]).norm());
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// poisson

inline SuiteReport poisson_suite(const SuiteOptions& o) {
  SuiteReport r{"poisson", {}};
  Rng rng(o.seed);
  const int trials = detail::trials_or(o, 200);
  double anti = 0.0, bil = 0.0, leib = 0.0, jac = 0.0;
  auto quad = [&](int d) {
    return sum(linear_function(0.5 * rng.hermitian(d)),
               product(linear_function(0.5 * rng.hermitian(d)), linear_function(0.5 * rng.hermitian(d))));
  };
  detail::guarded(r, "bracket_axioms", 1e-6, [&] {
    for (int t = 0; t < trials; ++t) {
      const int d = rng.uniform_int(2, 5);
      const Matrix nu = rng.density(d);
      const StateFunction f = quad(d), h = quad(d), k = quad(d);
      const double a = rng.normal(), b = rng.normal();
      const double fh = poisson_bracket(f, h, nu), hf = poisson_bracket(h, f, nu), fk = poisson_bracket(f, k, nu);
      anti = std::max(anti, std::abs(fh + hf));
      bil = std::max(bil, std::abs(poisson_bracket(f, sum(scaled(a, h), scaled(b, k)), nu) - a * fh - b * fk));
      leib = std::max(leib, std::abs(poisson_bracket(f, product(h, k), nu) - fh * k.value(nu) - h.value(nu) * fk));
      const double j1 = poisson_bracket(f, bracket_function(h, k), nu);
      const double j2 = poisson_bracket(h, bracket_function(k, f), nu);
      const double j3 = poisson_bracket(k, bracket_function(f, h), nu);
      jac = std::max(jac, std::abs(j1 + j2 + j3));
    }
    r.add("antisymmetry", anti, 1e-10);
    r.add("bilinearity", bil, 1e-10);
    r.add("leibniz", leib, 1e-8);
    r.add("jacobi", jac, 1e-6);
  });

  // {h_Xj, h_Xk} = -h_X[j,k] on exact representations.
  for (double spin : {0.5, 1.0}) {
    const std::string name = "lie_bracket_spin" + std::string(spin == 0.5 ? "1/2" : "1");
    detail::guarded(r, name, 1e-12, [&] {
      const LieRepresentation rep = builtin_su2(spin);
      double worst = 0.0;
      for (int t = 0; t < std::max(1, trials / 10); ++t) {
        const Matrix nu = rng.density(rep.dim());
        const RealVector F = momentum_map(rep, nu);
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            const double lhs = poisson_bracket(linear_function(rep.generators[static_cast<std::size_t>(j)]),
                                               linear_function(rep.generators[static_cast<std::size_t>(k)]), nu);
            double rhs = 0.0;
            for (int l = 0; l < 3; ++l) rhs -= rep.algebra(j, k, l) * F(l);
            worst = std::max(worst, std::abs(lhs - rhs));
          }
      }
      r.add(name, worst, 1e-12);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// kahler

struct DichotomyResult {
  double linear_max_change = 0.0;     // over [0, 5]
  double nonlinear_max_change = 0.0;  // over [0, 1]
};

/// Distance changes of the documented ray pair under a linear generator and
/// under Q = F_3^2 on spin 1/2.
inline DichotomyResult fs_dichotomy(double dt) {
  const LieRepresentation rep = builtin_su2(0.5);
  const auto [x, y] = presets::dichotomy_pair();
  SolverConfig cfg;
  cfg.dt = dt;
  auto change = [&](const ClassicalGenerator& Q, double T) {
    const Trajectory a = solve_nls_direct(rep, Q, x, T, cfg);
    const Trajectory b = solve_nls_direct(rep, Q, y, T, cfg);
    const double d0 = fs_distance(x, y);
    double w = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) w = std::max(w, std::abs(fs_distance(a.pure[s], b.pure[s]) - d0));
    return w;
  };
  DichotomyResult out;
  out.linear_max_change = change(ClassicalGenerator::linear(RealVector{{0.7, -0.4, 1.1}}), 5.0);
  out.nonlinear_max_change = change(presets::su2_f3_squared(), 1.0);
  return out;
}

inline SuiteReport kahler_suite(const SuiteOptions& o) {
  SuiteReport r{"kahler", {}};
  Rng rng(o.seed);
  const int trials = detail::trials_or(o, 200);
  detail::guarded(r, "star_identity", 1e-10, [&] {
    double star = 0.0, chart = 0.0;
    for (int t = 0; t < trials; ++t) {
      const int d = rng.uniform_int(2, 5);
      const PureState x(rng.unit_vector(d));
      const Matrix a = rng.hermitian(d), b = rng.hermitian(d);
      star = std::max(star, star_identity_residual(a, b, x));
      const Matrix p = x.vec() * x.vec().adjoint();
      const KahlerValue k = kahler_forms(p, hamiltonian_vector(linear_function(a), p),
                                         hamiltonian_vector(linear_function(b), p));
      const KahlerValue c = kahler_forms_chart(x, chart_tangent_of_linear(a, x), chart_tangent_of_linear(b, x));
      chart = std::max(chart, std::abs(k.psi - c.psi));
    }
    r.add("star_identity", star, 1e-10);
    r.add("chart_consistency", chart, 1e-10);
  });
  detail::guarded(r, "fs_dichotomy", 1e-9, [&] {
    const DichotomyResult d = fs_dichotomy(o.dt);
    r.add("linear_fs_invariance", d.linear_max_change, 1e-9);
    r.add("nonlinear_fs_change", d.nonlinear_max_change, 1e-3, true);
  });
  return r;
}

// ---------------------------------------------------------------------------
// equivariance

inline ClassicalGenerator random_polynomial(Rng& rng, int n, int max_degree, int terms) {
  std::vector<Monomial> ms;
  for (int t = 0; t < terms; ++t) {
    Monomial m{rng.normal(), std::vector<int>(static_cast<std::size_t>(n), 0)};
    const int deg = rng.uniform_int(1, max_degree);
    for (int k = 0; k < deg; ++k) ++m.powers[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    ms.push_back(std::move(m));
  }
  return ClassicalGenerator(n, std::move(ms));
}

struct EquivarianceResiduals {
  double equivariance = 0.0;
  double pullback = 0.0;
};

inline EquivarianceResiduals equivariance_residuals(std::uint64_t seed, int trials) {
  Rng rng(seed);
  EquivarianceResiduals out;
  const std::vector<double> spins{0.5, 1.0, 1.5};
  for (int t = 0; t < trials; ++t) {
    const LieRepresentation rep = builtin_su2(spins[static_cast<std::size_t>(t) % spins.size()]);
    RealVector xi = rng.real_vector(3);
    xi *= rng.uniform(0.0, 2.0) / xi.norm();
    const Matrix nu = rng.density(rep.dim());
    const Matrix U = exp_hermitian_generator(rep.combination(xi), 1.0);
    const RealVector lhs = momentum_map(rep, Matrix(U * nu * U.adjoint()));
    const RealVector rhs = ad_star_exp(rep.algebra, xi, 1.0, momentum_map(rep, nu));
    out.equivariance = std::max(out.equivariance, (lhs - rhs).cwiseAbs().maxCoeff());

    const ClassicalGenerator q1 = random_polynomial(rng, 3, 3, 3), q2 = random_polynomial(rng, 3, 3, 3);
    const double b = poisson_bracket(pullback(rep, q1), pullback(rep, q2), nu);
    out.pullback = std::max(out.pullback, std::abs(b - berezin_bracket(rep.algebra, q1, q2, momentum_map(rep, nu))));
  }
  return out;
}

inline SuiteReport equivariance_suite(const SuiteOptions& o) {
  SuiteReport r{"equivariance", {}};
  detail::guarded(r, "equivariance", 1e-10, [&] {
    const EquivarianceResiduals e = equivariance_residuals(o.seed, detail::trials_or(o, 100));
    r.add("momentum_map_equivariance", e.equivariance, 1e-10);
    r.add("pullback_poisson_morphism", e.pullback, 1e-8);
  });
  detail::guarded(r, "classical_conservation", 1e-8, [&] {
    const LieRepresentation rep = builtin_su2(1.0);
    SolverConfig cfg;
    cfg.dt = o.dt;
    const double T = 5.0;
    const ClassicalTrajectory ct =
        classical_flow(rep.algebra, presets::su2_cubic(), momentum_map(rep, presets::spin1_ray(o.seed)), T, cfg);
    r.add("classical_Q_drift", ct.max_Q_drift(), 1e-8 * T);
    r.add("classical_casimir_drift", ct.max_casimir_drift(), 1e-8 * T);
  });
  return r;
}

// ---------------------------------------------------------------------------
// conservation

inline SuiteReport conservation_suite(const SuiteOptions& o) {
  SuiteReport r{"conservation", {}};
  SolverConfig cfg;
  cfg.dt = o.dt;
  detail::guarded(r, "illustration", 1e-9, [&] {
    const IllustrationResult ill = illustration_tangent_circles(1.0, Complex(1.0, 0.0), 2.0 * std::numbers::pi, 60, cfg);
    r.add("illustration_norm", ill.numeric_trajectory.max_norm_deviation(), 1e-9);
    r.add("illustration_energy_drift", ill.numeric_trajectory.max_Q_drift(), 1e-8);
  });
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const Vector x0 = presets::spin1_ray(o.seed);
  detail::guarded(r, "nls_direct", 1e-9, [&] {
    const Trajectory tr = solve_nls_direct(rep, Q, x0, 5.0, cfg);
    r.add("nls_direct_norm", tr.max_norm_deviation(), 1e-9);
    r.add("nls_direct_Q_drift", tr.max_Q_drift(), 1e-8);
  });
  detail::guarded(r, "nls_split", 1e-9, [&] {
    const Trajectory tr = solve_nls_split(rep, Q, x0, 5.0, cfg);
    r.add("nls_split_norm", tr.max_norm_deviation(), 1e-9);
    r.add("nls_split_Q_drift", tr.max_Q_drift(), 1e-8);
  });
  detail::guarded(r, "group_flow", 1e-8, [&] {
    Matrix rho0 = 0.7 * x0 * x0.adjoint();
    rho0 += 0.3 * Matrix::Identity(3, 3) / 3.0;
    const Trajectory tr = quantum_flow_via_group(rep, Q, rho0, 5.0, cfg);
    r.add("group_spectrum_drift", tr.max_spectrum_drift(), 1e-8);
    r.add("group_Q_drift", tr.max_Q_drift(), 1e-8);
  });
  detail::guarded(r, "density_direct", 1e-8, [&] {
    Matrix rho0 = 0.7 * x0 * x0.adjoint();
    rho0 += 0.3 * Matrix::Identity(3, 3) / 3.0;
    const Trajectory tr = evolve_density_direct(pullback(rep, Q), rho0, 5.0, cfg);
    r.add("density_spectrum_drift", tr.max_spectrum_drift(), 1e-8);
    r.add("density_Q_drift", tr.max_Q_drift(), 1e-8);
  });
  return r;
}

// ---------------------------------------------------------------------------
// hf

inline SuiteReport hf_suite(const SuiteOptions& o) {
  SuiteReport r{"hf", {}};
  Rng rng(o.seed);
  detail::guarded(r, "tdhf", 1e-6, [&] {
    const auto pr = presets::random_hf_problem(rng, 4, 2);
    const SlaterState s0 = SlaterState::from_columns(rng.matrix(4).leftCols(2));
    SolverConfig cfg;
    cfg.dt = o.dt;
    const double T = 2.0;
    const TdhfResult td = tdhf_evolve(pr.h0, pr.v, s0, T, cfg);
    r.add("tdhf_projector_defect", td.max_projector_defect, 1e-6);
    r.add("tdhf_energy_drift", td.max_energy_drift(), 1e-8);
  });
  const int trials = detail::trials_or(o, 20);
  double comm = 0.0, eq = 0.0, bound = -std::numeric_limits<double>::infinity();
  detail::guarded(r, "scf", 1e-8, [&] {
    for (int t = 0; t < trials; ++t) {
      const int d = rng.uniform_int(2, 5);
      const int N = rng.uniform_int(1, std::min(3, d));
      const auto pr = presets::random_hf_problem(rng, d, N);
      const ScfResult res = hf_scf(pr.h0, pr.v, N, presets::core_guess(pr.h0, N));
      comm = std::max(comm, res.commutator_residual);
      eq = std::max(eq, res.hf_equation_residual);
      bound = std::max(bound, exact_fermion_ground_energy(pr.h0, pr.v, N) - res.energy);
    }
    r.add("scf_commutator", comm, 1e-8);
    r.add("scf_hf_equation", eq, 1e-7);
    r.add("variational_bound_violation", bound, 1e-9);
  });
  return r;
}

// ---------------------------------------------------------------------------
// meanfield

inline MeanFieldProblem meanfield_reference_problem() {
  MeanFieldProblem p;
  p.site_rep = builtin_su2(0.5);
  p.Q = presets::su2_f3_squared();
  Vector plus(2);
  plus << std::sqrt(0.5), std::sqrt(0.5);
  p.rho0 = plus * plus.adjoint();
  return p;
}

inline SuiteReport meanfield_suite(const SuiteOptions& o) {
  SuiteReport r{"meanfield", {}};
  const MeanFieldProblem base = meanfield_reference_problem();
  detail::guarded(r, "trend", 0.0, [&] {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const MeanFieldScan scan = meanfield_error_scan(base, {2, 4, 6, 8, 10}, 1.0, 20, cfg);
    double worst_step = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < scan.max_error.size(); ++i)
      worst_step = std::max(worst_step, scan.max_error[i] - scan.max_error[i - 1]);
    r.add("error_strictly_decreasing", worst_step, 0.0, false, "largest increase between successive sizes");
    r.checks.back().passed = worst_step < 0.0;
    r.add("error_ratio_10_over_2", scan.max_error.back() / scan.max_error.front(), 1.0);
  });
  detail::guarded(r, "invariants", 1e-12, [&] {
    MeanFieldProblem p = base;
    p.sites = 4;
    const Matrix H = build_local_hamiltonian(p);
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(0.1 * k);
    const MeanFieldEvolution ev = exact_meanfield_evolve(p, times);
    const RealVector F0 = momentum_map(p.site_rep, ev.marginals.front());
    r.add("t0_momentum_map", (F0 - momentum_map(p.site_rep, p.rho0)).cwiseAbs().maxCoeff(), 1e-12);
    double drift = 0.0;
    for (double e : ev.energies) drift = std::max(drift, std::abs(e - ev.energies.front()));
    r.add("energy_drift", drift, 1e-8);
    Vector psi = Vector::Ones(1);
    const Vector plus = p.rho0.col(0) / p.rho0.col(0).norm();
    for (int s = 0; s < 4; ++s) psi = kron(psi, plus);
    const Vector pt = exp_hermitian_generator(H, 0.7) * psi;
    const Matrix m1 = site_marginal(pt, 2, 4, 1);
    double sym = 0.0;
    for (int k = 2; k <= 4; ++k) sym = std::max(sym, max_abs(site_marginal(pt, 2, 4, k) - m1));
    r.add("permutation_symmetry", sym, 1e-12);
  });
  return r;
}

// ---------------------------------------------------------------------------
// weinberg

/// Wirtinger derivative d/d(conj y) of a(x, y*) at y = x, by central differences.
inline Vector wirtinger_rhs(const WeinbergObservable& a, const Vector& x, double h = 1e-6) {
  Vector out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vector yp = x, ym = x, yi = x, yj = x;
    yp(k) += h;
    ym(k) -= h;
    yi(k) += kI * h;
    yj(k) -= kI * h;
    const Complex du = (a(x, yp) - a(x, ym)) / (2.0 * h);
    const Complex dv = (a(x, yi) - a(x, yj)) / (2.0 * h);
    out(k) = 0.5 * (du + kI * dv);
  }
  return out;
}

struct BridgeResiduals {
  double vectorwise = 0.0;
  double projective = 0.0;
};

inline BridgeResiduals weinberg_bridge_residuals(const LieRepresentation& rep, const ClassicalGenerator& Q,
                                                 const Vector& x0, double T, const SolverConfig& cfg) {
  const WeinbergBridge br = weinberg_gauge_bridge(rep, Q, x0, T, cfg);
  const Trajectory direct = solve_nls_direct(rep, Q, x0, T, cfg);
  return {detail::max_dist(br.mapped, direct.pure, false), detail::max_dist(br.weinberg.pure, direct.pure, true)};
}

inline SuiteReport weinberg_suite(const SuiteOptions& o) {
  SuiteReport r{"weinberg", {}};
  Rng rng(o.seed);
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const WeinbergObservable a = weinberg_observable(rep, Q);
  detail::guarded(r, "homogeneity", 1e-9, [&] {
    double hom = 0.0, fd = 0.0;
    for (int t = 0; t < detail::trials_or(o, 50); ++t) {
      const Vector x = rng.unit_vector(3);
      const Vector y = x + 0.1 * rng.vector(3);
      const Complex c(rng.normal(), rng.normal());
      hom = std::max(hom, homogeneity_defect(a, x, y, c));
      fd = std::max(fd, (wirtinger_rhs(a, x) - weinberg_rhs(rep, Q, x)).norm());
    }
    r.add("homogeneity", hom, 1e-9);
    r.add("rhs_vs_wirtinger", fd, 1e-6);
  });
  detail::guarded(r, "bridge", 1e-7, [&] {
    SolverConfig cfg;
    cfg.dt = o.dt;
    const BridgeResiduals b = weinberg_bridge_residuals(rep, Q, presets::spin1_ray(o.seed), 5.0, cfg);
    r.add("bridge_vectorwise", b.vectorwise, 1e-7);
    r.add("bridge_projective", b.projective, 1e-8);
  });
  return r;
}

// ---------------------------------------------------------------------------
// mixtures

struct DivergenceDerivative {
  double delta_frobenius = 0.0;
  double delta_trace_norm = 0.0;
  double numeric_rate = 0.0;  // Richardson-extrapolated d/dt at 0
};

/// Initial divergence rate of the step-function fixture under the grid NLS.
inline DivergenceDerivative fixture_divergence_rate(double eps = 1.0, double alpha = 1.0, double h = 1e-4) {
  const std::vector<Vector> psis = divergence_fixture();
  const std::vector<double> w{0.5, 0.5};
  const Matrix delta = delta_at_zero(psis, w, eps, alpha);
  const GenuineMixture mu = GenuineMixture::of_pure(w, psis);
  const StateFunction f =
      nls_grid_functional(discrete_laplacian_hamiltonian(64, 1.0), eps, GridNonlinearity::power(alpha));
  SolverConfig cfg;
  cfg.dt = h / 10.0;
  const double d1 = mixture_divergence(mu, f, h, cfg);
  const double d2 = mixture_divergence(mu, f, 2.0 * h, cfg);
  // delta is anti-Hermitian; i*delta carries the same singular values.
  return {delta.norm(), trace_norm_hermitian(Matrix(kI * delta)), 2.0 * d1 / h - d2 / (2.0 * h)};
}

inline SuiteReport mixtures_suite(const SuiteOptions& o) {
  SuiteReport r{"mixtures", {}};
  Rng rng(o.seed);
  const int trials = detail::trials_or(o, 100);
  detail::guarded(r, "affine", 1e-12, [&] {
    double aff = 0.0, norm = 0.0, add = 0.0;
    const LieRepresentation rep = builtin_su2(1.0);
    for (int t = 0; t < trials; ++t) {
      const int m = rng.uniform_int(1, 4);
      std::vector<GenuineMixture::Component> comps;
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        comps.push_back({rng.uniform(0.1, 1.0), rng.density(3)});
        total += comps.back().weight;
      }
      for (auto& c : comps) c.weight /= total;
      const GenuineMixture mu(comps);
      const Matrix a = rng.hermitian(3);
      aff = std::max(aff, std::abs(mixture_expectation(mu, linear_function(a)) - trace_product_real(barycenter(mu), a)));
      const ObservableField Y = constant_field(rng.hermitian(3));
      const QuantumDeviation id = identity_deviation();
      norm = std::max(norm, std::abs(outcome_probability(Y, mu, id, rep, Interval::whole_line()) - 1.0));
      const double c = rng.normal();
      const double lo = outcome_probability(Y, mu, id, rep, {-std::numeric_limits<double>::infinity(), c, true, false});
      const double hi = outcome_probability(Y, mu, id, rep, {c, std::numeric_limits<double>::infinity(), true, true});
      add = std::max(add, std::abs(lo + hi - 1.0));
    }
    r.add("affine_compatibility", aff, 1e-12);
    r.add("probability_normalization", norm, 1e-10);
    r.add("probability_additivity", add, 1e-10);
  });
  detail::guarded(r, "linear_commutation", 1e-8, [&] {
    const Matrix a = rng.hermitian(3);
    const GenuineMixture mu = GenuineMixture::of_pure({0.3, 0.7}, {rng.unit_vector(3), rng.unit_vector(3)});
    SolverConfig cfg;
    cfg.dt = o.dt;
    r.add("linear_commutation", mixture_divergence_series(mu, linear_function(a), 5.0, cfg).max(), 1e-8);
  });
  detail::guarded(r, "fixture", 1e-6, [&] {
    const DivergenceDerivative dd = fixture_divergence_rate();
    r.add("delta_nonzero", dd.delta_frobenius, 1e-3, true);
    r.add("rate_vs_delta", std::abs(dd.numeric_rate - dd.delta_trace_norm), 1e-6);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const GenuineMixture mu = GenuineMixture::of_pure({0.5, 0.5}, divergence_fixture());
    const StateFunction f =
        nls_grid_functional(discrete_laplacian_hamiltonian(64, 1.0), 1.0, GridNonlinearity::power(1.0));
    const double t = 1e-2;
    r.add("divergence_lower_bound", mixture_divergence(mu, f, t, cfg) - 0.5 * dd.delta_trace_norm * t, 0.0, true);
    const StateFunction f0 =
        nls_grid_functional(discrete_laplacian_hamiltonian(64, 1.0), 0.0, GridNonlinearity::power(1.0));
    SolverConfig c0;
    c0.dt = 1e-2;
    r.add("linear_grid_divergence", mixture_divergence_series(mu, f0, 1.0, c0).max(), 1e-8);
  });
  return r;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"poisson", "kahler",  "equivariance", "conservation",
                                              "hf",      "meanfield", "weinberg",   "mixtures"};
  return names;
}

inline SuiteReport property_suite(const std::string& name, const SuiteOptions& o) {
  if (name == "poisson") return poisson_suite(o);
  if (name == "kahler") return kahler_suite(o);
  if (name == "equivariance") return equivariance_suite(o);
  if (name == "conservation") return conservation_suite(o);
  if (name == "hf") return hf_suite(o);
  if (name == "meanfield") return meanfield_suite(o);
  if (name == "weinberg") return weinberg_suite(o);
  if (name == "mixtures") return mixtures_suite(o);
  fail(ErrorKind::Config, "unknown suite \"" + name + "\"");
}

}  // namespace eqmflow

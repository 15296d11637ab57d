#include <gtest/gtest.h>

#include <numbers>

#include "eqmflow/eqmflow.hpp"
#include "support/expect_error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace eqmflow;

namespace {

SolverConfig step(double dt) {
  SolverConfig c;
  c.dt = dt;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear limits against exact propagation

TEST(LinearFlows, PureAndDensitySolversMatchExactPropagation) {
  gen::for_all(400, 8, [](Rng& rng, int) {
    const int d = gen::dim(rng, 2, 4);
    const Matrix H = rng.hermitian(d);
    const Vector x0 = rng.unit_vector(d);
    const Matrix rho0 = rng.density(d);
    const double T = 1.5;
    const Trajectory pure = evolve_pure([&H](double, const Vector&) { return H; }, x0, T, step(1e-3));
    EXPECT_LT((pure.pure.back() - oracle::exact_propagate(H, x0, T)).norm(), 1e-10);
    const Trajectory dens = evolve_density_direct(linear_function(H), rho0, T, step(1e-3));
    const Matrix U = exp_hermitian_generator(H, T);
    EXPECT_LT(max_abs(dens.density.back() - U * rho0 * U.adjoint()), 1e-10);
    const Trajectory exact = evolve_linear_exact(H, x0, {0.0, T});
    EXPECT_LT((exact.pure.back() - oracle::exact_propagate(H, x0, T)).norm(), 1e-12);
  });
}

// ---------------------------------------------------------------------------
// Nonlinear Schroedinger equation

TEST(Nls, DirectAndSplitAgreeAndConserve) {
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const Vector x0 = presets::spin1_ray(42);
  const Trajectory a = solve_nls_direct(rep, Q, x0, 2.0, step(1e-3));
  const Trajectory b = solve_nls_split(rep, Q, x0, 2.0, step(1e-3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_LT(fs_distance(a.pure[s], b.pure[s]), 1e-7);
  EXPECT_LT(a.max_norm_deviation(), 1e-9);
  EXPECT_LT(b.max_Q_drift(), 1e-8);
}

TEST(Nls, SplitErrorIsFourthOrderAboveRoundoff) {
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const Vector x0 = presets::spin1_ray(42);
  auto gap = [&](double dt) {
    const Trajectory a = solve_nls_direct(rep, Q, x0, 5.0, step(dt));
    const Trajectory b = solve_nls_split(rep, Q, x0, 5.0, step(dt), 1.0);
    double w = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) w = std::max(w, fs_distance(a.pure[s], b.pure[s]));
    return w;
  };
  const double r = gap(0.05) / gap(0.025);
  EXPECT_GT(r, 12.0);
  EXPECT_LT(r, 20.0);
}

TEST(Nls, SplitConsistencyGuardTrips) {
  const LieRepresentation rep = builtin_su2(1.0);
  EXPECT_ERROR_KIND(solve_nls_split(rep, presets::su2_cubic(), presets::spin1_ray(42), 1.0, step(0.05), 1e-14),
                    ErrorKind::Numerical);
}

TEST(Nls, CorruptedStepReportsNormDrift) {
  const LieRepresentation rep = builtin_su2(1.0);
  EXPECT_ERROR_KIND(solve_nls_direct(rep, presets::su2_cubic(), presets::spin1_ray(42), 5.0, step(0.5)),
                    ErrorKind::Numerical);
  SolverConfig bad = step(0.5);
  EXPECT_ERROR_KIND(bad.validate(), ErrorKind::Config);
}

TEST(Nls, RejectsBadInputs) {
  const LieRepresentation rep = builtin_su2(1.0);
  EXPECT_ERROR_KIND(solve_nls_direct(rep, presets::su2_cubic(), Vector(Vector::Ones(3)), 1.0, step(1e-2)),
                    ErrorKind::Normalization);
  EXPECT_ERROR_KIND(solve_nls_direct(rep, presets::su2_cubic(), Vector(Vector::Ones(2) / std::sqrt(2.0)), 1.0, step(1e-2)),
                    ErrorKind::Shape);
}

TEST(Nls, FixedPointsOfTheSpinHalfSquare) {
  // Q = F_3^2 on spin 1/2: a state with F_3 = 0 does not move.
  const LieRepresentation rep = builtin_su2(0.5);
  const auto [x, y] = presets::dichotomy_pair();
  const Trajectory tr = solve_nls_direct(rep, presets::su2_f3_squared(), x, 3.0, step(1e-3));
  EXPECT_LT(fs_distance(tr.pure.front(), tr.pure.back()), 1e-12);
  const Trajectory ty = solve_nls_direct(rep, presets::su2_f3_squared(), y, 1.0, step(1e-3));
  EXPECT_NEAR(fs_distance(tr.pure[1000], ty.pure.back()), oracle::dichotomy_distance(1.0), 1e-10);
}

// ---------------------------------------------------------------------------
// Density flows and group propagators

TEST(DensityFlows, GroupAndDirectAgreeAndPreserveSpectrum) {
  gen::for_all(401, 4, [](Rng& rng, int) {
    const LieRepresentation rep = builtin_su2(1.0);
    const Matrix rho0 = rng.density(3);
    const Trajectory g = quantum_flow_via_group(rep, presets::su2_cubic(), rho0, 2.0, step(1e-3));
    const Trajectory d = evolve_density_direct(pullback(rep, presets::su2_cubic()), rho0, 2.0, step(1e-3));
    EXPECT_LT(max_abs(g.density.back() - d.density.back()), 1e-9);
    EXPECT_LT(g.max_spectrum_drift(), 1e-8);
    EXPECT_LT(d.max_spectrum_drift(), 1e-8);
    EXPECT_LT(g.max_Q_drift(), 1e-8);
  });
}

TEST(DensityFlows, PureStatesFollowTheNls) {
  const LieRepresentation rep = builtin_su2(1.0);
  const Vector x0 = presets::spin1_ray(42);
  const Trajectory g = quantum_flow_via_group(rep, presets::su2_cubic(), Matrix(x0 * x0.adjoint()), 2.0, step(1e-3));
  const Trajectory n = solve_nls_direct(rep, presets::su2_cubic(), x0, 2.0, step(1e-3));
  const Vector& x = n.pure.back();
  EXPECT_LT(max_abs(g.density.back() - x * x.adjoint()), 1e-9);
}

TEST(Cocycle, StateTrajectoryIsGaugeIndependent) {
  const LieRepresentation rep = builtin_su2(1.0);
  Rng rng(8);
  const Matrix rho0 = rng.density(3);
  const StateFunction f = pullback(rep, presets::su2_cubic());
  const CocycleResult z = evolve_cocycle(f, rho0, 1.0, zero_gauge(3), step(1e-3));
  const CocycleResult b = evolve_cocycle(f, rho0, 1.0, block_gauge(f), step(1e-3));
  const Trajectory d = evolve_density_direct(f, rho0, 1.0, step(1e-3));
  EXPECT_LT(max_abs(z.trajectory.density.back() - d.density.back()), 1e-9);
  EXPECT_LT(max_abs(b.trajectory.density.back() - d.density.back()), 1e-9);
  // The propagators differ by a unitary that commutes with rho0.
  const Matrix w = z.propagators.back().adjoint() * b.propagators.back();
  EXPECT_LT(commutator(w, rho0).norm(), 1e-8);
}

TEST(Cocycle, NonCommutingGaugeIsRejected) {
  Rng rng(9);
  const Matrix rho0 = rng.density(3), junk = rng.hermitian(3);
  const GaugeFunction g{[junk](const Matrix&) { return junk; }, "junk"};
  EXPECT_ERROR_KIND(evolve_cocycle(linear_function(rng.hermitian(3)), rho0, 0.1, g, step(1e-2)), ErrorKind::Invariant);
}

TEST(Heisenberg, TransportMatchesSchroedingerPicture) {
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  Rng rng(10);
  const Matrix rho = rng.density(3), a = rng.hermitian(3);
  const ObservableField field{[a](const RealVector& F) { return Matrix(F(0) * a); }, "F1*a"};
  const SolverConfig cfg = step(1e-3);
  const Matrix rt = quantum_flow_via_group(rep, Q, rho, 1.2, cfg).density.back();
  const double lhs = trace_product_real(rt, field(momentum_map(rep, rt)));
  const double rhs = trace_product_real(rho, heisenberg_transport(rep, Q, field, 1.2, momentum_map(rep, rho), cfg));
  EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(Heisenberg, BackwardPropagationInvertsForward) {
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const RealVector F0 = momentum_map(rep, presets::spin1_ray(3));
  const Propagation fwd = propagate_cocycle(rep, Q, F0, 0.8, 1e-3);
  const Propagation back = propagate_cocycle(rep, Q, fwd.F_end, -0.8, 1e-3);
  EXPECT_LT((back.F_end - F0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(max_abs(back.u * fwd.u - Matrix::Identity(3, 3)), 1e-11);
}

// ---------------------------------------------------------------------------
// Coherent-state orbit

TEST(Restricted, VacuumProjectorHamiltonianIsGaussian) {
  const LieRepresentation rep = builtin_wh_fock(1, 40, 1.0);
  const Vector vac = fock_vacuum(rep);
  Matrix H = Matrix::Zero(rep.dim(), rep.dim());
  H(0, 0) = 1.0;
  const RestrictedProjection rp(rep, H, vac * vac.adjoint());
  const RealVector x{{0.7, -0.4}};
  EXPECT_NEAR(rp.hamiltonian(x), std::exp(-0.5 * x.squaredNorm()), 1e-12);
  const RealVector g = rp.gradient(x);
  EXPECT_LT((g + std::exp(-0.5 * x.squaredNorm()) * x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Restricted, RejectsUncenteredReference) {
  const LieRepresentation rep = builtin_wh_fock(1, 30, 1.0);
  const Vector psi = WeylDisplacer(rep).apply(RealVector{{0.5, 0.0}}, fock_vacuum(rep));
  EXPECT_ERROR_KIND(RestrictedProjection(rep, Matrix(Matrix::Identity(30, 30)), Matrix(psi * psi.adjoint())),
                    ErrorKind::Domain);
  EXPECT_ERROR_KIND(RestrictedProjection(builtin_su2(1.0), Matrix(Matrix::Identity(3, 3)), Matrix(Matrix::Identity(3, 3) / 3.0)),
                    ErrorKind::Domain);
}

TEST(Illustration, TangentCirclesMatchClosedForms) {
  const double alpha = 1.0;
  const Complex z0(1.0, 0.0);
  const IllustrationResult r = illustration_tangent_circles(alpha, z0, 2.0 * std::numbers::pi, 60, step(1e-3));
  double numeric = 0.0, restricted = 0.0;
  for (std::size_t s = 0; s < r.times.size(); ++s) {
    numeric = std::max(numeric, std::abs(r.numeric[s] - oracle::tangent_circle_true(alpha, z0, r.times[s])));
    restricted = std::max(restricted, std::abs(r.restricted_numeric[s] - oracle::tangent_circle_restricted(alpha, z0, r.times[s])));
  }
  EXPECT_LT(numeric, 1e-6);
  EXPECT_LT(restricted, 1e-8);
  // The two circles touch at t = 0.
  EXPECT_LT(std::abs(r.numeric.front() - r.restricted_numeric.front()), 1e-12);
}

TEST(Illustration, OtherParametersAndTruncationGuard) {
  const Complex z0(0.5, -0.8);
  const IllustrationResult r = illustration_tangent_circles(2.0, z0, 1.0, 50, step(1e-3));
  EXPECT_LT(std::abs(r.numeric.back() - oracle::tangent_circle_true(2.0, z0, 1.0)), 1e-8);
  EXPECT_LT(std::abs(r.restricted_numeric.back() - oracle::tangent_circle_restricted(2.0, z0, 1.0)), 1e-9);
  EXPECT_ERROR_KIND(illustration_tangent_circles(1.0, Complex(4.0, 0.0), 1.0, 10, step(1e-2)), ErrorKind::Numerical);
}

TEST(Illustration, CoherentTailMatchesDirectSum) {
  double direct = 0.0, term = std::exp(-2.0);
  for (int k = 0; k < 200; ++k) {
    if (k >= 12) direct += term;
    term *= 2.0 / (k + 1);
  }
  EXPECT_NEAR(coherent_tail(2.0, 12), direct, 1e-15);
}

TEST(Ehrenfest, HarmonicOscillatorSatisfiesTheRelations) {
  const LieRepresentation rep = builtin_wh_fock(1, 50, 1.0);
  const std::vector<double> masses{1.0};
  const Matrix H = wh_hamiltonian(rep, masses, {[](double q) { return 0.5 * q * q; }});
  const Vector psi0 = WeylDisplacer(rep).apply(RealVector{{1.0, 0.5}}, fock_vacuum(rep));
  SolverConfig cfg = step(1e-3);
  cfg.sample_stride = 10;
  const Trajectory tr = evolve_pure([&H](double, const Vector&) { return H; }, psi0, 2.0, cfg);
  const EhrenfestReport e = ehrenfest_residual(rep, tr, masses, {[](double q) { return q; }});
  EXPECT_LT(e.max_r1, 1e-4);
  EXPECT_LT(e.max_r2, 1e-4);
  EXPECT_LT(e.max_gap, 1e-8);  // linear force: no quantum correction
}

TEST(Ehrenfest, SmearedPotentialBothWays) {
  const LieRepresentation rep = builtin_wh_fock(1, 40, 1.0);
  const Vector vac = fock_vacuum(rep);
  const auto V = [](double q) { return q * q * q * q; };
  for (double q : {-0.5, 0.0, 0.7})
    EXPECT_NEAR(smeared_potential_displaced(rep, vac * vac.adjoint(), V, q),
                smeared_potential_shifted(rep, vac * vac.adjoint(), V, q), 1e-8);
}

// ---------------------------------------------------------------------------
// Homogeneous observables

TEST(Weinberg, HomogeneityAndWirtingerDerivative) {
  const LieRepresentation rep = builtin_su2(1.0);
  const ClassicalGenerator Q = presets::su2_cubic();
  const WeinbergObservable a = weinberg_observable(rep, Q);
  gen::for_all(402, 20, [&](Rng& rng, int) {
    const Vector x = rng.unit_vector(3);
    const Vector y = x + 0.1 * rng.vector(3);
    EXPECT_LT(homogeneity_defect(a, x, y, Complex(rng.normal(), rng.normal())), 1e-9);
    EXPECT_LT((wirtinger_rhs(a, x) - weinberg_rhs(rep, Q, x)).norm(), 1e-6);
  });
}

TEST(Weinberg, NonHomogeneousObservableIsRejected) {
  const WeinbergObservable sq{[](const Vector& x, const Vector& y) { return y.dot(x) * y.dot(x); }, "square"};
  Rng rng(1);
  EXPECT_ERROR_KIND(check_homogeneity(sq, rng.unit_vector(3)), ErrorKind::Domain);
}

TEST(Weinberg, PhaseCorrectedSolutionSolvesTheNls) {
  const BridgeResiduals b =
      weinberg_bridge_residuals(builtin_su2(1.0), presets::su2_cubic(), presets::spin1_ray(42), 2.0, step(1e-3));
  EXPECT_LT(b.vectorwise, 1e-7);
  EXPECT_LT(b.projective, 1e-8);
}

// ---------------------------------------------------------------------------
// Grid NLS

TEST(GridNls, ConservesNormAndEnergy) {
  const int n = 32;
  const Matrix H0 = discrete_laplacian_hamiltonian(n, 0.5);
  Vector psi(n);
  for (int k = 0; k < n; ++k) psi(k) = std::exp(-0.05 * (k - 16.0) * (k - 16.0)) * std::exp(kI * (0.4 * k));
  psi /= psi.norm();
  const Trajectory tr = nls_grid_evolve(H0, 1.0, GridNonlinearity::power(1.0), psi, 2.0, step(1e-3));
  EXPECT_LT(tr.max_norm_deviation(), 1e-9);
  EXPECT_LT(tr.max_Q_drift(), 1e-8);
}

TEST(GridNls, FunctionalGradientAndPureStateEnergy) {
  Rng rng(4);
  const int n = 6;
  const Matrix H0 = discrete_laplacian_hamiltonian(n, 1.0);
  const StateFunction f = nls_grid_functional(H0, 0.7, GridNonlinearity::power(1.5));
  const Matrix rho = rng.density(n);
  EXPECT_LT(max_abs(gradient(f, rho) - oracle::fd_gradient([&](const Matrix& m) { return f.value(m); }, rho)), 1e-7);
  const Vector psi = rng.unit_vector(n);
  EXPECT_NEAR(f.value(Matrix(psi * psi.adjoint())), nls_energy(H0, 0.7, GridNonlinearity::power(1.5), psi), 1e-13);
}

TEST(GridNls, ConfigurationErrors) {
  EXPECT_ERROR_KIND(GridNonlinearity::power(-1.0), ErrorKind::Config);
  EXPECT_ERROR_KIND(discrete_laplacian_hamiltonian(1, 1.0), ErrorKind::Config);
}

#include <gtest/gtest.h>

#include "eqmflow/eqmflow.hpp"
#include "support/expect_error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace eqmflow;

TEST(Gradient, AnalyticMatchesFiniteDifferenceOracle) {
  gen::for_all(101, 25, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Matrix nu = rng.density(d);
    const StateFunction f = gen::quadratic(rng, d);
    const Matrix g = gradient(f, nu);
    const Matrix fd = oracle::fd_gradient([&](const Matrix& m) { return f.value(m); }, nu);
    EXPECT_LT(max_abs(g - fd), 1e-8);
  });
}

TEST(Gradient, FiniteDifferenceFallbackMatchesAnalytic) {
  Rng rng(3);
  const Matrix a = rng.hermitian(3), nu = rng.density(3);
  const StateFunction f = custom_function([a](const Matrix& m) {
    const double t = trace_product_real(m, a);
    return t * t * t;
  });
  const double t = trace_product_real(nu, a);
  EXPECT_LT(max_abs(gradient(f, nu) - 3.0 * t * t * a), 1e-8);
}

TEST(Bracket, MatchesOracleAndAxioms) {
  gen::for_all(202, 40, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Matrix nu = rng.density(d);
    const StateFunction f = gen::quadratic(rng, d), h = gen::quadratic(rng, d), k = gen::quadratic(rng, d);
    const double fh = poisson_bracket(f, h, nu);
    EXPECT_NEAR(fh, oracle::fd_bracket([&](const Matrix& m) { return f.value(m); },
                                       [&](const Matrix& m) { return h.value(m); }, nu),
                1e-7);
    EXPECT_LE(std::abs(fh + poisson_bracket(h, f, nu)), 1e-10);
    EXPECT_LE(std::abs(poisson_bracket(f, product(h, k), nu) - fh * k.value(nu) - h.value(nu) * poisson_bracket(f, k, nu)),
              1e-8);
    const double jac = poisson_bracket(f, bracket_function(h, k), nu) + poisson_bracket(h, bracket_function(k, f), nu) +
                       poisson_bracket(k, bracket_function(f, h), nu);
    EXPECT_LE(std::abs(jac), 1e-6);
  });
}

TEST(Bracket, LinearFunctionsFollowTheCommutator) {
  // {h_a, h_b} = h_{i[a, b]}
  gen::for_all(5, 20, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Matrix a = rng.hermitian(d), b = rng.hermitian(d), nu = rng.density(d);
    const double lhs = poisson_bracket(linear_function(a), linear_function(b), nu);
    EXPECT_NEAR(lhs, trace_product_real(nu, Matrix(kI * commutator(a, b))), 1e-12);
  });
}

TEST(Tangent, HamiltonianVectorIsTracelessAndOffBlock) {
  Rng rng(12);
  const Matrix nu = rng.density(4);
  const TangentVector v = hamiltonian_vector(linear_function(rng.hermitian(4)), nu);
  EXPECT_LT(std::abs(v.value.trace()), 1e-12);
  EXPECT_LT(block_projection(spectral_decomposition(nu), v.value).norm(), 1e-10);
  EXPECT_ERROR_KIND(make_tangent(nu, nu - Matrix::Identity(4, 4) / 4.0), ErrorKind::Domain);
}

TEST(Tangent, DirectionalDerivativeIsTheBracket) {
  gen::for_all(9, 15, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Matrix nu = rng.density(d);
    const StateFunction f = gen::quadratic(rng, d), h = gen::quadratic(rng, d);
    // h changes along the flow of f at the rate {f, h}.
    EXPECT_NEAR(directional_derivative(h, hamiltonian_vector(f, nu)), poisson_bracket(f, h, nu), 1e-10);
  });
}

TEST(Kahler, StarIdentityAndChartAgreement) {
  gen::for_all(42, 200, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const PureState x(rng.unit_vector(d));
    const Matrix a = rng.hermitian(d), b = rng.hermitian(d);
    EXPECT_LE(star_identity_residual(a, b, x), 1e-10);
    const Matrix p = x.vec() * x.vec().adjoint();
    const KahlerValue k = kahler_forms(p, hamiltonian_vector(linear_function(a), p), hamiltonian_vector(linear_function(b), p));
    const KahlerValue c = kahler_forms_chart(x, chart_tangent_of_linear(a, x), chart_tangent_of_linear(b, x));
    const KahlerValue g = kahler_forms_generators(x, a, b);
    EXPECT_LE(std::abs(k.psi - c.psi), 1e-10);
    EXPECT_LE(std::abs(k.psi - g.psi), 1e-10);
  });
}

TEST(Kahler, SymplecticFormIsTheBracket) {
  // Omega(v_a, v_b) equals the Poisson bracket of the linear functions up to sign.
  gen::for_all(14, 20, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const PureState x(rng.unit_vector(d));
    const Matrix a = rng.hermitian(d), b = rng.hermitian(d), p = x.vec() * x.vec().adjoint();
    const KahlerValue k = kahler_forms(p, hamiltonian_vector(linear_function(a), p), hamiltonian_vector(linear_function(b), p));
    EXPECT_NEAR(std::abs(k.omega), std::abs(poisson_bracket(linear_function(a), linear_function(b), p)), 1e-10);
  });
}

TEST(FubiniStudy, MetricProperties) {
  gen::for_all(77, 50, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Vector x = rng.unit_vector(d), y = rng.unit_vector(d), z = rng.unit_vector(d);
    const Complex phase = std::exp(kI * rng.uniform(0.0, 6.0));
    EXPECT_NEAR(fs_distance(x, y), fs_distance(y, x), 1e-14);
    EXPECT_NEAR(fs_distance(x, Vector(phase * x)), 0.0, 1e-14);
    EXPECT_LE(fs_distance(x, z), fs_distance(x, y) + fs_distance(y, z) + 1e-14);
    EXPECT_LE(fs_distance(x, y), std::sqrt(2.0) * std::numbers::pi / 2.0 + 1e-14);
  });
}

TEST(FubiniStudy, ResolvesNearbyRays) {
  Vector x(2), y(2);
  x << 1.0, 0.0;
  y << std::cos(1e-9), std::sin(1e-9);
  EXPECT_NEAR(fs_distance(x, y), std::sqrt(2.0) * 1e-9, 1e-20);
}

TEST(Stationarity, EigenvectorsOfLinearGeneratorsAreStationary) {
  Rng rng(6);
  const Matrix a = rng.hermitian(3);
  const EigenSystem es = eigh_ordered(a);
  EXPECT_TRUE(is_stationary(linear_function(a), PureState(es.vectors.col(0)), 1e-10));
  EXPECT_FALSE(is_stationary(linear_function(a), PureState(rng.unit_vector(3)), 1e-6));
}

#include <gtest/gtest.h>

#include <limits>

#include "eqmflow/eqmflow.hpp"
#include "support/expect_error.hpp"
#include "support/generators.hpp"

using namespace eqmflow;

namespace {

GenuineMixture random_mixture(Rng& rng, int d, int m) {
  std::vector<GenuineMixture::Component> comps;
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    comps.push_back({rng.uniform(0.1, 1.0), rng.density(d)});
    total += comps.back().weight;
  }
  for (auto& c : comps) c.weight /= total;
  return GenuineMixture(comps);
}

// Rate of change of rho under rho' = -i[G(rho), rho] with the grid
// nonlinearity K'(s) = s written out by hand.
Matrix grid_rate(const Matrix& H0, double eps, const Matrix& rho) {
  Matrix g = H0;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) g(k, k) += eps * rho(k, k).real();
  return -kI * (g * rho - rho * g);
}

}  // namespace

TEST(GenuineMixture, ValidatesWeightsAndComponents) {
  Rng rng(1);
  const Matrix a = rng.density(2), b = rng.density(2), c = rng.density(3);
  EXPECT_ERROR_KIND(GenuineMixture({{0.5, a}, {0.4, b}}), ErrorKind::Normalization);
  EXPECT_ERROR_KIND(GenuineMixture({{1.2, a}, {-0.2, b}}), ErrorKind::Domain);
  EXPECT_ERROR_KIND(GenuineMixture({{0.5, a}, {0.5, c}}), ErrorKind::Shape);
  EXPECT_ERROR_KIND(GenuineMixture(std::vector<GenuineMixture::Component>{}), ErrorKind::Domain);
  Matrix bad = a;
  bad(0, 0) += 0.3;
  EXPECT_ERROR_KIND(GenuineMixture({{1.0, bad}}), ErrorKind::Normalization);
}

TEST(GenuineMixture, LinearExpectationsSeeOnlyTheBarycenter) {
  gen::for_all(500, 50, [](Rng& rng, int) {
    const int d = gen::dim(rng, 2, 4);
    const GenuineMixture mu = random_mixture(rng, d, rng.uniform_int(1, 4));
    const Matrix a = rng.hermitian(d);
    EXPECT_NEAR(mixture_expectation(mu, linear_function(a)), trace_product_real(barycenter(mu), a), 1e-12);
    EXPECT_NEAR(barycenter(mu).trace().real(), 1.0, 1e-12);
  });
}

TEST(GenuineMixture, NonlinearExpectationsDistinguishMixturesWithTheSameBarycenter) {
  // Two decompositions of the maximally mixed qubit.
  Vector up(2), down(2), plus(2), minus(2);
  up << 1.0, 0.0;
  down << 0.0, 1.0;
  plus << std::sqrt(0.5), std::sqrt(0.5);
  minus << std::sqrt(0.5), -std::sqrt(0.5);
  const GenuineMixture z = GenuineMixture::of_pure({0.5, 0.5}, {up, down});
  const GenuineMixture x = GenuineMixture::of_pure({0.5, 0.5}, {plus, minus});
  EXPECT_LT(max_abs(barycenter(z) - barycenter(x)), 1e-15);
  Matrix s3 = Matrix::Zero(2, 2);
  s3(0, 0) = 1.0;
  s3(1, 1) = -1.0;
  const StateFunction sq = product(linear_function(s3), linear_function(s3));
  EXPECT_NEAR(mixture_expectation(z, sq), 1.0, 1e-15);
  EXPECT_NEAR(mixture_expectation(x, sq), 0.0, 1e-15);
}

TEST(OutcomeProbability, NormalizedAndAdditive) {
  const LieRepresentation rep = builtin_su2(1.0);
  gen::for_all(501, 40, [&](Rng& rng, int) {
    const GenuineMixture mu = random_mixture(rng, 3, rng.uniform_int(1, 3));
    const Matrix y = rng.hermitian(3);
    const ObservableField Y = constant_field(y);
    const QuantumDeviation id = identity_deviation();
    EXPECT_NEAR(outcome_probability(Y, mu, id, rep, Interval::whole_line()), 1.0, 1e-10);
    const double c = rng.normal();
    const double inf = std::numeric_limits<double>::infinity();
    const double lo = outcome_probability(Y, mu, id, rep, {-inf, c, true, false});
    const double hi = outcome_probability(Y, mu, id, rep, {c, inf, true, true});
    EXPECT_NEAR(lo + hi, 1.0, 1e-10);
    EXPECT_GE(lo, -1e-12);
    EXPECT_GE(hi, -1e-12);
  });
}

TEST(OutcomeProbability, PointIntervalPicksOneEigenvalue) {
  const LieRepresentation rep = builtin_su2(1.0);
  const Matrix& x3 = rep.generators[2];
  Vector top = Vector::Zero(3);
  top(0) = 1.0;
  const GenuineMixture mu = GenuineMixture::of_pure({1.0}, {top});
  const ObservableField Y = constant_field(x3);
  EXPECT_NEAR(outcome_probability(Y, mu, identity_deviation(), rep, Interval::point(1.0)), 1.0, 1e-12);
  EXPECT_NEAR(outcome_probability(Y, mu, identity_deviation(), rep, Interval::half_open(-1.0, 1.0)), 0.0, 1e-12);
  EXPECT_NEAR(gstate_expectation(mu, identity_deviation(), Y, rep), 1.0, 1e-12);
}

TEST(IntervalContains, EndpointConventions) {
  const Interval h = Interval::half_open(0.0, 1.0);
  EXPECT_TRUE(h.contains(0.0));
  EXPECT_FALSE(h.contains(1.0));
  EXPECT_TRUE(Interval::closed(0.0, 1.0).contains(1.0));
  EXPECT_TRUE(Interval::whole_line().contains(-1e300));
}

TEST(MixtureFlow, LinearFlowsCommuteWithTheBarycenter) {
  Rng rng(502);
  const Matrix a = rng.hermitian(3);
  const GenuineMixture mu = GenuineMixture::of_pure({0.3, 0.7}, {rng.unit_vector(3), rng.unit_vector(3)});
  SolverConfig cfg;
  EXPECT_LT(mixture_divergence_series(mu, linear_function(a), 5.0, cfg).max(), 1e-8);
  EXPECT_EQ(mixture_divergence(mu, linear_function(a), 0.0, cfg), 0.0);
}

TEST(MixtureFlow, EvolutionKeepsWeights) {
  Rng rng(503);
  const GenuineMixture mu = random_mixture(rng, 3, 3);
  SolverConfig cfg;
  const GenuineMixture out = evolve_mixture(mu, density_flow(linear_function(rng.hermitian(3)), cfg), 0.5);
  ASSERT_EQ(out.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_EQ(out.components()[i].weight, mu.components()[i].weight);
}

TEST(Divergence, DeltaMatchesDirectRateDifference) {
  const auto psis = divergence_fixture();
  const std::vector<double> w{0.5, 0.5};
  const Matrix H0 = discrete_laplacian_hamiltonian(64, 1.0);
  Matrix bary = Matrix::Zero(64, 64), parts = Matrix::Zero(64, 64);
  for (std::size_t j = 0; j < psis.size(); ++j) {
    const Matrix p = psis[j] * psis[j].adjoint();
    bary += w[j] * p;
    parts += w[j] * grid_rate(H0, 1.0, p);
  }
  const Matrix direct = kI * (parts - grid_rate(H0, 1.0, bary));
  const Matrix delta = delta_at_zero(psis, w, 1.0, 1.0);
  EXPECT_LT(max_abs(delta - direct), 1e-13);
  EXPECT_GT(delta.norm(), 1e-3);
  EXPECT_LT(max_abs(delta + delta.adjoint()), 1e-15);  // anti-Hermitian
}

TEST(Divergence, NonlinearGridFlowSplitsTheMixture) {
  const GenuineMixture mu = GenuineMixture::of_pure({0.5, 0.5}, divergence_fixture());
  const StateFunction f = nls_grid_functional(discrete_laplacian_hamiltonian(64, 1.0), 1.0, GridNonlinearity::power(1.0));
  const double rate = trace_norm_hermitian(Matrix(kI * delta_at_zero(divergence_fixture(), {0.5, 0.5}, 1.0, 1.0)));
  SolverConfig cfg;
  const double t = 1e-2;
  const double d = mixture_divergence(mu, f, t, cfg);
  EXPECT_GT(d, 0.5 * rate * t);
  EXPECT_NEAR(d / t, rate, 0.05 * rate);
}

TEST(Divergence, RejectsMismatchedInputs) {
  const auto psis = divergence_fixture();
  EXPECT_ERROR_KIND(delta_at_zero(psis, {1.0}, 1.0, 1.0), ErrorKind::Shape);
  EXPECT_ERROR_KIND(delta_at_zero({Vector(Vector::Ones(4))}, {1.0}, 1.0, 1.0), ErrorKind::Normalization);
}

TEST(MixtureJson, RoundTripAndErrors) {
  Rng rng(504);
  const GenuineMixture mu = random_mixture(rng, 2, 2);
  const GenuineMixture back = mixture_from_json(mixture_to_json(mu));
  ASSERT_EQ(back.size(), mu.size());
  EXPECT_LT(max_abs(barycenter(back) - barycenter(mu)), 1e-15);
  EXPECT_ERROR_KIND(mixture_from_json(Json::parse(R"({"parts": []})")), ErrorKind::Config);
  EXPECT_ERROR_KIND(mixture_from_json(Json::parse(R"({"components": [{"state": {"re": [[1]]}}]})")), ErrorKind::Config);
}

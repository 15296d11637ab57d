#include <gtest/gtest.h>

#include "eqmflow/eqmflow.hpp"
#include "support/expect_error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace eqmflow;

TEST(PureState, RejectsUnnormalizedAndEmpty) {
  Vector v(2);
  v << 1.0, 1.0;
  EXPECT_ERROR_KIND(PureState{v}, ErrorKind::Normalization);
  EXPECT_ERROR_KIND(PureState{Vector()}, ErrorKind::Shape);
  EXPECT_ERROR_KIND(PureState::normalized(Vector::Zero(3)), ErrorKind::Normalization);
  EXPECT_NEAR(PureState::normalized(v).vec().norm(), 1.0, 1e-15);
}

TEST(DensityMatrix, ValidatesTraceHermiticityPositivity) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_ERROR_KIND(DensityMatrix{m}, ErrorKind::Normalization);
  Matrix nh = 0.5 * Matrix::Identity(2, 2);
  nh(0, 1) = 0.1;
  EXPECT_ERROR_KIND(DensityMatrix{nh}, ErrorKind::Invariant);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  EXPECT_ERROR_KIND(DensityMatrix{neg}, ErrorKind::Positivity);
}

TEST(DensityMatrix, ClampsTinyNegativeEigenvalues) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0 + 5e-11;
  m(1, 1) = -5e-11;
  const DensityMatrix r(m);
  EXPECT_GE(eigenvalues_descending(r.mat()).minCoeff(), 0.0);
  EXPECT_NEAR(r.mat().trace().real(), 1.0, 1e-15);
}

TEST(Linalg, EighOrderedIsDescendingAndReconstructs) {
  gen::for_all(7, 30, [](Rng& rng, int) {
    const Matrix h = rng.hermitian(gen::dim(rng));
    const EigenSystem es = eigh_ordered(h);
    for (Eigen::Index i = 1; i < es.values.size(); ++i) EXPECT_GE(es.values(i - 1), es.values(i));
    EXPECT_LT(max_abs(es.reconstruct() - h), 1e-12);
  });
}

TEST(Linalg, ExpHermitianGeneratorMatchesOracle) {
  gen::for_all(11, 20, [](Rng& rng, int) {
    const int d = gen::dim(rng);
    const Matrix h = rng.hermitian(d);
    const Vector x = rng.unit_vector(d);
    const double t = rng.uniform(-2.0, 2.0);
    const Matrix u = exp_hermitian_generator(h, t);
    EXPECT_TRUE(is_unitary(u));
    EXPECT_LT((u * x - oracle::exact_propagate(h, x, t)).norm(), 1e-12);
  });
}

TEST(Linalg, TraceNormOfHermitianIsSumOfAbsoluteEigenvalues) {
  gen::for_all(3, 20, [](Rng& rng, int) {
    const Matrix h = rng.hermitian(gen::dim(rng));
    EXPECT_NEAR(trace_norm_hermitian(h), eigenvalues_descending(h).cwiseAbs().sum(), 1e-12);
    EXPECT_NEAR(trace_norm(h), trace_norm_hermitian(h), 1e-10);
  });
}

TEST(Linalg, HermitianBasisIsOrthonormal) {
  const auto basis = hermitian_basis(3);
  ASSERT_EQ(basis.size(), 9u);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      EXPECT_NEAR(trace_product_real(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-14);
}

TEST(State, PartialTraceOfProduct) {
  Rng rng(5);
  const Matrix a = rng.density(2), b = rng.density(3);
  const Matrix ab = kron(a, b);
  EXPECT_LT(max_abs(partial_trace(ab, 2, 3, Keep::A) - a), 1e-14);
  EXPECT_LT(max_abs(partial_trace(ab, 2, 3, Keep::B) - b), 1e-14);
  EXPECT_ERROR_KIND(partial_trace(ab, 2, 2, Keep::A), ErrorKind::Shape);
}

TEST(State, SiteMarginalAgreesWithPartialTrace) {
  gen::for_all(21, 10, [](Rng& rng, int) {
    const int d = 2, n = 3;
    const Vector psi = rng.unit_vector(8);
    const Matrix rho = psi * psi.adjoint();
    EXPECT_LT(max_abs(site_marginal(psi, d, n, 1) - partial_trace(rho, 2, 4, Keep::A)), 1e-14);
    EXPECT_LT(max_abs(site_marginal(psi, d, n, 3) - partial_trace(rho, 4, 2, Keep::B)), 1e-14);
  });
}

TEST(State, SpectralDecompositionGroupsDegenerateEigenvalues) {
  Rng rng(9);
  const Matrix U = exp_hermitian_generator(rng.hermitian(4), 1.0);
  Vector ev(4);
  ev << 0.4, 0.4, 0.2, 0.0;
  const Matrix rho = U * ev.asDiagonal() * U.adjoint();
  const SpectralDecomposition dec = spectral_decomposition(rho);
  ASSERT_EQ(dec.clusters.size(), 2u);
  EXPECT_EQ(dec.clusters[0].rank, 2);
  EXPECT_EQ(dec.clusters[1].rank, 1);
  EXPECT_EQ(dec.kernel_rank, 1);
  Matrix total = dec.kernel;
  for (const auto& c : dec.clusters) total += c.projector;
  EXPECT_LT(max_abs(total - Matrix::Identity(4, 4)), 1e-12);
}

TEST(State, BetaMapInvertsCommutatorOffBlock) {
  gen::for_all(13, 20, [](Rng& rng, int) {
    const int d = gen::dim(rng, 2, 4);
    const Matrix rho = rng.density(d);
    const SpectralDecomposition dec = spectral_decomposition(rho);
    const Matrix c = q_projection(dec, rng.hermitian(d));
    const Matrix b = beta_map(dec, c);
    EXPECT_LT(max_abs(kI * commutator(rho, b) - c), 1e-9);
  });
}

TEST(State, BetaMapRejectsBlockDiagonalInput) {
  Rng rng(2);
  const Matrix rho = rng.density(3);
  EXPECT_ERROR_KIND(beta_map(spectral_decomposition(rho), rho), ErrorKind::Domain);
}

TEST(State, DecompositionsAverageToTheReducedState) {
  gen::for_all(17, 10, [](Rng& rng, int) {
    const int dA = 2, dB = 3;
    const PureState psi(rng.unit_vector(dA * dB));
    const Matrix reduced = partial_trace(Matrix(psi.vec() * psi.vec().adjoint()), dA, dB, Keep::A);
    const Matrix U = exp_hermitian_generator(rng.hermitian(dB), 1.0);
    std::vector<Vector> basis;
    for (int k = 0; k < dB; ++k) basis.push_back(U.col(k));
    const MixtureDecomposition rel = relative_state_decomposition(psi, dA, dB, basis);
    EXPECT_NEAR(rel.total_weight(), 1.0, 1e-12);
    EXPECT_LT(max_abs(rel.barycenter() - reduced), 1e-12);

    const Matrix p0 = U.col(0) * U.col(0).adjoint();
    const MixtureDecomposition coarse = coarse_decomposition(psi, dA, dB, {p0, Matrix(Matrix::Identity(dB, dB) - p0)});
    EXPECT_LT(max_abs(coarse.barycenter() - reduced), 1e-12);
  });
}

TEST(State, CheckedPowerEnforcesBudget) {
  EXPECT_EQ(checked_power(2, 10, 1024), 1024);
  EXPECT_ERROR_KIND(checked_power(2, 11, 1024), ErrorKind::Domain);
  EXPECT_ERROR_KIND(embed_at_site(Matrix::Identity(2, 2), 1, 13), ErrorKind::Domain);
}

TEST(State, EmbedAtSiteActsOnOneFactor) {
  Rng rng(4);
  const Matrix x = rng.hermitian(2), a = rng.density(2), b = rng.density(2), c = rng.density(2);
  const Matrix prod = kron(kron(a, b), c);
  EXPECT_NEAR(trace_product_real(prod, embed_at_site(x, 2, 3)), trace_product_real(b, x), 1e-14);
}

TEST(Serialize, MatrixRoundTripAndErrors) {
  Rng rng(8);
  const Matrix m = rng.matrix(3);
  EXPECT_LT(max_abs(matrix_from_json(matrix_to_json(m)) - m), 1e-15);
  EXPECT_ERROR_KIND(matrix_from_json(Json::parse(R"({"re": [[1, 2], [3]]})")), ErrorKind::Config);
  EXPECT_ERROR_KIND(vector_from_json(Json::parse(R"("x")")), ErrorKind::Config);
}

TEST(Serialize, BuresDistanceEqualsFsOnPureStates) {
  gen::for_all(31, 10, [](Rng& rng, int) {
    const Vector x = rng.unit_vector(3), y = rng.unit_vector(3);
    EXPECT_NEAR(bures_distance(x * x.adjoint(), y * y.adjoint()), fs_distance(x, y), 1e-7);
  });
}

// lie.hpp - Lie algebras, Hermitian representations, momentum maps,
// Berezin brackets and coadjoint flows, the built-in su(2) and truncated
// Weyl-Heisenberg systems, Weyl displacements and deformed generators.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqmflow/integrator.hpp"
#include "eqmflow/poisson.hpp"

namespace eqmflow {

/// Structure constants c_jk^l with [xi_j, xi_k] = sum_l c_jk^l xi_l.
struct LieAlgebraSpec {
  int n = 0;
  std::vector<double> c;  // index (j*n + k)*n + l
  std::vector<std::string> labels;
  /// Quadratic Casimir sum F_j G_jk F_k, when the algebra has one.
  std::optional<RealMatrix> casimir_metric;

  explicit LieAlgebraSpec(int dim = 0) : n(dim), c(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

  double operator()(int j, int k, int l) const { return c[(static_cast<std::size_t>(j) * n + k) * n + l]; }
  double& at(int j, int k, int l) { return c[(static_cast<std::size_t>(j) * n + k) * n + l]; }

  /// Sets c_jk^l and c_kj^l = -c_jk^l together.
  void set(int j, int k, int l, double v) {
    at(j, k, l) = v;
    at(k, j, l) = -v;
  }

  double jacobi_residual() const {
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int p = 0; p < n; ++p) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
              s += (*this)(j, k, m) * (*this)(m, l, p) + (*this)(k, l, m) * (*this)(m, j, p) +
                   (*this)(l, j, m) * (*this)(m, k, p);
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  void validate(double jacobi_tol = 1e-12) const {
    require(n > 0 && c.size() == static_cast<std::size_t>(n) * n * n, ErrorKind::Shape,
            "LieAlgebraSpec: structure constant array has the wrong size");
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          require((*this)(j, k, l) == -(*this)(k, j, l), ErrorKind::Invariant,
                  "LieAlgebraSpec: structure constants are not antisymmetric");
    const double jr = jacobi_residual();
    require(jr <= jacobi_tol, ErrorKind::Invariant,
            "LieAlgebraSpec: Jacobi identity fails (residual " + std::to_string(jr) + ")");
  }

  /// M_kl = sum_j xi_j c_jk^l.
  RealMatrix ad_matrix(const RealVector& xi) const {
    require(xi.size() == n, ErrorKind::Shape, "ad_matrix: wrong coefficient count");
    RealMatrix m = RealMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      if (xi(j) == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) m(k, l) += xi(j) * (*this)(j, k, l);
    }
    return m;
  }

  /// Coordinates of [xi, eta].
  RealVector bracket(const RealVector& xi, const RealVector& eta) const {
    RealVector out = RealVector::Zero(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double w = xi(j) * eta(k);
        if (w == 0.0) continue;
        for (int l = 0; l < n; ++l) out(l) += w * (*this)(j, k, l);
      }
    return out;
  }
};

struct Monomial {
  double coef = 0.0;
  std::vector<int> powers;
};

/// Polynomial function Q on coadjoint coordinates. Evaluation is templated so
/// that complex arguments work too.
class ClassicalGenerator {
 public:
  ClassicalGenerator() = default;
  ClassicalGenerator(int arity, std::vector<Monomial> terms) : n_(arity), terms_(std::move(terms)) {
    require(n_ > 0, ErrorKind::Config, "generator: arity must be positive");
    for (const auto& t : terms_) {
      require(static_cast<int>(t.powers.size()) == n_, ErrorKind::Config,
              "generator.terms: \"powers\" must have " + std::to_string(n_) + " entries");
      for (int p : t.powers) require(p >= 0, ErrorKind::Config, "generator.terms: powers must be nonnegative");
      require(std::isfinite(t.coef), ErrorKind::Config, "generator.terms: non-finite coefficient");
    }
  }

  static ClassicalGenerator linear(const RealVector& coeffs) {
    std::vector<Monomial> terms;
    const int n = static_cast<int>(coeffs.size());
    for (int j = 0; j < n; ++j) {
      if (coeffs(j) == 0.0) continue;
      Monomial m{coeffs(j), std::vector<int>(static_cast<std::size_t>(n), 0)};
      m.powers[static_cast<std::size_t>(j)] = 1;
      terms.push_back(std::move(m));
    }
    return ClassicalGenerator(n, std::move(terms));
  }

  static ClassicalGenerator constant(int n, double c) {
    return ClassicalGenerator(n, {Monomial{c, std::vector<int>(static_cast<std::size_t>(n), 0)}});
  }

  /// c * F_j^p
  static ClassicalGenerator power(int n, int j, int p, double c = 1.0) {
    Monomial m{c, std::vector<int>(static_cast<std::size_t>(n), 0)};
    m.powers[static_cast<std::size_t>(j)] = p;
    return ClassicalGenerator(n, {m});
  }

  ClassicalGenerator operator+(const ClassicalGenerator& o) const {
    require(n_ == o.n_, ErrorKind::Shape, "generator sum: arity mismatch");
    std::vector<Monomial> t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return ClassicalGenerator(n_, std::move(t));
  }

  int arity() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int p : t.powers) s += p;
      if (t.coef != 0.0) d = std::max(d, s);
    }
    return d;
  }

  template <class Vec>
  typename Vec::Scalar value(const Vec& F) const {
    using S = typename Vec::Scalar;
    check(F.size());
    S total(0.0);
    for (const auto& t : terms_) {
      S m(t.coef);
      for (int j = 0; j < n_; ++j) m *= ipow(F(j), t.powers[static_cast<std::size_t>(j)]);
      total += m;
    }
    return total;
  }

  template <class Vec>
  Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1> gradient(const Vec& F) const {
    using S = typename Vec::Scalar;
    check(F.size());
    Eigen::Matrix<S, Eigen::Dynamic, 1> g = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(n_);
    for (const auto& t : terms_) {
      for (int d = 0; d < n_; ++d) {
        const int pd = t.powers[static_cast<std::size_t>(d)];
        if (pd == 0) continue;
        S m(t.coef * pd);
        for (int j = 0; j < n_; ++j) m *= ipow(F(j), t.powers[static_cast<std::size_t>(j)] - (j == d ? 1 : 0));
        g(d) += m;
      }
    }
    return g;
  }

  RealMatrix hessian(const RealVector& F) const {
    check(F.size());
    RealMatrix h = RealMatrix::Zero(n_, n_);
    for (const auto& t : terms_)
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
          std::vector<int> p = t.powers;
          double m = t.coef;
          m *= p[static_cast<std::size_t>(a)];
          if (m == 0.0) continue;
          p[static_cast<std::size_t>(a)] -= 1;
          m *= p[static_cast<std::size_t>(b)];
          if (m == 0.0) continue;
          p[static_cast<std::size_t>(b)] -= 1;
          for (int j = 0; j < n_; ++j) m *= ipow(F(j), p[static_cast<std::size_t>(j)]);
          h(a, b) += m;
        }
    return h;
  }

 private:
  void check(Eigen::Index size) const {
    require(size == n_, ErrorKind::Shape,
            "generator: expected " + std::to_string(n_) + " coordinates, got " + std::to_string(size));
  }

  template <class S>
  static S ipow(S x, int p) {
    S r(1.0);
    for (int i = 0; i < p; ++i) r *= x;
    return r;
  }

  int n_ = 0;
  std::vector<Monomial> terms_;
};

enum class Exactness { Exact, Truncated };

struct WeylHeisenbergInfo {
  int pairs = 1;
  int levels = 0;
  double lambda = 1.0;
  std::optional<RealMatrix> quadratic;
};

struct LieRepresentation {
  std::string name;
  LieAlgebraSpec algebra;
  std::vector<Matrix> generators;
  Exactness exactness = Exactness::Exact;
  double tail_tol = 0.0;
  std::optional<Matrix> low_subspace;  // projector where a truncated rep is trusted
  std::optional<WeylHeisenbergInfo> wh;

  int dim() const { return generators.empty() ? 0 : static_cast<int>(generators.front().rows()); }
  int size() const { return algebra.n; }

  /// sum_j c_j X_j
  Matrix combination(const RealVector& coeffs) const {
    require(coeffs.size() == algebra.n, ErrorKind::Shape, "combination: wrong coefficient count");
    Matrix out = Matrix::Zero(dim(), dim());
    for (int j = 0; j < algebra.n; ++j)
      if (coeffs(j) != 0.0) out += coeffs(j) * generators[static_cast<std::size_t>(j)];
    return out;
  }
};

/// Largest Frobenius norm of [X_j, X_k] - i sum_l c_jk^l X_l, compressed to
/// the given subspace when a projector is supplied.
inline double verify_representation(const LieRepresentation& rep, const std::optional<Matrix>& subspace = std::nullopt) {
  const int n = rep.algebra.n;
  require(static_cast<int>(rep.generators.size()) == n, ErrorKind::Shape,
          "verify_representation: generator count does not match the algebra");
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Matrix r = commutator(rep.generators[static_cast<std::size_t>(j)], rep.generators[static_cast<std::size_t>(k)]);
      for (int l = 0; l < n; ++l) {
        const double c = rep.algebra(j, k, l);
        if (c != 0.0) r -= kI * c * rep.generators[static_cast<std::size_t>(l)];
      }
      if (subspace) r = (*subspace) * r * (*subspace);
      worst = std::max(worst, r.norm());
    }
  return worst;
}

inline void validate_representation(const LieRepresentation& rep) {
  rep.algebra.validate();
  require(static_cast<int>(rep.generators.size()) == rep.algebra.n, ErrorKind::Shape,
          "representation: generator count does not match the algebra");
  for (const auto& x : rep.generators) {
    require_hermitian(x, "representation generator");
    require(x.rows() == rep.dim(), ErrorKind::Shape, "representation: generators of different sizes");
  }
}

/// F_j = Tr(rho X_j).
inline RealVector momentum_map(const LieRepresentation& rep, const Matrix& rho) {
  require(rho.rows() == rep.dim() && rho.cols() == rep.dim(), ErrorKind::Shape, "momentum_map: dimension mismatch");
  RealVector F(rep.algebra.n);
  for (int j = 0; j < rep.algebra.n; ++j) F(j) = trace_product_real(rho, rep.generators[static_cast<std::size_t>(j)]);
  return F;
}

inline RealVector momentum_map(const LieRepresentation& rep, const DensityMatrix& rho) {
  return momentum_map(rep, rho.mat());
}

/// F_j = <x, X_j x> / <x, x>.
inline RealVector momentum_map(const LieRepresentation& rep, const Vector& x) {
  require(x.size() == rep.dim(), ErrorKind::Shape, "momentum_map: dimension mismatch");
  const double nn = x.squaredNorm();
  RealVector F(rep.algebra.n);
  for (int j = 0; j < rep.algebra.n; ++j) F(j) = x.dot(rep.generators[static_cast<std::size_t>(j)] * x).real() / nn;
  return F;
}

/// X(dQ) = sum_j dQ/dF_j X_j.
inline Matrix generator_at(const LieRepresentation& rep, const ClassicalGenerator& Q, const RealVector& F) {
  return rep.combination(Q.gradient(F));
}

/// The pullback Q o momentum_map as a state function.
inline StateFunction pullback(const LieRepresentation& rep, const ClassicalGenerator& Q) {
  require(Q.arity() == rep.algebra.n, ErrorKind::Shape, "pullback: generator arity does not match the algebra");
  StateFunction f;
  f.kind = StateFunction::Kind::Pullback;
  f.value = [rep, Q](const Matrix& nu) { return Q.value(momentum_map(rep, nu)); };
  f.grad = [rep, Q](const Matrix& nu) { return generator_at(rep, Q, momentum_map(rep, nu)); };
  f.description = "pullback(" + rep.name + ")";
  return f;
}

/// Coadjoint action of exp(t xi): exp(-t M) F with M_kl = sum_j xi_j c_jk^l.
inline RealVector ad_star_exp(const LieAlgebraSpec& alg, const RealVector& xi, double t, const RealVector& F) {
  require(F.size() == alg.n, ErrorKind::Shape, "ad_star_exp: wrong coordinate count");
  if (t == 0.0) return F;
  const RealMatrix m = (-t * alg.ad_matrix(xi)).eval();
  const RealMatrix e = m.exp();
  return e * F;
}

/// -sum_{j,k,l} df_j dh_k c_jk^l F_l.
inline double berezin_bracket(const LieAlgebraSpec& alg, const RealVector& df, const RealVector& dh,
                              const RealVector& F) {
  require(df.size() == alg.n && dh.size() == alg.n && F.size() == alg.n, ErrorKind::Shape,
          "berezin_bracket: wrong coordinate count");
  return -alg.bracket(df, dh).dot(F);
}

inline double berezin_bracket(const LieAlgebraSpec& alg, const ClassicalGenerator& f, const ClassicalGenerator& h,
                              const RealVector& F) {
  return berezin_bracket(alg, f.gradient(F), h.gradient(F), F);
}

/// dF_k/dt = {Q, F_k} = -sum_{j,l} dQ_j c_jk^l F_l.
inline RealVector classical_rhs(const LieAlgebraSpec& alg, const ClassicalGenerator& Q, const RealVector& F) {
  const RealVector g = Q.gradient(F);
  return -alg.ad_matrix(g) * F;
}

inline double casimir_value(const LieAlgebraSpec& alg, const RealVector& F) {
  if (!alg.casimir_metric) return 0.0;
  return F.dot(*alg.casimir_metric * F);
}

struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<RealVector> F;
  std::vector<double> Q_values;
  std::vector<double> casimir;

  double max_Q_drift() const {
    double w = 0.0;
    for (double q : Q_values) w = std::max(w, std::abs(q - Q_values.front()));
    return w;
  }
  double max_casimir_drift() const {
    double w = 0.0;
    for (double c : casimir) w = std::max(w, std::abs(c - casimir.front()));
    return w;
  }
};

/// Integrates the coadjoint flow of Q with RK4 from F0 over [0, T].
inline ClassicalTrajectory classical_flow(const LieAlgebraSpec& alg, const ClassicalGenerator& Q,
                                          const RealVector& F0, double T, const SolverConfig& cfg) {
  require(F0.size() == alg.n && Q.arity() == alg.n, ErrorKind::Shape, "classical_flow: dimension mismatch");
  require(F0.allFinite(), ErrorKind::Domain, "classical_flow: non-finite initial point");
  const StepPlan plan = plan_steps(T, cfg.dt);
  ClassicalTrajectory tr;
  auto record = [&](double t, const RealVector& F) {
    tr.times.push_back(t);
    tr.F.push_back(F);
    tr.Q_values.push_back(Q.value(F));
    tr.casimir.push_back(casimir_value(alg, F));
  };
  RealVector F = F0;
  record(0.0, F);
  auto rhs = [&](double, const RealVector& y) { return classical_rhs(alg, Q, y); };
  for (int s = 0; s < plan.steps; ++s) {
    F = rk4_step(F, s * plan.h, plan.h, rhs);
    require(F.allFinite(), ErrorKind::Numerical, "classical_flow: non-finite state");
    if ((s + 1) % cfg.sample_stride == 0 || s + 1 == plan.steps) record((s + 1) * plan.h, F);
  }
  return tr;
}

/// Endpoint of the flow, with step count n and uniform step T/n.
inline RealVector classical_flow_endpoint(const LieAlgebraSpec& alg, const ClassicalGenerator& Q,
                                          const RealVector& F0, double T, double dt) {
  const StepPlan plan = plan_steps(T, dt);
  RealVector F = F0;
  auto rhs = [&](double, const RealVector& y) { return classical_rhs(alg, Q, y); };
  for (int s = 0; s < plan.steps; ++s) F = rk4_step(F, s * plan.h, plan.h, rhs);
  return F;
}

// ---------------------------------------------------------------------------
// Built-in systems

inline LieRepresentation builtin_su2(double spin) {
  const double twice = 2.0 * spin;
  require(spin > 0.0 && std::abs(twice - std::round(twice)) < 1e-12, ErrorKind::Config,
          "su2: spin must be a positive multiple of 1/2");
  const int d = static_cast<int>(std::round(twice)) + 1;
  Matrix jz = Matrix::Zero(d, d), jp = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = spin - i;
    jz(i, i) = m;
    if (i > 0) jp(i - 1, i) = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
  }
  const Matrix jm = jp.adjoint();
  LieRepresentation rep;
  rep.name = "su2";
  rep.algebra = LieAlgebraSpec(3);
  rep.algebra.labels = {"J1", "J2", "J3"};
  rep.algebra.set(0, 1, 2, 1.0);
  rep.algebra.set(1, 2, 0, 1.0);
  rep.algebra.set(2, 0, 1, 1.0);
  rep.algebra.casimir_metric = RealMatrix::Identity(3, 3);
  rep.generators = {0.5 * (jp + jm), (-0.5 * kI) * (jp - jm), jz};
  rep.exactness = Exactness::Exact;
  return rep;
}

/// Annihilation operator on N levels.
inline Matrix ladder_lowering(int levels) {
  Matrix a = Matrix::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Positions Q_1..Q_n, momenta P_1..P_n and X0 = I/lambda on n truncated
/// modes of N levels each; [Q_j, P_k] = (i/lambda) delta_jk away from the top
/// level. Trusted subspace: each mode below ceil(N/2).
inline LieRepresentation builtin_wh_fock(int pairs, int levels, double lambda = 1.0, Eigen::Index budget = 4096) {
  require(pairs >= 1, ErrorKind::Config, "wh_fock: pairs must be >= 1");
  require(levels >= 2, ErrorKind::Config, "wh_fock: levels must be >= 2");
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Config, "wh_fock: lambda must be positive");
  const Eigen::Index dim = checked_power(levels, pairs, budget);
  const Matrix a = ladder_lowering(levels);
  const double s = 1.0 / std::sqrt(2.0 * lambda);
  const Matrix q1 = s * (a + a.adjoint());
  const Matrix p1 = (-kI * s) * (a - a.adjoint());

  LieRepresentation rep;
  rep.name = "wh_fock";
  const int n = 2 * pairs + 1;
  rep.algebra = LieAlgebraSpec(n);
  for (int j = 0; j < pairs; ++j) {
    rep.algebra.labels.push_back("Q" + std::to_string(j + 1));
    rep.algebra.set(j, j + pairs, 2 * pairs, 1.0);
  }
  for (int j = 0; j < pairs; ++j) rep.algebra.labels.push_back("P" + std::to_string(j + 1));
  rep.algebra.labels.push_back("X0");

  std::vector<Matrix> qs, ps;
  for (int j = 1; j <= pairs; ++j) {
    qs.push_back(embed_at_site(q1, j, pairs, budget));
    ps.push_back(embed_at_site(p1, j, pairs, budget));
  }
  rep.generators = qs;
  rep.generators.insert(rep.generators.end(), ps.begin(), ps.end());
  rep.generators.push_back(Matrix::Identity(dim, dim) / lambda);

  const int low = (levels + 1) / 2;
  Matrix mode_low = Matrix::Zero(levels, levels);
  for (int k = 0; k < low; ++k) mode_low(k, k) = 1.0;
  Matrix proj = mode_low;
  for (int j = 1; j < pairs; ++j) proj = kron(proj, mode_low);
  rep.low_subspace = proj;
  rep.exactness = Exactness::Truncated;
  rep.tail_tol = default_tolerances().tail_warning;
  rep.wh = WeylHeisenbergInfo{pairs, levels, lambda, std::nullopt};
  return rep;
}

/// Symplectic matrix on the 2n position/momentum indices: S_{j, j+n} = 1.
inline RealMatrix symplectic_matrix(int pairs) {
  RealMatrix S = RealMatrix::Zero(2 * pairs, 2 * pairs);
  for (int j = 0; j < pairs; ++j) {
    S(j, j + pairs) = 1.0;
    S(j + pairs, j) = -1.0;
  }
  return S;
}

/// Appends A = (1/2) sum_jk a_jk (X_j X_k + X_k X_j)/2 after X0. The algebra
/// closes with [A, X_k] = (i/lambda) sum_j (aS)_jk X_j.
inline LieRepresentation builtin_wh_fock_quadratic(int pairs, int levels, double lambda, const RealMatrix& a,
                                                   Eigen::Index budget = 4096) {
  require(a.rows() == 2 * pairs && a.cols() == 2 * pairs, ErrorKind::Config,
          "wh_fock_quadratic: quadratic form must be 2n x 2n");
  require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14, ErrorKind::Config,
          "wh_fock_quadratic: quadratic form must be symmetric");
  LieRepresentation base = builtin_wh_fock(pairs, levels, lambda, budget);
  const int m = 2 * pairs;
  Matrix A = Matrix::Zero(base.dim(), base.dim());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      if (a(j, k) == 0.0) continue;
      const Matrix& xj = base.generators[static_cast<std::size_t>(j)];
      const Matrix& xk = base.generators[static_cast<std::size_t>(k)];
      A += (0.25 * a(j, k)) * (xj * xk + xk * xj);
    }
  A = hermitian_part(A);

  LieRepresentation rep;
  rep.name = "wh_fock_quadratic";
  rep.algebra = LieAlgebraSpec(m + 2);
  rep.algebra.labels = base.algebra.labels;
  rep.algebra.labels.push_back("A");
  for (int j = 0; j < m + 1; ++j)
    for (int k = 0; k < m + 1; ++k)
      for (int l = 0; l < m + 1; ++l) rep.algebra.at(j, k, l) = base.algebra(j, k, l);
  const RealMatrix aS = a * symplectic_matrix(pairs);
  const int iA = m + 1;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      if (aS(j, k) != 0.0) rep.algebra.set(iA, k, j, aS(j, k) / lambda);
  rep.generators = base.generators;
  rep.generators.push_back(A);
  rep.exactness = Exactness::Truncated;
  rep.tail_tol = base.tail_tol;
  rep.low_subspace = base.low_subspace;
  rep.wh = base.wh;
  rep.wh->quadratic = a;
  return rep;
}

/// Weight of a vector outside the trusted subspace of a truncated rep.
inline double tail_mass(const LieRepresentation& rep, const Vector& x) {
  if (!rep.low_subspace) return 0.0;
  return (x - (*rep.low_subspace) * x).squaredNorm() / x.squaredNorm();
}

inline double tail_mass(const LieRepresentation& rep, const Matrix& rho) {
  if (!rep.low_subspace) return 0.0;
  return 1.0 - trace_product_real(*rep.low_subspace, rho) / rho.trace().real();
}

/// Weyl operators W(x) = exp(i lambda sum_jk X_j S_jk x_k) on a truncated WH
/// representation, x = (q_1..q_n, p_1..p_n). Each mode factor is assembled
/// from one diagonalization of its position operator: with p + iq = r e^{i th}
/// and R = exp(-i th N), pQ - qP = r R Q R^dagger.
class WeylDisplacer {
 public:
  explicit WeylDisplacer(const LieRepresentation& rep) {
    require(rep.wh.has_value(), ErrorKind::Domain, "weyl_displacement: representation is not Weyl-Heisenberg");
    info_ = *rep.wh;
    const Matrix a = ladder_lowering(info_.levels);
    const Matrix q = (1.0 / std::sqrt(2.0 * info_.lambda)) * (a + a.adjoint());
    const EigenSystem es = eigh_ordered(q);
    V_ = es.vectors;
    D_ = es.values;
  }

  int pairs() const { return info_.pairs; }

  Matrix mode_factor(double q, double p) const {
    const int N = info_.levels;
    const double r = std::hypot(p, q);
    if (r == 0.0) return Matrix::Identity(N, N);
    const double th = std::atan2(q, p);
    Vector phase(N), rot(N);
    for (int k = 0; k < N; ++k) {
      phase(k) = std::exp(kI * (info_.lambda * r * D_(k)));
      rot(k) = std::exp(-kI * (th * k));
    }
    const Matrix inner = V_ * phase.asDiagonal() * V_.adjoint();
    return rot.asDiagonal() * inner * rot.conjugate().asDiagonal();
  }

  Matrix matrix(const RealVector& x) const {
    require(x.size() == 2 * info_.pairs, ErrorKind::Shape, "weyl_displacement: expected 2n displacement coordinates");
    Matrix w = mode_factor(x(0), x(info_.pairs));
    for (int j = 1; j < info_.pairs; ++j) w = kron(w, mode_factor(x(j), x(j + info_.pairs)));
    return w;
  }

  /// W(x) v without forming the matrix for a single mode.
  Vector apply(const RealVector& x, const Vector& v) const {
    if (info_.pairs != 1) return matrix(x) * v;
    const int N = info_.levels;
    const double q = x(0), p = x(1);
    const double r = std::hypot(p, q);
    if (r == 0.0) return v;
    const double th = std::atan2(q, p);
    Vector rot(N), phase(N);
    for (int k = 0; k < N; ++k) {
      rot(k) = std::exp(-kI * (th * k));
      phase(k) = std::exp(kI * (info_.lambda * r * D_(k)));
    }
    Vector w = rot.conjugate().cwiseProduct(v);
    w = V_.adjoint() * w;
    w = phase.cwiseProduct(w);
    w = V_ * w;
    return rot.cwiseProduct(w);
  }

 private:
  WeylHeisenbergInfo info_;
  Matrix V_;
  RealVector D_;
};

inline Matrix weyl_displacement(const LieRepresentation& rep, const RealVector& x) {
  return WeylDisplacer(rep).matrix(x);
}

/// Vacuum of the truncated Fock space.
inline Vector fock_vacuum(const LieRepresentation& rep) {
  Vector v = Vector::Zero(rep.dim());
  v(0) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Observable fields and deformed generators

/// A Hermitian-matrix valued function on coadjoint coordinates.
struct ObservableField {
  std::function<Matrix(const RealVector&)> map;
  std::string description;
  Matrix operator()(const RealVector& F) const { return map(F); }
};

inline ObservableField constant_field(const Matrix& a) {
  return {[a](const RealVector&) { return a; }, "constant"};
}

/// A map of coadjoint coordinates with its Jacobian J_jk = d psi_j / d F_k.
struct Diffeo {
  std::function<RealVector(const RealVector&)> map;
  std::function<RealMatrix(const RealVector&)> jacobian;
  std::string name;
};

inline Diffeo identity_diffeo(int n) {
  return {[](const RealVector& F) { return F; }, [n](const RealVector&) { return RealMatrix::Identity(n, n).eval(); },
          "identity"};
}

inline Diffeo linear_diffeo(const RealMatrix& R) {
  return {[R](const RealVector& F) { return (R * F).eval(); }, [R](const RealVector&) { return R; }, "linear"};
}

/// Time-s map of the coadjoint flow of Q, with the Jacobian carried by the
/// variational equation dJ/dt = A(F) J.
inline Diffeo flow_map_diffeo(const LieAlgebraSpec& alg, const ClassicalGenerator& Q, double s, double dt = 1e-3) {
  auto integrate = [alg, Q, s, dt](const RealVector& F0) {
    const int n = alg.n;
    RealVector y(n + n * n);
    y.head(n) = F0;
    Eigen::Map<RealMatrix>(y.data() + n, n, n).setIdentity();
    auto rhs = [&](double, const RealVector& z) {
      RealVector out(z.size());
      const RealVector F = z.head(n);
      const RealVector g = Q.gradient(F);
      const RealMatrix H = Q.hessian(F);
      out.head(n) = -alg.ad_matrix(g) * F;
      RealMatrix A = RealMatrix::Zero(n, n);
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double v = 0.0;
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
              const double c = alg(j, k, l);
              if (c == 0.0) continue;
              v -= H(j, m) * c * F(l);
              if (l == m) v -= g(j) * c;
            }
          A(k, m) = v;
        }
      const Eigen::Map<const RealMatrix> J(z.data() + n, n, n);
      Eigen::Map<RealMatrix>(out.data() + n, n, n) = A * J;
      return out;
    };
    const StepPlan plan = plan_steps(s, dt);
    for (int k = 0; k < plan.steps; ++k) y = rk4_step(y, k * plan.h, plan.h, rhs);
    return y;
  };
  const int n = alg.n;
  Diffeo d;
  d.map = [integrate, n](const RealVector& F) { return RealVector(integrate(F).head(n)); };
  d.jacobian = [integrate, n](const RealVector& F) {
    const RealVector y = integrate(F);
    return RealMatrix(Eigen::Map<const RealMatrix>(y.data() + n, n, n));
  };
  d.name = "flow_map";
  return d;
}

/// max over j < k of |{psi_j, psi_k}(F) + sum_l c_jk^l psi_l(F)|.
inline double bracket_preservation_residual(const LieAlgebraSpec& alg, const Diffeo& psi, const RealVector& F) {
  const RealVector y = psi.map(F);
  const RealMatrix J = psi.jacobian(F);
  double worst = 0.0;
  for (int j = 0; j < alg.n; ++j)
    for (int k = j + 1; k < alg.n; ++k) {
      const double lhs = berezin_bracket(alg, RealVector(J.row(j).transpose()), RealVector(J.row(k).transpose()), F);
      double rhs = 0.0;
      for (int l = 0; l < alg.n; ++l) rhs -= alg(j, k, l) * y(l);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

/// f(nu) = psi_j(F(nu)) with gradient sum_k J_jk X_k. The probes are checked
/// for bracket preservation first.
inline StateFunction deformed_generator(const LieRepresentation& rep, const Diffeo& psi, int j,
                                        const std::vector<RealVector>& probes, double tol = 1e-6) {
  require(j >= 0 && j < rep.algebra.n, ErrorKind::Shape, "deformed_generator: index out of range");
  for (const auto& F : probes) {
    const double r = bracket_preservation_residual(rep.algebra, psi, F);
    require(r <= tol, ErrorKind::Domain,
            "deformed_generator: map does not preserve brackets (residual " + std::to_string(r) + ")");
  }
  StateFunction f;
  f.kind = StateFunction::Kind::Custom;
  f.value = [rep, psi, j](const Matrix& nu) { return psi.map(momentum_map(rep, nu))(j); };
  f.grad = [rep, psi, j](const Matrix& nu) {
    const RealMatrix J = psi.jacobian(momentum_map(rep, nu));
    return rep.combination(J.row(j).transpose());
  };
  f.description = "deformed(" + psi.name + ", " + std::to_string(j) + ")";
  return f;
}

}  // namespace eqmflow

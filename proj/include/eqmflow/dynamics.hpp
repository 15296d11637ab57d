// dynamics.hpp - nonlinear flows on states: direct Liouville-von Neumann
// integration, the nonlinear Schroedinger equation (directly and through the
// classical/linear split), group propagators and gauges, Heisenberg-picture
// transport, restricted classical projections, grid NLS and the
// homogeneous-observable (Weinberg) form.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eqmflow/trajectory.hpp"

namespace eqmflow {

struct FlowOptions {
  /// Density solvers fail when the smallest eigenvalue drops below -this.
  double positivity_tol = 1e-8;
  /// Pure-state solvers fail when the norm drifts further than this.
  double norm_tol = 1e-6;
  /// Momentum map used for the F samples of the trajectory.
  const LieRepresentation* rep = nullptr;
};

namespace detail {

inline bool sample_due(int step, int steps, int stride) { return step % stride == 0 || step == steps; }

inline void check_density_step(const Matrix& rho, double t, const FlowOptions& opt) {
  require(rho.allFinite(), ErrorKind::Numerical, "density flow: non-finite state at t=" + std::to_string(t));
  const double lo = eigenvalues_descending(rho).minCoeff();
  require(lo >= -opt.positivity_tol, ErrorKind::Numerical,
          "density flow: positivity breach (eigenvalue " + std::to_string(lo) + ") at t=" + std::to_string(t));
}

inline void check_pure_step(const Vector& x, double t, const FlowOptions& opt) {
  require(x.allFinite(), ErrorKind::Numerical, "pure flow: non-finite state at t=" + std::to_string(t));
  const double dn = std::abs(x.norm() - 1.0);
  require(dn <= opt.norm_tol, ErrorKind::Numerical,
          "pure flow: norm drift " + std::to_string(dn) + " at t=" + std::to_string(t));
}

inline Matrix renormalize_density(const Matrix& rho) {
  Matrix h = hermitian_part(rho);
  return h / h.trace().real();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Density and pure-state solvers

/// i d(rho)/dt = [D_rho f, rho] with RK4.
inline Trajectory evolve_density_direct(const StateFunction& f, const Matrix& rho0, double T, const SolverConfig& cfg,
                                        const FlowOptions& opt = {}) {
  require_hermitian(rho0, "evolve_density_direct");
  Trajectory tr;
  Recorder rec(tr, f.value, {}, opt.rep);
  auto rhs = [&](double, const Matrix& r) {
    const Matrix g = gradient(f, r);
    return Matrix(-kI * commutator(g, r));
  };
  const StepPlan plan = plan_steps(T, cfg.dt);
  Matrix rho = rho0;
  rec.density(0.0, rho);
  for (int s = 1; s <= plan.steps; ++s) {
    rho = rk4_step(rho, (s - 1) * plan.h, plan.h, rhs);
    if (cfg.renormalize) rho = detail::renormalize_density(rho);
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      detail::check_density_step(rho, s * plan.h, opt);
      rec.density(s * plan.h, rho);
    }
  }
  return tr;
}

inline Trajectory evolve_density_direct(const StateFunction& f, const DensityMatrix& rho0, double T,
                                        const SolverConfig& cfg, const FlowOptions& opt = {}) {
  return evolve_density_direct(f, rho0.mat(), T, cfg, opt);
}

/// i dx/dt = H(t, x) x for a caller-supplied Hamiltonian.
inline Trajectory evolve_pure(const std::function<Matrix(double, const Vector&)>& hamiltonian, const Vector& x0,
                              double T, const SolverConfig& cfg, std::function<double(const Vector&)> q_value = {},
                              const FlowOptions& opt = {}) {
  Trajectory tr;
  Recorder rec(tr, {}, std::move(q_value), opt.rep);
  auto rhs = [&](double t, const Vector& x) { return Vector(-kI * (hamiltonian(t, x) * x)); };
  const StepPlan plan = plan_steps(T, cfg.dt);
  Vector x = x0;
  rec.pure(0.0, x);
  for (int s = 1; s <= plan.steps; ++s) {
    x = rk4_step(x, (s - 1) * plan.h, plan.h, rhs);
    if (cfg.renormalize) x /= x.norm();
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      detail::check_pure_step(x, s * plan.h, opt);
      rec.pure(s * plan.h, x);
    }
  }
  return tr;
}

/// Linear evolution exp(-itH) x0 evaluated exactly at each sample time.
inline Trajectory evolve_linear_exact(const Matrix& H, const Vector& x0, const std::vector<double>& times,
                                      const FlowOptions& opt = {}) {
  const EigenSystem es = eigh_ordered(H);
  const Vector c = es.vectors.adjoint() * x0;
  Trajectory tr;
  Recorder rec(tr, {}, [&H](const Vector& x) { return x.dot(H * x).real(); }, opt.rep);
  for (double t : times) {
    Vector ph(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) ph(i) = std::exp(-kI * (t * es.values(i))) * c(i);
    rec.pure(t, es.vectors * ph);
  }
  return tr;
}

/// i dx/dt = sum_j dQ_j(F(x)) X_j x with F(x) = <x, X x>.
inline Trajectory solve_nls_direct(const LieRepresentation& rep, const ClassicalGenerator& Q, const Vector& x0,
                                   double T, const SolverConfig& cfg, const FlowOptions& opt = {}) {
  require(x0.size() == rep.dim(), ErrorKind::Shape, "solve_nls_direct: dimension mismatch");
  require(std::abs(x0.norm() - 1.0) <= default_tolerances().state_norm, ErrorKind::Normalization,
          "solve_nls_direct: initial vector is not normalized");
  FlowOptions o = opt;
  o.rep = &rep;
  auto H = [&](double, const Vector& x) { return generator_at(rep, Q, momentum_map(rep, x)); };
  return evolve_pure(H, x0, T, cfg, [&](const Vector& x) { return Q.value(momentum_map(rep, x)); }, o);
}

inline Trajectory solve_nls_direct(const LieRepresentation& rep, const ClassicalGenerator& Q, const PureState& x0,
                                   double T, const SolverConfig& cfg, const FlowOptions& opt = {}) {
  return solve_nls_direct(rep, Q, x0.vec(), T, cfg, opt);
}

/// Classical path sampled at every half step of the plan: entry 2s + m is
/// F(s*h + m*h/2).
inline std::vector<RealVector> classical_half_steps(const LieAlgebraSpec& alg, const ClassicalGenerator& Q,
                                                    const RealVector& F0, const StepPlan& plan) {
  std::vector<RealVector> out;
  out.reserve(static_cast<std::size_t>(2 * plan.steps + 1));
  RealVector F = F0;
  out.push_back(F);
  auto rhs = [&](double, const RealVector& y) { return classical_rhs(alg, Q, y); };
  const double hh = 0.5 * plan.h;
  for (int s = 0; s < 2 * plan.steps; ++s) {
    F = rk4_step(F, s * hh, hh, rhs);
    require(F.allFinite(), ErrorKind::Numerical, "classical flow: non-finite state");
    out.push_back(F);
  }
  return out;
}

/// RK4 step of y' = A(t) y where A is known at the start, middle and end.
template <class S>
S rk4_linear_step(const S& y, double h, const Matrix& a0, const Matrix& am, const Matrix& a1) {
  const S k1 = a0 * y;
  const S k2 = am * S(y + (0.5 * h) * k1);
  const S k3 = am * S(y + (0.5 * h) * k2);
  const S k4 = a1 * S(y + h * k3);
  return S(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Two-stage solution: first the coadjoint flow F(t) from F(0) = F(x0), then
/// the linear equation i dx/dt = X(dQ(F(t))) x. Throws when the momentum map
/// of x(t) departs from F(t) by more than consistency_tol.
inline Trajectory solve_nls_split(const LieRepresentation& rep, const ClassicalGenerator& Q, const Vector& x0, double T,
                                  const SolverConfig& cfg, double consistency_tol = 1e-7, const FlowOptions& opt = {}) {
  require(x0.size() == rep.dim(), ErrorKind::Shape, "solve_nls_split: dimension mismatch");
  require(std::abs(x0.norm() - 1.0) <= default_tolerances().state_norm, ErrorKind::Normalization,
          "solve_nls_split: initial vector is not normalized");
  FlowOptions o = opt;
  o.rep = &rep;
  const StepPlan plan = plan_steps(T, cfg.dt);
  const auto Fp = classical_half_steps(rep.algebra, Q, momentum_map(rep, x0), plan);
  auto A = [&](std::size_t i) { return Matrix(-kI * generator_at(rep, Q, Fp[i])); };

  Trajectory tr;
  Recorder rec(tr, {}, [&](const Vector& x) { return Q.value(momentum_map(rep, x)); }, o.rep);
  Vector x = x0;
  rec.pure(0.0, x);
  Matrix a0 = A(0);
  for (int s = 1; s <= plan.steps; ++s) {
    const auto i = static_cast<std::size_t>(2 * (s - 1));
    const Matrix am = A(i + 1), a1 = A(i + 2);
    x = rk4_linear_step(x, plan.h, a0, am, a1);
    a0 = a1;
    if (cfg.renormalize) x /= x.norm();
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      detail::check_pure_step(x, s * plan.h, o);
      const double gap = (momentum_map(rep, x) - Fp[i + 2]).cwiseAbs().maxCoeff();
      require(gap <= consistency_tol, ErrorKind::Numerical,
              "solve_nls_split: momentum map of the state departs from the classical path by " + std::to_string(gap));
      rec.pure(s * plan.h, x);
    }
  }
  return tr;
}

inline Trajectory solve_nls_split(const LieRepresentation& rep, const ClassicalGenerator& Q, const PureState& x0,
                                  double T, const SolverConfig& cfg, double consistency_tol = 1e-7) {
  return solve_nls_split(rep, Q, x0.vec(), T, cfg, consistency_tol);
}

struct Propagation {
  RealVector F_end;
  Matrix u;
};

/// Cocycle propagator u_Q(t, F): i du/dt = X(dQ(F(s))) u along the classical
/// path from F, u(0) = I. Negative t integrates backward.
inline Propagation propagate_cocycle(const LieRepresentation& rep, const ClassicalGenerator& Q, const RealVector& F0,
                                     double t, double dt) {
  const StepPlan plan = plan_steps(t, dt);
  const auto Fp = classical_half_steps(rep.algebra, Q, F0, plan);
  Matrix u = Matrix::Identity(rep.dim(), rep.dim());
  for (int s = 0; s < plan.steps; ++s) {
    const auto i = static_cast<std::size_t>(2 * s);
    u = rk4_linear_step(u, plan.h, Matrix(-kI * generator_at(rep, Q, Fp[i])),
                        Matrix(-kI * generator_at(rep, Q, Fp[i + 1])), Matrix(-kI * generator_at(rep, Q, Fp[i + 2])));
  }
  return {Fp.back(), u};
}

/// rho(t) = u rho0 u^dagger with the cocycle propagator started at F(rho0).
inline Trajectory quantum_flow_via_group(const LieRepresentation& rep, const ClassicalGenerator& Q, const Matrix& rho0,
                                         double T, const SolverConfig& cfg, const FlowOptions& opt = {}) {
  require(rho0.rows() == rep.dim(), ErrorKind::Shape, "quantum_flow_via_group: dimension mismatch");
  FlowOptions o = opt;
  o.rep = &rep;
  const StepPlan plan = plan_steps(T, cfg.dt);
  const auto Fp = classical_half_steps(rep.algebra, Q, momentum_map(rep, rho0), plan);
  auto A = [&](std::size_t i) { return Matrix(-kI * generator_at(rep, Q, Fp[i])); };
  Trajectory tr;
  Recorder rec(tr, [&](const Matrix& r) { return Q.value(momentum_map(rep, r)); }, {}, o.rep);
  Matrix u = Matrix::Identity(rep.dim(), rep.dim());
  rec.density(0.0, rho0);
  for (int s = 1; s <= plan.steps; ++s) {
    const auto i = static_cast<std::size_t>(2 * (s - 1));
    u = rk4_linear_step(u, plan.h, A(i), A(i + 1), A(i + 2));
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      const Matrix rho = u * rho0 * u.adjoint();
      detail::check_density_step(rho, s * plan.h, o);
      rec.density(s * plan.h, rho);
    }
  }
  return tr;
}

inline Trajectory quantum_flow_via_group(const LieRepresentation& rep, const ClassicalGenerator& Q,
                                         const DensityMatrix& rho0, double T, const SolverConfig& cfg) {
  return quantum_flow_via_group(rep, Q, rho0.mat(), T, cfg);
}

// ---------------------------------------------------------------------------
// Cocycles and gauges

/// f0(nu), required to commute with nu.
struct GaugeFunction {
  std::function<Matrix(const Matrix&)> map;
  std::string name;
};

inline GaugeFunction zero_gauge(int dim) {
  return {[dim](const Matrix&) { return Matrix::Zero(dim, dim).eval(); }, "zero"};
}

/// f0(nu) = block-diagonal part of D_nu f, which turns the propagator
/// Hamiltonian into the full gradient.
inline GaugeFunction block_gauge(const StateFunction& f) {
  return {[f](const Matrix& nu) { return block_projection(spectral_decomposition(nu), gradient(f, nu)); }, "block"};
}

struct CocycleResult {
  Trajectory trajectory;
  std::vector<Matrix> propagators;
};

/// i du/dt = (q_nu(D_nu f) + f0(nu)) u with nu = u rho0 u^dagger.
inline CocycleResult evolve_cocycle(const StateFunction& f, const Matrix& rho0, double T, const GaugeFunction& gauge,
                                    const SolverConfig& cfg, const FlowOptions& opt = {},
                                    const Tolerances& tol = default_tolerances()) {
  require_hermitian(rho0, "evolve_cocycle");
  const int d = static_cast<int>(rho0.rows());
  auto hamiltonian = [&](const Matrix& nu) {
    const auto dec = spectral_decomposition(nu, tol.cluster);
    const Matrix g = gradient(f, nu);
    return Matrix(q_projection(dec, g) + gauge.map(nu));
  };
  auto rhs = [&](double, const Matrix& u) {
    const Matrix nu = hermitian_part(u * rho0 * u.adjoint());
    return Matrix(-kI * (hamiltonian(nu) * u));
  };
  CocycleResult out;
  Recorder rec(out.trajectory, f.value, {}, opt.rep);
  const StepPlan plan = plan_steps(T, cfg.dt);
  Matrix u = Matrix::Identity(d, d);
  auto record = [&](double t) {
    const Matrix nu = hermitian_part(u * rho0 * u.adjoint());
    const Matrix g0 = gauge.map(nu);
    const double gc = commutator(g0, nu).norm();
    require(gc <= tol.gauge_commutator, ErrorKind::Invariant,
            "evolve_cocycle: gauge term does not commute with the state (" + std::to_string(gc) + ")");
    rec.density(t, nu);
    out.propagators.push_back(u);
  };
  record(0.0);
  for (int s = 1; s <= plan.steps; ++s) {
    u = rk4_step(u, (s - 1) * plan.h, plan.h, rhs);
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      detail::check_density_step(hermitian_part(u * rho0 * u.adjoint()), s * plan.h, opt);
      record(s * plan.h);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heisenberg picture

/// tau^t(field)(F) = u^dagger field(phi^t F) u with u = u_Q(t, F).
inline Matrix heisenberg_transport(const LieRepresentation& rep, const ClassicalGenerator& Q,
                                   const ObservableField& field, double t, const RealVector& F,
                                   const SolverConfig& cfg) {
  const Propagation p = propagate_cocycle(rep, Q, F, t, cfg.dt);
  return p.u.adjoint() * field(p.F_end) * p.u;
}

// ---------------------------------------------------------------------------
// Restricted classical projection on Weyl-Heisenberg orbits

/// The Hamiltonian h(x) = Tr(W(x) rho W(x)^dagger H) on displacements
/// x = (q, p) of a centered reference state, with Hamilton's equations
/// dq_j/dt = dh/dp_j / lambda, dp_j/dt = -dh/dq_j / lambda.
class RestrictedProjection {
 public:
  RestrictedProjection(const LieRepresentation& rep, const Matrix& H, const Matrix& rho_ref, double center_tol = 1e-8)
      : rep_(rep), weyl_(rep), H_(H) {
    require(rep.wh.has_value(), ErrorKind::Domain, "restricted projection: representation is not Weyl-Heisenberg");
    require_hermitian(H, "restricted projection Hamiltonian");
    require(H.rows() == rep.dim() && rho_ref.rows() == rep.dim(), ErrorKind::Shape,
            "restricted projection: dimension mismatch");
    pairs_ = rep.wh->pairs;
    lambda_ = rep.wh->lambda;
    const RealVector F = momentum_map(rep, rho_ref);
    for (int j = 0; j < 2 * pairs_; ++j)
      require(std::abs(F(j)) <= center_tol, ErrorKind::Domain,
              "restricted projection: reference state is not centered (component " + std::to_string(j) + " = " +
                  std::to_string(F(j)) + ")");
    const EigenSystem es = eigh_ordered(rho_ref);
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
      if (es.values(i) > default_tolerances().drop_weight) {
        weights_.push_back(es.values(i));
        vectors_.push_back(es.vectors.col(i));
      }
    for (int j = 0; j < pairs_; ++j) G_.push_back(-rep.generators[static_cast<std::size_t>(pairs_ + j)]);
    for (int j = 0; j < pairs_; ++j) G_.push_back(rep.generators[static_cast<std::size_t>(j)]);
  }

  int coords() const { return 2 * pairs_; }
  double tail_guard = 1e-8;

  double hamiltonian(const RealVector& x) const {
    double h = 0.0;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      const Vector y = displaced(x, i);
      h += weights_[i] * y.dot(H_ * y).real();
    }
    return h;
  }

  /// dh/dx_j = Tr(rho_x (-i lambda)[G_j, H]) with G_j = sum_k X_k S_kj.
  RealVector gradient(const RealVector& x) const {
    RealVector g = RealVector::Zero(coords());
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      const Vector y = displaced(x, i);
      const Vector hy = H_ * y;
      for (int j = 0; j < coords(); ++j)
        g(j) += weights_[i] * 2.0 * lambda_ * (G_[static_cast<std::size_t>(j)] * y).dot(hy).imag();
    }
    return g;
  }

  RealVector velocity(const RealVector& x) const {
    const RealVector g = gradient(x);
    RealVector v(coords());
    for (int j = 0; j < pairs_; ++j) {
      v(j) = g(j + pairs_) / lambda_;
      v(j + pairs_) = -g(j) / lambda_;
    }
    return v;
  }

  ClassicalTrajectory flow(const RealVector& x0, double T, const SolverConfig& cfg) const {
    require(x0.size() == coords(), ErrorKind::Shape, "restricted flow: expected 2n coordinates");
    ClassicalTrajectory tr;
    auto record = [&](double t, const RealVector& x) {
      tr.times.push_back(t);
      tr.F.push_back(x);
      tr.Q_values.push_back(hamiltonian(x));
      tr.casimir.push_back(0.0);
    };
    const StepPlan plan = plan_steps(T, cfg.dt);
    RealVector x = x0;
    record(0.0, x);
    auto rhs = [&](double, const RealVector& y) { return velocity(y); };
    for (int s = 1; s <= plan.steps; ++s) {
      x = rk4_step(x, (s - 1) * plan.h, plan.h, rhs);
      if (detail::sample_due(s, plan.steps, cfg.sample_stride)) record(s * plan.h, x);
    }
    return tr;
  }

  /// h on a (q, p) grid for a single pair; rows follow qs, columns ps.
  RealMatrix grid_values(const std::vector<double>& qs, const std::vector<double>& ps) const {
    require(pairs_ == 1, ErrorKind::Domain, "grid_values: single pair only");
    RealMatrix out(static_cast<Eigen::Index>(qs.size()), static_cast<Eigen::Index>(ps.size()));
    for (std::size_t i = 0; i < qs.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hamiltonian(RealVector{{qs[i], ps[j]}});
    return out;
  }

 private:
  Vector displaced(const RealVector& x, std::size_t i) const {
    const Vector y = weyl_.apply(x, vectors_[i]);
    const double tail = tail_mass(rep_, y);
    require(tail <= tail_guard, ErrorKind::Numerical,
            "restricted projection: displaced state leaves the trusted subspace (tail " + std::to_string(tail) + ")");
    return y;
  }

  const LieRepresentation& rep_;
  WeylDisplacer weyl_;
  Matrix H_;
  int pairs_ = 1;
  double lambda_ = 1.0;
  std::vector<double> weights_;
  std::vector<Vector> vectors_;
  std::vector<Matrix> G_;
};

/// Restricted flow of H from the displacement x0 of rho_ref.
inline ClassicalTrajectory restricted_classical_projection(const LieRepresentation& rep, const Matrix& H,
                                                           const Matrix& rho_ref, const RealVector& x0, double T,
                                                           const SolverConfig& cfg) {
  RestrictedProjection rp(rep, H, rho_ref);
  rp.tail_guard = cfg.tail_guard;
  return rp.flow(x0, T, cfg);
}

/// Smeared potential through the displaced reference state, Tr(rho_x V(Q)).
inline double smeared_potential_displaced(const LieRepresentation& rep, const Matrix& rho_ref,
                                          const std::function<double(double)>& V, double q) {
  require(rep.wh && rep.wh->pairs == 1, ErrorKind::Domain, "smeared potential: single-pair WH representation only");
  const Matrix VQ = hermitian_function(rep.generators[0], V);
  const Matrix W = weyl_displacement(rep, RealVector{{q, 0.0}});
  return trace_product_real(W * rho_ref * W.adjoint(), VQ);
}

/// The same quantity as Tr(rho V(Q + q)).
inline double smeared_potential_shifted(const LieRepresentation& rep, const Matrix& rho_ref,
                                        const std::function<double(double)>& V, double q) {
  require(rep.wh && rep.wh->pairs == 1, ErrorKind::Domain, "smeared potential: single-pair WH representation only");
  const Matrix shifted = rep.generators[0] + q * Matrix::Identity(rep.dim(), rep.dim());
  return trace_product_real(rho_ref, hermitian_function(shifted, V));
}

/// H = sum_j P_j^2 / (2 m_j) + sum_j V_j(Q_j) on a WH representation.
inline Matrix wh_hamiltonian(const LieRepresentation& rep, const std::vector<double>& masses,
                             const std::vector<std::function<double(double)>>& V) {
  require(rep.wh.has_value(), ErrorKind::Domain, "wh_hamiltonian: representation is not Weyl-Heisenberg");
  const int n = rep.wh->pairs;
  require(static_cast<int>(masses.size()) == n && static_cast<int>(V.size()) == n, ErrorKind::Shape,
          "wh_hamiltonian: one mass and one potential per pair");
  Matrix H = Matrix::Zero(rep.dim(), rep.dim());
  for (int j = 0; j < n; ++j) {
    const Matrix& P = rep.generators[static_cast<std::size_t>(n + j)];
    H += (P * P) / (2.0 * masses[static_cast<std::size_t>(j)]);
    if (V[static_cast<std::size_t>(j)]) H += hermitian_function(rep.generators[static_cast<std::size_t>(j)], V[static_cast<std::size_t>(j)]);
  }
  return hermitian_part(H);
}

// ---------------------------------------------------------------------------
// Tangent circles on the coherent-state orbit

struct IllustrationResult {
  double alpha = 1.0;
  Complex z0;
  double h0 = 0.0;  // restricted Hamiltonian at the start
  double tail = 0.0;
  std::vector<double> times;
  std::vector<Complex> restricted_closed;
  std::vector<Complex> true_closed;
  std::vector<Complex> restricted_numeric;
  std::vector<Complex> numeric;
  Trajectory numeric_trajectory;

  double max_numeric_vs_true() const {
    double w = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) w = std::max(w, std::abs(numeric[i] - true_closed[i]));
    return w;
  }
  double max_restricted_vs_closed() const {
    double w = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) w = std::max(w, std::abs(restricted_numeric[i] - restricted_closed[i]));
    return w;
  }
};

/// Weight of a coherent state with mean occupation nbar above the first
/// `levels` Fock levels.
inline double coherent_tail(double nbar, int levels) {
  // Summed directly over the tail so tiny values keep their relative precision.
  double term = std::exp(-nbar);
  for (int k = 0; k < levels; ++k) term *= nbar / (k + 1);
  double tail = 0.0;
  for (int k = levels; k < levels + 400 && term > 0.0; ++k) {
    tail += term;
    term *= nbar / (k + 1);
  }
  return tail;
}

/// H = alpha P_vac evolved from the coherent state at z0 = q - ip (lambda = 1),
/// sampled as <Q - iP>, next to the restricted flow of the same Hamiltonian
/// and both closed forms.
inline IllustrationResult illustration_tangent_circles(double alpha, Complex z0, double T, int levels,
                                                       const SolverConfig& cfg, double tail_limit = 1e-12) {
  require(std::isfinite(alpha) && std::isfinite(z0.real()) && std::isfinite(z0.imag()), ErrorKind::Domain,
          "illustration: non-finite parameters");
  IllustrationResult out;
  out.alpha = alpha;
  out.z0 = z0;
  const double nz = std::norm(z0);
  out.tail = coherent_tail(0.5 * nz, levels);
  require(out.tail <= tail_limit, ErrorKind::Numerical,
          "illustration: coherent tail " + std::to_string(out.tail) + " above the guard; raise the Fock dimension");
  out.h0 = alpha * std::exp(-0.5 * nz);

  const LieRepresentation rep = builtin_wh_fock(1, levels, 1.0);
  const Vector vac = fock_vacuum(rep);
  const RealVector x0{{z0.real(), -z0.imag()}};
  const Vector psi0 = WeylDisplacer(rep).apply(x0, vac);
  Matrix H = Matrix::Zero(rep.dim(), rep.dim());
  H(0, 0) = alpha;

  const Matrix& Qm = rep.generators[0];
  const Matrix& Pm = rep.generators[1];
  const Matrix zop = Qm - kI * Pm;
  FlowOptions opt;
  opt.rep = &rep;
  out.numeric_trajectory = evolve_pure([&H](double, const Vector&) { return H; }, psi0, T, cfg,
                                       [&H](const Vector& x) { return x.dot(H * x).real(); }, opt);

  RestrictedProjection rp(rep, H, vac * vac.adjoint());
  rp.tail_guard = cfg.tail_guard;
  const ClassicalTrajectory rflow = rp.flow(x0, T, cfg);

  const double ratio = out.h0 / alpha;
  for (std::size_t s = 0; s < out.numeric_trajectory.size(); ++s) {
    const double t = out.numeric_trajectory.times[s];
    out.times.push_back(t);
    out.restricted_closed.push_back(std::exp(-kI * (out.h0 * t)) * z0);
    out.true_closed.push_back((1.0 - ratio) * z0 + ratio * std::exp(-kI * (alpha * t)) * z0);
    const Vector& x = out.numeric_trajectory.pure[s];
    out.numeric.push_back(x.dot(zop * x));
    const RealVector& r = rflow.F[s];
    out.restricted_numeric.emplace_back(r(0), -r(1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ehrenfest relations

struct EhrenfestReport {
  std::vector<double> times;
  std::vector<double> r1, r2, classical_gap;
  double max_r1 = 0.0, max_r2 = 0.0, max_gap = 0.0;
};

/// Centered-difference residuals of d<Q_j>/dt = <P_j>/(m_j lambda) and
/// d<P_j>/dt = -<dV_j(Q_j)>/lambda, plus the gap |<dV(Q)> - dV(<Q>)|.
inline EhrenfestReport ehrenfest_residual(const LieRepresentation& rep, const Trajectory& tr,
                                          const std::vector<double>& masses,
                                          const std::vector<std::function<double(double)>>& dV) {
  require(rep.wh.has_value(), ErrorKind::Domain, "ehrenfest_residual: representation is not Weyl-Heisenberg");
  const int n = rep.wh->pairs;
  const double lam = rep.wh->lambda;
  require(static_cast<int>(masses.size()) == n && static_cast<int>(dV.size()) == n, ErrorKind::Shape,
          "ehrenfest_residual: one mass and one force per pair");
  require(tr.kind != Trajectory::StateKind::None && tr.size() >= 3, ErrorKind::Domain,
          "ehrenfest_residual: need a state trajectory with at least three samples");
  std::vector<Matrix> dVop;
  for (int j = 0; j < n; ++j)
    dVop.push_back(hermitian_function(rep.generators[static_cast<std::size_t>(j)], dV[static_cast<std::size_t>(j)]));
  auto expect = [&](std::size_t s, const Matrix& op) {
    if (tr.kind == Trajectory::StateKind::Pure) {
      const Vector& x = tr.pure[s];
      return x.dot(op * x).real() / x.squaredNorm();
    }
    return trace_product_real(tr.density[s], op);
  };
  EhrenfestReport rep_out;
  for (std::size_t s = 1; s + 1 < tr.size(); ++s) {
    const double dt = tr.times[s + 1] - tr.times[s - 1];
    double r1 = 0.0, r2 = 0.0, gap = 0.0;
    for (int j = 0; j < n; ++j) {
      const Matrix& Qj = rep.generators[static_cast<std::size_t>(j)];
      const Matrix& Pj = rep.generators[static_cast<std::size_t>(n + j)];
      const double dq = (expect(s + 1, Qj) - expect(s - 1, Qj)) / dt;
      const double dp = (expect(s + 1, Pj) - expect(s - 1, Pj)) / dt;
      const double force = expect(s, dVop[static_cast<std::size_t>(j)]);
      r1 = std::max(r1, std::abs(dq - expect(s, Pj) / (masses[static_cast<std::size_t>(j)] * lam)));
      r2 = std::max(r2, std::abs(dp + force / lam));
      gap = std::max(gap, std::abs(force - dV[static_cast<std::size_t>(j)](expect(s, Qj))));
    }
    rep_out.times.push_back(tr.times[s]);
    rep_out.r1.push_back(r1);
    rep_out.r2.push_back(r2);
    rep_out.classical_gap.push_back(gap);
    rep_out.max_r1 = std::max(rep_out.max_r1, r1);
    rep_out.max_r2 = std::max(rep_out.max_r2, r2);
    rep_out.max_gap = std::max(rep_out.max_gap, gap);
  }
  return rep_out;
}

// ---------------------------------------------------------------------------
// Homogeneous two-argument observables

/// a(x, y*): linear-homogeneous in x and in y*. The second argument is passed
/// as the vector y; it enters through inner products (y, .).
struct WeinbergObservable {
  std::function<Complex(const Vector&, const Vector&)> eval;
  std::string description;
  Complex operator()(const Vector& x, const Vector& y) const { return eval(x, y); }
};

/// h(x, y*) = (y, x) Q(f(x, y*)) with f_j = (y, X_j x) / (y, x).
inline WeinbergObservable weinberg_observable(const LieRepresentation& rep, const ClassicalGenerator& Q) {
  WeinbergObservable w;
  w.eval = [rep, Q](const Vector& x, const Vector& y) {
    const Complex yx = y.dot(x);
    Vector f(rep.algebra.n);
    for (int j = 0; j < rep.algebra.n; ++j) f(j) = y.dot(rep.generators[static_cast<std::size_t>(j)] * x) / yx;
    return yx * Q.value(f);
  };
  w.description = "n*Q(f)";
  return w;
}

/// Largest violation of the two homogeneity laws and of reality on the
/// diagonal, probed with the scalar c.
inline double homogeneity_defect(const WeinbergObservable& a, const Vector& x, const Vector& y, Complex c) {
  const Complex base = a(x, y);
  const double s = 1.0 + std::abs(base);
  const double d1 = std::abs(a(Vector(c * x), y) - c * base) / s;
  const double d2 = std::abs(a(x, Vector(std::conj(c) * y)) - c * base) / s;
  const double d3 = std::abs(a(x, x).imag()) / (1.0 + std::abs(a(x, x)));
  return std::max({d1, d2, d3});
}

inline void check_homogeneity(const WeinbergObservable& a, const Vector& x, double tol = 1e-9) {
  Vector y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += Complex(0.05 * ((i % 3) - 1), 0.03 * ((i % 2) ? 1 : -1));
  const double d = homogeneity_defect(a, x, y, Complex(0.7, 0.4));
  require(d <= tol, ErrorKind::Domain, "weinberg observable is not homogeneous (defect " + std::to_string(d) + ")");
}

/// d h / d x* at y = x: sum_j dQ_j X_j x + (Q - sum_j dQ_j F_j) x.
inline Vector weinberg_rhs(const LieRepresentation& rep, const ClassicalGenerator& Q, const Vector& x) {
  const RealVector F = momentum_map(rep, x);
  const RealVector g = Q.gradient(F);
  const double alpha = Q.value(F) - g.dot(F);
  return generator_at(rep, Q, F) * x + alpha * x;
}

struct WeinbergBridge {
  Trajectory weinberg;
  std::vector<double> beta;
  std::vector<Vector> mapped;
};

/// Integrates i dx/dt = D*_x h together with d(beta)/dt = Q - sum dQ_j F_j;
/// exp(i beta) x(t) then solves the nonlinear Schroedinger equation.
inline WeinbergBridge weinberg_gauge_bridge(const LieRepresentation& rep, const ClassicalGenerator& Q, const Vector& x0,
                                            double T, const SolverConfig& cfg) {
  require(x0.size() == rep.dim(), ErrorKind::Shape, "weinberg_gauge_bridge: dimension mismatch");
  check_homogeneity(weinberg_observable(rep, Q), x0);
  const Eigen::Index d = x0.size();
  auto rhs = [&](double, const Vector& z) {
    const Vector x = z.head(d);
    const RealVector F = momentum_map(rep, x);
    const RealVector g = Q.gradient(F);
    Vector out(d + 1);
    out.head(d) = -kI * (generator_at(rep, Q, F) * x + (Q.value(F) - g.dot(F)) * x);
    out(d) = Q.value(F) - g.dot(F);
    return out;
  };
  WeinbergBridge out;
  FlowOptions opt;
  opt.rep = &rep;
  Recorder rec(out.weinberg, {}, [&](const Vector& x) { return Q.value(momentum_map(rep, x)); }, &rep);
  Vector z(d + 1);
  z.head(d) = x0;
  z(d) = 0.0;
  auto record = [&](double t) {
    const Vector x = z.head(d);
    const double beta = z(d).real();
    rec.pure(t, x);
    out.beta.push_back(beta);
    out.mapped.push_back(std::exp(kI * beta) * x);
  };
  record(0.0);
  const StepPlan plan = plan_steps(T, cfg.dt);
  for (int s = 1; s <= plan.steps; ++s) {
    z = rk4_step(z, (s - 1) * plan.h, plan.h, rhs);
    if (detail::sample_due(s, plan.steps, cfg.sample_stride)) {
      detail::check_pure_step(z.head(d), s * plan.h, opt);
      record(s * plan.h);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear Schroedinger equation on a 1D grid

/// Local nonlinearity K with derivative K'. The wave equation is
/// i dpsi/dt = H0 psi + eps K'(|psi|^2) psi.
struct GridNonlinearity {
  std::function<double(double)> K;
  std::function<double(double)> dK;
  std::string name;

  /// K(s) = s^(alpha+1)/(alpha+1), K'(s) = s^alpha.
  static GridNonlinearity power(double alpha) {
    require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::Config, "grid nls: exponent must be positive");
    return {[alpha](double s) { return std::pow(std::max(s, 0.0), alpha + 1.0) / (alpha + 1.0); },
            [alpha](double s) { return std::pow(std::max(s, 0.0), alpha); }, "power"};
  }

  static GridNonlinearity kernel(std::function<double(double)> K, std::function<double(double)> dK) {
    return {std::move(K), std::move(dK), "kernel"};
  }
};

/// -(1/2m) second difference with spacing dx and Dirichlet ends.
inline Matrix discrete_laplacian_hamiltonian(int points, double dx, double mass = 1.0) {
  require(points >= 2 && dx > 0.0 && mass > 0.0, ErrorKind::Config, "grid: invalid size, spacing or mass");
  Matrix H = Matrix::Zero(points, points);
  const double c = 1.0 / (2.0 * mass * dx * dx);
  for (int k = 0; k < points; ++k) {
    H(k, k) = 2.0 * c;
    if (k + 1 < points) {
      H(k, k + 1) = -c;
      H(k + 1, k) = -c;
    }
  }
  return H;
}

/// E(psi) = <psi, H0 psi> + eps sum_k K(|psi_k|^2) on the counting measure.
inline double nls_energy(const Matrix& H0, double eps, const GridNonlinearity& nl, const Vector& psi) {
  double e = psi.dot(H0 * psi).real();
  for (Eigen::Index k = 0; k < psi.size(); ++k) e += eps * nl.K(std::norm(psi(k)));
  return e;
}

/// The same energy as a functional of density matrices, Tr(rho H0) +
/// eps sum_k K(rho_kk), with gradient H0 + eps diag(K'(rho_kk)).
inline StateFunction nls_grid_functional(const Matrix& H0, double eps, const GridNonlinearity& nl) {
  StateFunction f;
  f.kind = StateFunction::Kind::GridFunctional;
  f.value = [H0, eps, nl](const Matrix& rho) {
    double e = trace_product_real(rho, H0);
    for (Eigen::Index k = 0; k < rho.rows(); ++k) e += eps * nl.K(rho(k, k).real());
    return e;
  };
  f.grad = [H0, eps, nl](const Matrix& rho) {
    Matrix g = H0;
    for (Eigen::Index k = 0; k < rho.rows(); ++k) g(k, k) += eps * nl.dK(rho(k, k).real());
    return g;
  };
  f.description = "grid_nls";
  return f;
}

inline Trajectory nls_grid_evolve(const Matrix& H0, double eps, const GridNonlinearity& nl, const Vector& psi0,
                                  double T, const SolverConfig& cfg, const FlowOptions& opt = {}) {
  require_hermitian(H0, "nls_grid_evolve");
  require(psi0.size() == H0.rows(), ErrorKind::Shape, "nls_grid_evolve: dimension mismatch");
  require(std::abs(psi0.norm() - 1.0) <= default_tolerances().state_norm, ErrorKind::Normalization,
          "nls_grid_evolve: initial wave function is not normalized");
  auto H = [&](double, const Vector& x) {
    Matrix h = H0;
    for (Eigen::Index k = 0; k < x.size(); ++k) h(k, k) += eps * nl.dK(std::norm(x(k)));
    return h;
  };
  return evolve_pure(H, psi0, T, cfg, [&](const Vector& x) { return nls_energy(H0, eps, nl, x); }, opt);
}

}  // namespace eqmflow

// meanfield.hpp - mean-field Hamiltonians on n copies of a site and the
// finite-size approach of their site marginals to the nonlinear flow.

#pragma once

#include <algorithm>
#include <vector>

#include "eqmflow/dynamics.hpp"

namespace eqmflow {

struct MeanFieldProblem {
  LieRepresentation site_rep;
  ClassicalGenerator Q;
  int sites = 1;
  Matrix rho0;  // site state; a rank-one rho0 is evolved as a vector
  Eigen::Index budget = 4096;
};

/// (1/n) sum_p X at site p.
inline Matrix site_average(const Matrix& x, int n, Eigen::Index budget = 4096) {
  Matrix s = embed_at_site(x, 1, n, budget);
  for (int p = 2; p <= n; ++p) s += embed_at_site(x, p, n, budget);
  return s / static_cast<double>(n);
}

/// Average over the distinct orderings of the factors x_{j1} ... x_{jk}.
inline Matrix symmetrized_product(const std::vector<Matrix>& xs, const std::vector<int>& powers, Eigen::Index dim) {
  std::vector<int> factors;
  for (std::size_t j = 0; j < powers.size(); ++j) factors.insert(factors.end(), static_cast<std::size_t>(powers[j]), static_cast<int>(j));
  if (factors.empty()) return Matrix::Identity(dim, dim);
  std::sort(factors.begin(), factors.end());
  Matrix total = Matrix::Zero(dim, dim);
  int count = 0;
  do {
    Matrix prod = xs[static_cast<std::size_t>(factors.front())];
    for (std::size_t i = 1; i < factors.size(); ++i) prod = prod * xs[static_cast<std::size_t>(factors[i])];
    total += prod;
    ++count;
  } while (std::next_permutation(factors.begin(), factors.end()));
  return total / static_cast<double>(count);
}

/// H = n Q_sym(Xbar_1, ..., Xbar_m) with Xbar_j the site average of X_j.
inline Matrix build_local_hamiltonian(const MeanFieldProblem& p) {
  require(p.sites >= 1, ErrorKind::Config, "meanfield: sites must be >= 1");
  require(p.Q.arity() == p.site_rep.algebra.n, ErrorKind::Shape, "meanfield: generator arity does not match the algebra");
  const Eigen::Index dim = checked_power(p.site_rep.dim(), p.sites, p.budget);
  std::vector<Matrix> bars;
  for (const auto& x : p.site_rep.generators) bars.push_back(site_average(x, p.sites, p.budget));
  Matrix H = Matrix::Zero(dim, dim);
  for (const auto& t : p.Q.terms())
    if (t.coef != 0.0) H += t.coef * symmetrized_product(bars, t.powers, dim);
  return hermitian_part(static_cast<double>(p.sites) * H);
}

struct MeanFieldEvolution {
  std::vector<double> times;
  std::vector<Matrix> marginals;  // site 1
  std::vector<double> energies;   // Tr(rho_n(t) H)
};

namespace detail {
inline bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0)) return false;
  return true;
}
}  // namespace detail

/// Evolves rho0^(x)n under exp(-itH) and reads the site-1 marginal.
inline MeanFieldEvolution exact_meanfield_evolve(const MeanFieldProblem& p, const std::vector<double>& times) {
  const Matrix H = build_local_hamiltonian(p);
  const int d = p.site_rep.dim();
  require(p.rho0.rows() == d, ErrorKind::Shape, "meanfield: initial state has the wrong size");
  const EigenSystem site = eigh_ordered(hermitian_part(p.rho0));
  const bool pure = site.values.size() > 1 ? std::abs(site.values(1)) <= 1e-12 : true;

  // Spectral form of H; a diagonal H (commuting site terms) needs no solver.
  Matrix V;
  RealVector E;
  const bool diag = detail::is_diagonal(H);
  if (diag) {
    E = H.diagonal().real();
  } else {
    const EigenSystem es = eigh_ordered(H);
    V = es.vectors;
    E = es.values;
  }
  auto phases = [&](double t) {
    Vector ph(E.size());
    for (Eigen::Index i = 0; i < E.size(); ++i) ph(i) = std::exp(-kI * (t * E(i)));
    return ph;
  };

  MeanFieldEvolution out;
  if (pure) {
    const Vector x = site.vectors.col(0);
    Vector psi = x;
    for (int s = 1; s < p.sites; ++s) psi = kron(psi, x);
    const Vector c = diag ? psi : Vector(V.adjoint() * psi);
    for (double t : times) {
      const Vector ct = phases(t).cwiseProduct(c);
      const Vector pt = diag ? ct : Vector(V * ct);
      out.times.push_back(t);
      out.marginals.push_back(site_marginal(pt, d, p.sites, 1));
      out.energies.push_back(pt.dot(H * pt).real());
    }
    return out;
  }
  Matrix rho = p.rho0;
  for (int s = 1; s < p.sites; ++s) rho = kron(rho, p.rho0);
  const Matrix r0 = diag ? rho : Matrix(V.adjoint() * rho * V);
  for (double t : times) {
    const Vector ph = phases(t);
    const Matrix rt_e = ph.asDiagonal() * r0 * ph.conjugate().asDiagonal();
    const Matrix rt = diag ? rt_e : Matrix(V * rt_e * V.adjoint());
    const Eigen::Index right = rt.rows() / d;
    out.times.push_back(t);
    out.marginals.push_back(partial_trace(rt, d, static_cast<int>(right), Keep::A));
    out.energies.push_back(trace_product_real(rt, H));
  }
  return out;
}

struct MeanFieldScanRow {
  int n;
  double t;
  double error;  // trace norm
};

struct MeanFieldScan {
  std::vector<MeanFieldScanRow> rows;
  std::vector<int> sizes;
  std::vector<double> max_error;  // per size

  std::string csv() const {
    std::string s = "n,t,error_trace_norm\n";
    for (const auto& r : rows) s += std::to_string(r.n) + "," + format_double(r.t) + "," + format_double(r.error) + "\n";
    return s;
  }
};

/// error(n) = max over samples of || marginal_n(t) - rho_EQM(t) ||_1 where
/// rho_EQM comes from the group-propagator flow of the site system.
inline MeanFieldScan meanfield_error_scan(const MeanFieldProblem& base, const std::vector<int>& sizes, double T,
                                          int samples, const SolverConfig& cfg) {
  require(samples >= 1, ErrorKind::Config, "meanfield: samples must be >= 1");
  const StepPlan plan = plan_steps(T, cfg.dt);
  require(plan.steps % samples == 0, ErrorKind::Config, "meanfield: the step count must be a multiple of samples");
  SolverConfig c = cfg;
  c.sample_stride = plan.steps / samples;
  const Trajectory eqm = quantum_flow_via_group(base.site_rep, base.Q, base.rho0, T, c);

  MeanFieldScan scan;
  for (int n : sizes) {
    MeanFieldProblem p = base;
    p.sites = n;
    const MeanFieldEvolution ev = exact_meanfield_evolve(p, eqm.times);
    double worst = 0.0;
    for (std::size_t s = 0; s < ev.times.size(); ++s) {
      const double e = trace_norm_hermitian(ev.marginals[s] - eqm.density[s]);
      scan.rows.push_back({n, ev.times[s], e});
      worst = std::max(worst, e);
    }
    scan.sizes.push_back(n);
    scan.max_error.push_back(worst);
  }
  return scan;
}

}  // namespace eqmflow

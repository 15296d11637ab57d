// poisson.hpp - state functions, their gradients, the Poisson bracket,
// Hamiltonian vector fields and the Kahler forms on state orbits.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "eqmflow/state.hpp"

namespace eqmflow {

/// A real function on density matrices with an optional analytic gradient.
///
/// Evaluators take the raw matrix so that finite-difference probes slightly
/// off the state space are allowed.
struct StateFunction {
  enum class Kind { Linear, Pullback, GridFunctional, Custom };

  Kind kind = Kind::Custom;
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> grad;  // empty: finite differences
  std::optional<Matrix> linear_op;             // set for Kind::Linear
  std::string description;

  double operator()(const Matrix& nu) const { return value(nu); }
  double operator()(const DensityMatrix& nu) const { return value(nu.mat()); }
  bool has_gradient() const { return static_cast<bool>(grad); }
};

/// h_a(nu) = Tr(nu a).
inline StateFunction linear_function(const Matrix& a) {
  require_hermitian(a, "linear_function");
  StateFunction f;
  f.kind = StateFunction::Kind::Linear;
  const Matrix h = hermitian_part(a);
  f.linear_op = h;
  f.value = [h](const Matrix& nu) { return trace_product_real(nu, h); };
  f.grad = [h](const Matrix&) { return h; };
  f.description = "linear";
  return f;
}

inline StateFunction constant_function(double c, int dim) {
  StateFunction f;
  f.kind = StateFunction::Kind::Custom;
  f.value = [c](const Matrix&) { return c; };
  f.grad = [dim](const Matrix&) { return Matrix::Zero(dim, dim).eval(); };
  f.description = "constant";
  return f;
}

inline StateFunction custom_function(std::function<double(const Matrix&)> value,
                                     std::function<Matrix(const Matrix&)> grad = {},
                                     std::string description = "custom") {
  StateFunction f;
  f.kind = StateFunction::Kind::Custom;
  f.value = std::move(value);
  f.grad = std::move(grad);
  f.description = std::move(description);
  return f;
}

struct GradientOptions {
  double step = default_tolerances().fd_step;
  /// Probe only the traceless directions. The full basis is the default
  /// because gradients of non-affine functions have a trace part.
  bool traceless_only = false;
};

/// Central differences along an orthonormal Hermitian basis.
inline Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f, const Matrix& nu,
                                         const GradientOptions& opt = {}) {
  const int d = static_cast<int>(nu.rows());
  const auto basis = hermitian_basis(d);
  Matrix g = Matrix::Zero(d, d);
  const std::size_t count = opt.traceless_only ? basis.size() - 1 : basis.size();
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix& b = basis[i];
    const double fp = f(nu + opt.step * b);
    const double fm = f(nu - opt.step * b);
    require(std::isfinite(fp) && std::isfinite(fm), ErrorKind::Numerical,
            "gradient: evaluator returned a non-finite value");
    g += ((fp - fm) / (2.0 * opt.step)) * b;
  }
  return g;
}

inline Matrix gradient(const StateFunction& f, const Matrix& nu, const GradientOptions& opt = {}) {
  require_square(nu, "gradient");
  if (f.grad) {
    Matrix g = f.grad(nu);
    require(g.rows() == nu.rows() && g.cols() == nu.cols(), ErrorKind::Shape, "gradient: wrong gradient shape");
    require(g.allFinite(), ErrorKind::Numerical, "gradient: non-finite analytic gradient");
    return g;
  }
  require(static_cast<bool>(f.value), ErrorKind::Domain, "gradient: function has no evaluator");
  return finite_difference_gradient(f.value, nu, opt);
}

inline Matrix gradient(const StateFunction& f, const DensityMatrix& nu, const GradientOptions& opt = {}) {
  return gradient(f, nu.mat(), opt);
}

inline StateFunction sum(const StateFunction& f, const StateFunction& h) {
  StateFunction s;
  s.value = [f, h](const Matrix& nu) { return f.value(nu) + h.value(nu); };
  if (f.grad && h.grad) s.grad = [f, h](const Matrix& nu) { return (f.grad(nu) + h.grad(nu)).eval(); };
  s.description = "(" + f.description + " + " + h.description + ")";
  return s;
}

inline StateFunction scaled(double c, const StateFunction& f) {
  StateFunction s;
  s.value = [c, f](const Matrix& nu) { return c * f.value(nu); };
  if (f.grad) s.grad = [c, f](const Matrix& nu) { return (c * f.grad(nu)).eval(); };
  s.description = std::to_string(c) + "*" + f.description;
  return s;
}

/// Pointwise product with the Leibniz gradient.
inline StateFunction product(const StateFunction& f, const StateFunction& h) {
  StateFunction s;
  s.value = [f, h](const Matrix& nu) { return f.value(nu) * h.value(nu); };
  if (f.grad && h.grad)
    s.grad = [f, h](const Matrix& nu) { return (f.value(nu) * h.grad(nu) + h.value(nu) * f.grad(nu)).eval(); };
  s.description = "(" + f.description + " * " + h.description + ")";
  return s;
}

/// Tr(nu i[Df, Dh]).
inline double poisson_bracket(const StateFunction& f, const StateFunction& h, const Matrix& nu,
                              const GradientOptions& opt = {}) {
  const Matrix df = gradient(f, nu, opt);
  const Matrix dh = gradient(h, nu, opt);
  return (kI * trace_product(nu, commutator(df, dh))).real();
}

inline double poisson_bracket(const StateFunction& f, const StateFunction& h, const DensityMatrix& nu,
                              const GradientOptions& opt = {}) {
  return poisson_bracket(f, h, nu.mat(), opt);
}

/// The bracket {f, h} as a state function of its own.
inline StateFunction bracket_function(const StateFunction& f, const StateFunction& h,
                                      const GradientOptions& opt = {}) {
  StateFunction s;
  s.value = [f, h, opt](const Matrix& nu) { return poisson_bracket(f, h, nu, opt); };
  s.description = "{" + f.description + ", " + h.description + "}";
  return s;
}

struct TangentVector {
  Matrix base;
  Matrix value;
};

/// Checks that value is traceless and off-block with respect to base.
inline TangentVector make_tangent(const Matrix& base, const Matrix& value,
                                  const Tolerances& tol = default_tolerances()) {
  require_same_dim(base, value, "make_tangent");
  require_hermitian(value, "make_tangent", 1e-10);
  require(std::abs(value.trace()) <= tol.trace * (1.0 + value.norm()), ErrorKind::Invariant,
          "make_tangent: tangent value is not traceless");
  const auto dec = spectral_decomposition(base, tol.cluster);
  const double leak = block_projection(dec, value).norm();
  require(leak <= tol.off_block * (1.0 + value.norm()), ErrorKind::Domain,
          "make_tangent: value has an in-block component of norm " + std::to_string(leak));
  return {base, value};
}

/// v_f(nu) = i[nu, D_nu f].
inline TangentVector hamiltonian_vector(const StateFunction& f, const Matrix& nu, const GradientOptions& opt = {}) {
  const Matrix df = gradient(f, nu, opt);
  return make_tangent(nu, kI * commutator(nu, df));
}

inline TangentVector hamiltonian_vector(const StateFunction& f, const DensityMatrix& nu,
                                        const GradientOptions& opt = {}) {
  return hamiltonian_vector(f, nu.mat(), opt);
}

/// Derivative of h along a tangent vector: Tr(v Dh).
inline double directional_derivative(const StateFunction& h, const TangentVector& v, const GradientOptions& opt = {}) {
  return trace_product_real(v.value, gradient(h, v.base, opt));
}

struct KahlerValue {
  double gamma = 0.0;
  double omega = 0.0;
  Complex psi{0.0, 0.0};
};

inline KahlerValue kahler_from_psi(Complex psi) { return {psi.real(), -psi.imag(), Complex(psi.real(), psi.imag())}; }

/// Psi = 2 Tr(rho beta(v) beta(w)), Gamma = Re Psi, Omega = -Im Psi.
inline KahlerValue kahler_forms(const Matrix& rho, const TangentVector& v, const TangentVector& w,
                                const Tolerances& tol = default_tolerances()) {
  require_same_dim(rho, v.value, "kahler_forms");
  require_same_dim(rho, w.value, "kahler_forms");
  require((v.base - rho).norm() <= 1e-12 * (1.0 + rho.norm()) && (w.base - rho).norm() <= 1e-12 * (1.0 + rho.norm()),
          ErrorKind::Domain, "kahler_forms: tangent vectors are based at a different state");
  const auto dec = spectral_decomposition(rho, tol.cluster);
  const Matrix bv = beta_map(dec, v.value, tol);
  const Matrix bw = beta_map(dec, w.value, tol);
  return kahler_from_psi(2.0 * trace_product(rho, bv * bw));
}

inline KahlerValue kahler_forms(const DensityMatrix& rho, const TangentVector& v, const TangentVector& w,
                                const Tolerances& tol = default_tolerances()) {
  return kahler_forms(rho.mat(), v, w, tol);
}

/// The same forms computed in a chart of projective space: tangent vectors
/// at the ray of x are represented by vectors dx of the Hilbert space, and
/// Psi = 2(<dx_v, dx_w> - <dx_v, x><x, dx_w>).
inline KahlerValue kahler_forms_chart(const PureState& x, const Vector& dv, const Vector& dw) {
  require(dv.size() == x.dim() && dw.size() == x.dim(), ErrorKind::Shape, "kahler_forms_chart: dimension mismatch");
  const Complex psi = 2.0 * (dv.dot(dw) - dv.dot(x.vec()) * x.vec().dot(dw));
  return kahler_from_psi(psi);
}

/// The forms in terms of selfadjoint generators bv, bw of the two tangent
/// vectors: Psi = 2 Tr(P bv bw) - 2 Tr(P bv) Tr(P bw).
inline KahlerValue kahler_forms_generators(const PureState& x, const Matrix& bv, const Matrix& bw) {
  require(bv.rows() == x.dim() && bw.rows() == x.dim(), ErrorKind::Shape,
          "kahler_forms_generators: dimension mismatch");
  const Vector& y = x.vec();
  const Complex psi = 2.0 * y.dot(bv * (bw * y)) - 2.0 * y.dot(bv * y) * y.dot(bw * y);
  return kahler_from_psi(psi);
}

/// Chart representative of the Hamiltonian vector of h_a at x: the velocity
/// -i a x of the linear flow.
inline Vector chart_tangent_of_linear(const Matrix& a, const PureState& x) { return -kI * (a * x.vec()); }

/// sqrt(2) times the angle between rays, computed without arccos so that
/// nearly equal rays keep full precision.
inline double fs_distance(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), ErrorKind::Shape, "fs_distance: dimension mismatch");
  const double nx = x.norm(), ny = y.norm();
  require(nx > 0.0 && ny > 0.0, ErrorKind::Normalization, "fs_distance: zero vector");
  const Vector u = x / nx, w = y / ny;
  const Complex ov = u.dot(w);
  const double perp = (w - ov * u).norm();
  return std::sqrt(2.0) * std::atan2(perp, std::abs(ov));
}

inline double fs_distance(const PureState& x, const PureState& y) { return fs_distance(x.vec(), y.vec()); }

/// |2 Tr(P_x ab) - (Gamma - i Omega + 2 h_a h_b)| with the forms evaluated on
/// the Hamiltonian vectors of h_a and h_b.
inline double star_identity_residual(const Matrix& a, const Matrix& b, const PureState& x) {
  require_same_dim(a, b, "star_identity_residual");
  require(a.rows() == x.dim(), ErrorKind::Shape, "star_identity_residual: dimension mismatch");
  const Matrix p = x.vec() * x.vec().adjoint();
  const TangentVector va = hamiltonian_vector(linear_function(a), p);
  const TangentVector vb = hamiltonian_vector(linear_function(b), p);
  const KahlerValue k = kahler_forms(p, va, vb);
  const double ha = trace_product_real(p, a), hb = trace_product_real(p, b);
  const Complex lhs = 2.0 * trace_product(p, a * b);
  const Complex rhs = Complex(k.gamma, -k.omega) + 2.0 * ha * hb;
  return std::abs(lhs - rhs);
}

/// True iff the off-block part of D f at P_x vanishes within tol.
inline bool is_stationary(const StateFunction& f, const PureState& x, double tol, const GradientOptions& opt = {}) {
  const Matrix p = x.vec() * x.vec().adjoint();
  const auto dec = spectral_decomposition(p);
  return q_projection(dec, gradient(f, p, opt)).norm() <= tol;
}

}  // namespace eqmflow

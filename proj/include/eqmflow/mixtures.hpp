// mixtures.hpp - genuine mixtures as finitely supported measures on states.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "eqmflow/dynamics.hpp"

namespace eqmflow {

/// sum_i w_i delta_{rho_i}. Components are kept as matrices so that evolved
/// states with roundoff-level drift can still be carried.
class GenuineMixture {
 public:
  struct Component {
    double weight;
    Matrix state;
  };

  GenuineMixture() = default;

  explicit GenuineMixture(std::vector<Component> comps, double tol = 1e-10) : comps_(std::move(comps)) {
    require(!comps_.empty(), ErrorKind::Domain, "mixture: no components");
    double total = 0.0;
    for (const auto& c : comps_) {
      require(std::isfinite(c.weight) && c.weight > 0.0, ErrorKind::Domain, "mixture: weights must be positive");
      require(c.state.rows() == comps_.front().state.rows(), ErrorKind::Shape, "mixture: components of different sizes");
      DensityMatrix check(c.state);
      (void)check;
      total += c.weight;
    }
    require(std::abs(total - 1.0) <= tol, ErrorKind::Normalization,
            "mixture: weights sum to " + std::to_string(total) + ", expected 1");
  }

  static GenuineMixture delta(const Matrix& rho) { return GenuineMixture({{1.0, rho}}); }

  static GenuineMixture of_pure(const std::vector<double>& weights, const std::vector<Vector>& states) {
    require(weights.size() == states.size(), ErrorKind::Shape, "mixture: one weight per state");
    std::vector<Component> comps;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const Vector x = states[i] / states[i].norm();
      comps.push_back({weights[i], x * x.adjoint()});
    }
    return GenuineMixture(std::move(comps));
  }

  const std::vector<Component>& components() const { return comps_; }
  std::size_t size() const { return comps_.size(); }
  int dim() const { return comps_.empty() ? 0 : static_cast<int>(comps_.front().state.rows()); }

 private:
  std::vector<Component> comps_;
};

inline Matrix barycenter(const GenuineMixture& mu) {
  Matrix b = Matrix::Zero(mu.dim(), mu.dim());
  for (const auto& c : mu.components()) b += c.weight * c.state;
  return b;
}

inline double mixture_expectation(const GenuineMixture& mu, const StateFunction& f) {
  double s = 0.0;
  for (const auto& c : mu.components()) s += c.weight * f.value(c.state);
  return s;
}

/// rho-hat: the state that stands in for a support point when an observable
/// is read out.
struct QuantumDeviation {
  std::function<Matrix(const Matrix&)> map;
  std::string name;
  Matrix operator()(const Matrix& nu) const { return map(nu); }
};

inline QuantumDeviation identity_deviation() {
  return {[](const Matrix& nu) { return nu; }, "identity"};
}

/// sum_i w_i Tr(rho-hat(nu_i) field(F(nu_i))).
inline double gstate_expectation(const GenuineMixture& mu, const QuantumDeviation& dev, const ObservableField& field,
                                 const LieRepresentation& rep) {
  double s = 0.0;
  for (const auto& c : mu.components()) {
    const Matrix dn = dev(c.state);
    const Matrix y = field(momentum_map(rep, c.state));
    require(y.rows() == dn.rows(), ErrorKind::Shape, "gstate_expectation: field and state sizes differ");
    s += c.weight * trace_product_real(dn, y);
  }
  return s;
}

/// A real interval with open or closed ends; infinite ends are allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval whole_line() { return {}; }
  static Interval point(double v) { return {v, v, true, true}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }
  /// [a, b)
  static Interval half_open(double a, double b) { return {a, b, true, false}; }

  /// Eigenvalues within snap of an end count as lying on it.
  bool contains(double v, double snap = 1e-12) const {
    const bool above = lo_closed ? v >= lo - snap : v > lo + snap;
    const bool below = hi_closed ? v <= hi + snap : v < hi - snap;
    return above && below;
  }
};

/// Projector onto the eigenvectors of y whose eigenvalues lie in b.
inline Matrix spectral_projector(const Matrix& y, const Interval& b) {
  const EigenSystem es = eigh_ordered(y);
  Matrix p = Matrix::Zero(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (b.contains(es.values(i))) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  return p;
}

/// sum_i w_i Tr(rho-hat(nu_i) E_{Y(F(nu_i))}(B)).
inline double outcome_probability(const ObservableField& Y, const GenuineMixture& mu, const QuantumDeviation& dev,
                                  const LieRepresentation& rep, const Interval& b) {
  double s = 0.0;
  for (const auto& c : mu.components())
    s += c.weight * trace_product_real(dev(c.state), spectral_projector(Y(momentum_map(rep, c.state)), b));
  return s;
}

/// Evolves a single state to time T.
using StateFlow = std::function<Matrix(const Matrix&, double)>;

/// Endpoint of evolve_density_direct as a StateFlow.
inline StateFlow density_flow(const StateFunction& f, const SolverConfig& cfg) {
  return [f, cfg](const Matrix& rho, double T) {
    const Trajectory tr = evolve_density_direct(f, rho, T, cfg);
    return tr.density.back();
  };
}

/// Support points evolve independently; weights are unchanged.
inline GenuineMixture evolve_mixture(const GenuineMixture& mu, const StateFlow& flow, double T) {
  std::vector<GenuineMixture::Component> out;
  for (const auto& c : mu.components()) out.push_back({c.weight, flow(c.state, T)});
  return GenuineMixture(std::move(out));
}

/// || barycenter(evolved mixture) - evolved barycenter ||_1.
inline double mixture_divergence(const GenuineMixture& mu, const StateFunction& f, double t, const SolverConfig& cfg) {
  if (t == 0.0) return 0.0;
  const StateFlow flow = density_flow(f, cfg);
  return trace_norm_hermitian(barycenter(evolve_mixture(mu, flow, t)) - flow(barycenter(mu), t));
}

struct DivergenceSeries {
  std::vector<double> times;
  std::vector<double> divergence;
  double max() const {
    double w = 0.0;
    for (double d : divergence) w = std::max(w, d);
    return w;
  }
};

/// The divergence at every sample of one run per component plus one for the
/// barycenter.
inline DivergenceSeries mixture_divergence_series(const GenuineMixture& mu, const StateFunction& f, double T,
                                                  const SolverConfig& cfg) {
  std::vector<Trajectory> parts;
  for (const auto& c : mu.components()) parts.push_back(evolve_density_direct(f, c.state, T, cfg));
  const Trajectory bary = evolve_density_direct(f, barycenter(mu), T, cfg);
  DivergenceSeries out;
  for (std::size_t s = 0; s < bary.size(); ++s) {
    Matrix b = Matrix::Zero(mu.dim(), mu.dim());
    for (std::size_t i = 0; i < parts.size(); ++i) b += mu.components()[i].weight * parts[i].density[s];
    out.times.push_back(bary.times[s]);
    out.divergence.push_back(trace_norm_hermitian(b - bary.density[s]));
  }
  return out;
}

/// Delta(x, y) = eps sum_j l_j psi_j(x) conj(psi_j(y)) (chi_j(x) - chi_j(y)) with
/// chi_j = |psi_j|^(2 alpha) - (sum_k l_k |psi_k|^2)^alpha. This is i times the
/// difference between the initial rates of change of the component-wise and
/// the barycentric grid NLS flows.
inline Matrix delta_at_zero(const std::vector<Vector>& psis, const std::vector<double>& weights, double eps,
                            double alpha) {
  require(!psis.empty() && psis.size() == weights.size(), ErrorKind::Shape, "delta_at_zero: one weight per function");
  const Eigen::Index n = psis.front().size();
  for (const auto& p : psis) {
    require(p.size() == n, ErrorKind::Shape, "delta_at_zero: functions on different grids");
    require(std::abs(p.norm() - 1.0) <= default_tolerances().state_norm, ErrorKind::Normalization,
            "delta_at_zero: functions must be normalized");
  }
  RealVector mixed = RealVector::Zero(n);
  for (std::size_t j = 0; j < psis.size(); ++j) mixed += weights[j] * psis[j].cwiseAbs2();
  Matrix delta = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < psis.size(); ++j) {
    RealVector chi(n);
    for (Eigen::Index k = 0; k < n; ++k)
      chi(k) = std::pow(std::norm(psis[j](k)), alpha) - std::pow(mixed(k), alpha);
    for (Eigen::Index x = 0; x < n; ++x)
      for (Eigen::Index y = 0; y < n; ++y)
        delta(x, y) += eps * weights[j] * psis[j](x) * std::conj(psis[j](y)) * (chi(x) - chi(y));
  }
  return delta;
}

/// Two normalized step functions on a 64-point grid with disjoint supports.
/// Each takes the values 1 and 1/2 (before normalization) on sets of
/// different sizes, so |psi_j|^2 is not constant on its support.
inline std::vector<Vector> divergence_fixture() {
  const int n = 64;
  Vector a = Vector::Zero(n), b = Vector::Zero(n);
  for (int k = 0; k < 4; ++k) a(k) = 1.0;
  for (int k = 4; k < 12; ++k) a(k) = 0.5;
  for (int k = 20; k < 22; ++k) b(k) = 1.0;
  for (int k = 22; k < 28; ++k) b(k) = 0.5;
  return {a / a.norm(), b / b.norm()};
}

inline Json mixture_to_json(const GenuineMixture& mu) {
  Json comps = Json::array();
  for (const auto& c : mu.components()) comps.push_back({{"weight", c.weight}, {"state", matrix_to_json(c.state)}});
  return {{"components", comps}};
}

inline GenuineMixture mixture_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
    fail(ErrorKind::Config, "mixture: expected {\"components\": [...]}");
  std::vector<GenuineMixture::Component> comps;
  for (std::size_t i = 0; i < j["components"].size(); ++i) {
    const Json& c = j["components"][i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (!c.contains("weight") || !c["weight"].is_number()) fail(ErrorKind::Config, where + ".weight: missing number");
    if (!c.contains("state")) fail(ErrorKind::Config, where + ".state: missing");
    comps.push_back({c["weight"].get<double>(), density_from_json(c["state"]).mat()});
  }
  return GenuineMixture(std::move(comps));
}

}  // namespace eqmflow

#pragma once

#include <cmath>
#include <string>

#include "eqmflow/error.hpp"

namespace eqmflow {

struct SolverConfig {
  std::string method = "rk4";
  double dt = 1e-3;
  bool renormalize = false;  // off so that drift stays observable
  double tail_guard = 1e-8;
  int sample_stride = 1;     // record every k-th step

  /// Scenario-level rules. Solvers themselves only need dt > 0.
  void validate() const {
    require(method == "rk4", ErrorKind::Config, "solver.method: only \"rk4\" is supported, got \"" + method + "\"");
    require(std::isfinite(dt) && dt > 0.0, ErrorKind::Config, "time.dt: must be positive");
    require(dt <= 0.1, ErrorKind::Config, "time.dt: must not exceed 0.1");
    require(tail_guard > 0.0, ErrorKind::Config, "solver.tail_guard: must be positive");
    require(sample_stride >= 1, ErrorKind::Config, "solver.sample_stride: must be >= 1");
  }
};

/// Uniform steps covering [0, T] (T may be negative) with |h| <= dt.
struct StepPlan {
  int steps = 0;
  double h = 0.0;
};

inline StepPlan plan_steps(double T, double dt) {
  require(std::isfinite(T), ErrorKind::Domain, "integration time must be finite");
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::Config, "dt must be positive");
  if (T == 0.0) return {};
  const double ratio = std::abs(T) / dt;
  const int n = static_cast<int>(std::ceil(ratio - 1e-9 * ratio));
  return {n < 1 ? 1 : n, T / (n < 1 ? 1 : n)};
}

/// One classical Runge-Kutta step for y' = f(t, y). S needs vector-space
/// arithmetic (Eigen dense types qualify).
template <class S, class F>
S rk4_step(const S& y, double t, double h, F&& f) {
  const S k1 = f(t, y);
  const S k2 = f(t + 0.5 * h, S(y + (0.5 * h) * k1));
  const S k3 = f(t + 0.5 * h, S(y + (0.5 * h) * k2));
  const S k4 = f(t + h, S(y + h * k3));
  return S(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace eqmflow

#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace eqmflow {

enum class ErrorKind {
  Shape,
  Invariant,
  Normalization,
  Positivity,
  Domain,
  Conditioning,
  Numerical,
  IterationLimit,
  Config,
  Io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Normalization: return "normalization";
    case ErrorKind::Positivity: return "positivity";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::IterationLimit: return "iteration-limit";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Process exit code for the command-line front end: 1 config, 2 numerical
  /// (any invariant breach), 3 I/O.
  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Config: return 1;
      case ErrorKind::Io: return 3;
      default: return 2;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

/// Default thresholds. Every operation that checks an invariant takes its
/// threshold from here unless the caller passes one explicitly.
struct Tolerances {
  double hermitian = 1e-12;        // relative to 1 + max|M|
  double unitary = 1e-10;          // per dimension
  double state_norm = 1e-10;
  double trace = 1e-10;
  double negative_clamp = 1e-10;   // eigenvalues in [-clamp, 0) are clamped
  double cluster = 1e-8;           // spectral clustering, absolute
  double beta_gap = 1e-6;          // minimal gap accepted by beta_map
  double off_block = 1e-9;         // block-diagonal leakage of tangent vectors
  double fd_step = 1e-5;           // central finite differences
  double drop_weight = 1e-14;      // mixture components below this are dropped
  double gauge_commutator = 1e-9;
  double tail_warning = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

/// Multiplier from EQMFLOW_TOL_SCALE. Only the CLI diagnostics read this;
/// library defaults and acceptance checks never do.
inline double tolerance_scale_from_env() {
  const char* s = std::getenv("EQMFLOW_TOL_SCALE");
  if (s == nullptr || *s == '\0') return 1.0;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || !(v > 0.0)) fail(ErrorKind::Config, "EQMFLOW_TOL_SCALE must be a positive number");
  return v;
}

}  // namespace eqmflow

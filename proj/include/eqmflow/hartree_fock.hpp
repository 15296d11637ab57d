// hartree_fock.hpp - Slater states as rank-N projectors, the Hartree-Fock
// energy and its gradient, the time-dependent equation and an Aufbau SCF.

#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "eqmflow/dynamics.hpp"

namespace eqmflow {

/// N orthonormal orbitals in C^d; rho = E/N with E the projector on their span.
class SlaterState {
 public:
  explicit SlaterState(Matrix frame, double tol = 1e-10) : frame_(std::move(frame)) {
    require(frame_.cols() >= 1 && frame_.cols() <= frame_.rows(), ErrorKind::Shape,
            "SlaterState: need 1 <= N <= d orbitals");
    const Matrix gram = frame_.adjoint() * frame_;
    const double defect = max_abs(gram - Matrix::Identity(frame_.cols(), frame_.cols()));
    require(defect <= tol, ErrorKind::Invariant,
            "SlaterState: orbitals are not orthonormal (Gram defect " + std::to_string(defect) + ")");
  }

  /// Orthonormalizes the columns first.
  static SlaterState from_columns(const Matrix& cols) {
    Eigen::HouseholderQR<Matrix> qr(cols);
    const Matrix q = qr.householderQ() * Matrix::Identity(cols.rows(), cols.cols());
    return SlaterState(q);
  }

  /// Orbitals are the eigenvectors of the rank-N projector N rho.
  static SlaterState from_density(const Matrix& rho, int N, double tol = 1e-9) {
    const Matrix E = static_cast<double>(N) * rho;
    const double idem = max_abs(E * E - E);
    require(idem <= tol, ErrorKind::Invariant,
            "SlaterState: N*rho is not a projector (defect " + std::to_string(idem) + ")");
    const EigenSystem es = eigh_ordered(hermitian_part(E));
    return SlaterState(Matrix(es.vectors.leftCols(N)), 1e-8);
  }

  int d() const { return static_cast<int>(frame_.rows()); }
  int N() const { return static_cast<int>(frame_.cols()); }
  const Matrix& frame() const { return frame_; }
  Matrix projector() const { return frame_ * frame_.adjoint(); }
  Matrix rho() const { return projector() / static_cast<double>(N()); }

 private:
  Matrix frame_;
};

/// Swap of the two factors of C^d (x) C^d; pair index (a, b) -> a*d + b.
inline Matrix exchange_operator(int d) {
  Matrix p = Matrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) p(b * d + a, a * d + b) = 1.0;
  return p;
}

/// Symmetric pair interaction on C^d (x) C^d.
class TwoBodyOperator {
 public:
  explicit TwoBodyOperator(Matrix v, double tol = 1e-10) : v_(std::move(v)) {
    require_square(v_, "TwoBodyOperator");
    const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v_.rows()))));
    require(d * d == v_.rows(), ErrorKind::Shape, "TwoBodyOperator: size is not d^2");
    require_hermitian(v_, "TwoBodyOperator", tol);
    d_ = d;
    const Matrix p = exchange_operator(d);
    const double c = max_abs(commutator(v_, p));
    require(c <= tol, ErrorKind::Invariant,
            "TwoBodyOperator: interaction does not commute with particle exchange (" + std::to_string(c) + ")");
    w_ = v_ * (Matrix::Identity(d * d, d * d) - p);
  }

  static TwoBodyOperator zero(int d) { return TwoBodyOperator(Matrix::Zero(d * d, d * d)); }

  int d() const { return d_; }
  const Matrix& v() const { return v_; }
  /// v (1 - exchange)
  const Matrix& antisymmetrized() const { return w_; }

 private:
  Matrix v_, w_;
  int d_ = 0;
};

namespace detail {
inline void check_hf_dims(const Matrix& h0, const TwoBodyOperator& v, const Matrix& rho) {
  require_hermitian(h0, "hartree-fock one-body term");
  require(h0.rows() == v.d() && rho.rows() == v.d() && rho.cols() == v.d(), ErrorKind::Shape,
          "hartree-fock: h0, v and rho dimensions differ");
}
}  // namespace detail

/// Mean field M[a, a'] = sum_{b, b'} W[(a, b), (a', b')] rho[b', b] with W = v(1 - exchange).
inline Matrix hf_mean_field(const TwoBodyOperator& v, const Matrix& rho) {
  const int d = v.d();
  const Matrix& W = v.antisymmetrized();
  Matrix m = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int ap = 0; ap < d; ++ap) {
      Complex s = 0.0;
      for (int b = 0; b < d; ++b)
        for (int bp = 0; bp < d; ++bp) s += W(a * d + b, ap * d + bp) * rho(bp, b);
      m(a, ap) = s;
    }
  return m;
}

/// N Tr(rho h0) + (N^2/2) Tr((rho (x) rho) v (1 - exchange)).
inline double hf_energy(const Matrix& h0, const TwoBodyOperator& v, const Matrix& rho, int N) {
  detail::check_hf_dims(h0, v, rho);
  const double n = static_cast<double>(N);
  return n * trace_product_real(rho, h0) + 0.5 * n * n * trace_product_real(kron(rho, rho), v.antisymmetrized());
}

inline double hf_energy(const Matrix& h0, const TwoBodyOperator& v, const SlaterState& s) {
  return hf_energy(h0, v, s.rho(), s.N());
}

/// Gradient of hf_energy / N with respect to rho: h0 + N * mean field.
inline Matrix hf_gradient(const Matrix& h0, const TwoBodyOperator& v, const Matrix& rho, int N) {
  detail::check_hf_dims(h0, v, rho);
  return hermitian_part(h0 + static_cast<double>(N) * hf_mean_field(v, rho));
}

/// hf_energy / N as a state function with its analytic gradient.
inline StateFunction hf_state_function(const Matrix& h0, const TwoBodyOperator& v, int N) {
  StateFunction f;
  f.kind = StateFunction::Kind::Custom;
  f.value = [h0, v, N](const Matrix& rho) { return hf_energy(h0, v, rho, N) / N; };
  f.grad = [h0, v, N](const Matrix& rho) { return hf_gradient(h0, v, rho, N); };
  f.description = "hartree_fock";
  return f;
}

/// Largest distance of the spectrum of N rho from {0, 1}.
inline double projector_defect(const Matrix& rho, int N) {
  const RealVector ev = eigenvalues_descending(static_cast<double>(N) * rho);
  double w = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) w = std::max(w, std::min(std::abs(ev(i)), std::abs(ev(i) - 1.0)));
  return w;
}

struct TdhfResult {
  Trajectory trajectory;  // Q_value column holds the energy per particle
  std::vector<double> energies;
  double max_projector_defect = 0.0;
  double max_energy_drift() const {
    double w = 0.0;
    for (double e : energies) w = std::max(w, std::abs(e - energies.front()));
    return w;
  }
};

/// i d(rho)/dt = [D h(rho), rho] from the Slater state s0.
inline TdhfResult tdhf_evolve(const Matrix& h0, const TwoBodyOperator& v, const SlaterState& s0, double T,
                              const SolverConfig& cfg, double projector_tol = 1e-6) {
  require(s0.d() == v.d(), ErrorKind::Shape, "tdhf_evolve: dimension mismatch");
  const int N = s0.N();
  TdhfResult out;
  out.trajectory = evolve_density_direct(hf_state_function(h0, v, N), s0.rho(), T, cfg);
  for (const Matrix& rho : out.trajectory.density) {
    const double pd = projector_defect(rho, N);
    out.max_projector_defect = std::max(out.max_projector_defect, pd);
    out.energies.push_back(hf_energy(h0, v, rho, N));
  }
  require(out.max_projector_defect <= projector_tol, ErrorKind::Numerical,
          "tdhf_evolve: N*rho left the projectors (defect " + std::to_string(out.max_projector_defect) + ")");
  return out;
}

struct ScfOptions {
  double damping = 0.3;
  int max_iter = 500;
  double density_tol = 1e-11;
  double commutator_tol = 1e-8;
  double degeneracy_gap = 1e-10;
};

struct ScfIteration {
  int iter;
  double energy;
  double commutator_residual;
};

struct ScfResult {
  Matrix frame;                    // occupied orbitals, lowest first
  RealVector orbital_energies;     // all d, ascending
  double energy = 0.0;
  double commutator_residual = 0.0;
  double hf_equation_residual = 0.0;
  double homo_lumo_gap = 0.0;
  bool degenerate = false;
  int iterations = 0;
  std::vector<ScfIteration> history;

  SlaterState state() const { return SlaterState(frame, 1e-9); }
};

/// Eigenpairs of a Hermitian matrix in ascending order.
inline EigenSystem eigh_ascending(const Matrix& m) {
  EigenSystem es = eigh_ordered(Matrix(-m));
  es.values = -es.values;
  return es;
}

/// Fixed point of rho -> Aufbau(D h(rho)) with linear density mixing.
inline ScfResult hf_scf(const Matrix& h0, const TwoBodyOperator& v, int N, const SlaterState& init,
                        const ScfOptions& opt = {}) {
  require(N >= 1 && N <= v.d(), ErrorKind::Domain, "hf_scf: need 1 <= N <= d");
  require(init.N() == N && init.d() == v.d(), ErrorKind::Shape, "hf_scf: initial state does not match N and d");
  require(opt.damping >= 0.0 && opt.damping < 1.0, ErrorKind::Config, "hf_scf: damping must lie in [0, 1)");
  require(opt.max_iter >= 1, ErrorKind::Config, "hf_scf: max_iter must be positive");

  ScfResult res;
  Matrix rho = init.rho();
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Matrix D = hf_gradient(h0, v, rho, N);
    const EigenSystem es = eigh_ascending(D);
    const Matrix occ = es.vectors.leftCols(N);
    const Matrix target = occ * occ.adjoint() / static_cast<double>(N);
    const double comm = commutator(D, rho).norm();
    res.history.push_back({it, hf_energy(h0, v, rho, N), comm});
    best = std::min(best, comm);
    const double step = (target - rho).norm();
    if (step <= opt.density_tol && comm <= opt.commutator_tol) {
      // Report orbitals of the final field so that the HF equation is
      // checked on the same object that defines the state.
      const Matrix Df = hf_gradient(h0, v, target, N);
      const EigenSystem ef = eigh_ascending(Df);
      res.frame = ef.vectors.leftCols(N);
      res.orbital_energies = ef.values;
      res.energy = hf_energy(h0, v, target, N);
      res.commutator_residual = commutator(Df, target).norm();
      double r = 0.0;
      for (int k = 0; k < N; ++k) r = std::max(r, (Df * res.frame.col(k) - ef.values(k) * res.frame.col(k)).norm());
      res.hf_equation_residual = r;
      res.homo_lumo_gap = N < v.d() ? ef.values(N) - ef.values(N - 1) : std::numeric_limits<double>::infinity();
      res.degenerate = res.homo_lumo_gap < opt.degeneracy_gap;
      res.iterations = it;
      return res;
    }
    rho = (1.0 - opt.damping) * target + opt.damping * rho;
  }
  fail(ErrorKind::IterationLimit,
       "hf_scf: no convergence after " + std::to_string(opt.max_iter) + " iterations (best commutator residual " +
           std::to_string(best) + ")");
}

// ---------------------------------------------------------------------------
// Exact N-fermion reference on (C^d)^(x)N

namespace detail {
inline std::vector<int> digits(Eigen::Index idx, int d, int N) {
  std::vector<int> a(static_cast<std::size_t>(N));
  for (int k = N - 1; k >= 0; --k) {
    a[static_cast<std::size_t>(k)] = static_cast<int>(idx % d);
    idx /= d;
  }
  return a;
}
inline Eigen::Index undigits(const std::vector<int>& a, int d) {
  Eigen::Index idx = 0;
  for (int x : a) idx = idx * d + x;
  return idx;
}
}  // namespace detail

/// sum_i h0^(i) + sum_{i<j} v^(ij) on the full tensor space.
inline Matrix fermion_hamiltonian(const Matrix& h0, const TwoBodyOperator& v, int N, Eigen::Index budget = 1024) {
  const int d = v.d();
  require(h0.rows() == d, ErrorKind::Shape, "fermion_hamiltonian: dimension mismatch");
  const Eigen::Index D = checked_power(d, N, budget);
  Matrix H = Matrix::Zero(D, D);
  for (Eigen::Index col = 0; col < D; ++col) {
    const std::vector<int> b = detail::digits(col, d, N);
    for (int i = 0; i < N; ++i)
      for (int x = 0; x < d; ++x) {
        std::vector<int> a = b;
        a[static_cast<std::size_t>(i)] = x;
        H(detail::undigits(a, d), col) += h0(x, b[static_cast<std::size_t>(i)]);
      }
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        for (int x = 0; x < d; ++x)
          for (int y = 0; y < d; ++y) {
            std::vector<int> a = b;
            a[static_cast<std::size_t>(i)] = x;
            a[static_cast<std::size_t>(j)] = y;
            H(detail::undigits(a, d), col) +=
                v.v()(x * d + y, b[static_cast<std::size_t>(i)] * d + b[static_cast<std::size_t>(j)]);
          }
  }
  return H;
}

/// (1/N!) sum over permutations of sign * (permutation of the factors).
inline Matrix antisymmetrizer(int d, int N, Eigen::Index budget = 1024) {
  const Eigen::Index D = checked_power(d, N, budget);
  std::vector<int> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), 0);
  Matrix P = Matrix::Zero(D, D);
  double count = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
    const double sign = inversions % 2 ? -1.0 : 1.0;
    for (Eigen::Index col = 0; col < D; ++col) {
      const std::vector<int> b = detail::digits(col, d, N);
      std::vector<int> a(static_cast<std::size_t>(N));
      for (int k = 0; k < N; ++k) a[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
      P(detail::undigits(a, d), col) += sign;
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return P / count;
}

/// Lowest eigenvalue of the N-fermion Hamiltonian on the antisymmetric space.
inline double exact_fermion_ground_energy(const Matrix& h0, const TwoBodyOperator& v, int N) {
  const Matrix P = antisymmetrizer(v.d(), N);
  const EigenSystem es = eigh_ordered(P);
  Eigen::Index rank = 0;
  while (rank < es.values.size() && es.values(rank) > 0.5) ++rank;
  require(rank > 0, ErrorKind::Domain, "exact_fermion_ground_energy: no antisymmetric states (N > d)");
  const Matrix B = es.vectors.leftCols(rank);
  const Matrix Hr = hermitian_part(B.adjoint() * fermion_hamiltonian(h0, v, N) * B);
  return eigh_ascending(Hr).values(0);
}

inline std::string scf_report_csv(const ScfResult& r) {
  std::string s = "iter,energy,commutator_residual\n";
  for (const auto& h : r.history)
    s += std::to_string(h.iter) + "," + format_double(h.energy) + "," + format_double(h.commutator_residual) + "\n";
  return s;
}

}  // namespace eqmflow

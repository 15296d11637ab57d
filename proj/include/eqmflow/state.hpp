// state.hpp - pure states, density matrices, spectral clustering, the q and
// beta maps, partial traces and measurement-induced decompositions.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqmflow/linalg.hpp"

namespace eqmflow {

class PureState {
 public:
  /// Accepts amplitudes already normalized within tolerance.
  explicit PureState(Vector amps, double tol = default_tolerances().state_norm) : amps_(std::move(amps)) {
    require(amps_.size() > 0, ErrorKind::Shape, "PureState: empty vector");
    require(amps_.allFinite(), ErrorKind::Normalization, "PureState: non-finite amplitudes");
    const double n = amps_.norm();
    require(std::abs(n - 1.0) <= tol, ErrorKind::Normalization,
            "PureState: norm " + std::to_string(n) + " is not 1");
  }

  /// Normalizes any nonzero vector.
  static PureState normalized(const Vector& v) {
    const double n = v.norm();
    require(v.size() > 0 && std::isfinite(n) && n > 0.0, ErrorKind::Normalization,
            "PureState: cannot normalize a zero vector");
    return PureState(v / n);
  }

  static PureState basis(int dim, int k) {
    require(k >= 0 && k < dim, ErrorKind::Shape, "PureState::basis: index out of range");
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return PureState(v);
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& vec() const { return amps_; }
  Complex operator()(int i) const { return amps_(i); }

 private:
  Vector amps_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
  /// [-negative_clamp, 0) are clamped to zero and the trace renormalized;
  /// anything more negative is rejected.
  explicit DensityMatrix(const Matrix& m, const Tolerances& tol = default_tolerances()) {
    require_hermitian(m, "DensityMatrix", tol.hermitian);
    Matrix h = hermitian_part(m);
    const double tr = h.trace().real();
    require(std::abs(tr - 1.0) <= tol.trace, ErrorKind::Normalization,
            "DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double lo = es.eigenvalues().minCoeff();
    require(lo >= -tol.negative_clamp, ErrorKind::Positivity,
            "DensityMatrix: eigenvalue " + std::to_string(lo) + " below clamp tolerance");
    if (lo < 0.0) {
      RealVector ev = es.eigenvalues().cwiseMax(0.0);
      ev /= ev.sum();
      h = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
      h = hermitian_part(h);
    }
    m_ = std::move(h);
  }

  static DensityMatrix from_pure(const PureState& x) { return DensityMatrix(x.vec() * x.vec().adjoint()); }

  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double purity() const { return trace_product_real(m_, m_); }

 private:
  Matrix m_;
};

inline DensityMatrix density_from_vector(const PureState& x) { return DensityMatrix::from_pure(x); }

struct SpectralCluster {
  double lambda = 0.0;
  Matrix projector;
  int rank = 0;
};

/// Eigenvalue clusters of a density matrix in descending order, plus the
/// projector onto the kernel.
struct SpectralDecomposition {
  int dim = 0;
  std::vector<SpectralCluster> clusters;
  Matrix kernel;
  int kernel_rank = 0;

  /// Every block (clusters, then the kernel if present) with its eigenvalue.
  std::vector<std::pair<double, const Matrix*>> blocks() const {
    std::vector<std::pair<double, const Matrix*>> out;
    for (const auto& c : clusters) out.emplace_back(c.lambda, &c.projector);
    if (kernel_rank > 0) out.emplace_back(0.0, &kernel);
    return out;
  }
};

/// Groups eigenvalues closer than cluster_tol into one cluster; eigenvalues
/// within cluster_tol of zero go to the kernel. Works on any Hermitian matrix
/// whose spectrum is nonnegative up to the clamp tolerance.
inline SpectralDecomposition spectral_decomposition(const Matrix& rho,
                                                    double cluster_tol = default_tolerances().cluster) {
  require(cluster_tol > 0.0, ErrorKind::Domain, "spectral_decomposition: cluster_tol must be positive");
  const EigenSystem es = eigh_ordered(rho);
  const int n = static_cast<int>(rho.rows());
  require(es.values(n - 1) >= -default_tolerances().negative_clamp - cluster_tol, ErrorKind::Positivity,
          "spectral_decomposition: negative eigenvalue " + std::to_string(es.values(n - 1)));

  SpectralDecomposition dec;
  dec.dim = n;
  dec.kernel = Matrix::Zero(n, n);
  int i = 0;
  while (i < n) {
    if (es.values(i) <= cluster_tol) break;
    int j = i + 1;
    while (j < n && es.values(j - 1) - es.values(j) <= cluster_tol && es.values(j) > cluster_tol) ++j;
    SpectralCluster c;
    c.rank = j - i;
    c.lambda = es.values.segment(i, j - i).mean();
    const Matrix v = es.vectors.middleCols(i, j - i);
    c.projector = v * v.adjoint();
    dec.clusters.push_back(std::move(c));
    i = j;
  }
  if (i < n) {
    const Matrix v = es.vectors.middleCols(i, n - i);
    dec.kernel = v * v.adjoint();
    dec.kernel_rank = n - i;
  }
  return dec;
}

inline SpectralDecomposition spectral_decomposition(const DensityMatrix& rho,
                                                    double cluster_tol = default_tolerances().cluster) {
  return spectral_decomposition(rho.mat(), cluster_tol);
}

/// Block-diagonal part sum_j E_j b E_j, the kernel included.
inline Matrix block_projection(const SpectralDecomposition& dec, const Matrix& b) {
  require(b.rows() == dec.dim && b.cols() == dec.dim, ErrorKind::Shape, "block_projection: dimension mismatch");
  Matrix out = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& [lam, e] : dec.blocks()) out += (*e) * b * (*e);
  return out;
}

/// Off-block part sum_{j != k} E_j b E_k.
inline Matrix q_projection(const SpectralDecomposition& dec, const Matrix& b) {
  require(b.rows() == dec.dim && b.cols() == dec.dim, ErrorKind::Shape, "q_projection: dimension mismatch");
  return b - block_projection(dec, b);
}

/// Inverse of c -> i[rho, c] on the off-block subspace.
inline Matrix beta_map(const SpectralDecomposition& dec, const Matrix& c,
                       const Tolerances& tol = default_tolerances()) {
  require(c.rows() == dec.dim && c.cols() == dec.dim, ErrorKind::Shape, "beta_map: dimension mismatch");
  const double leak = block_projection(dec, c).norm();
  require(leak <= tol.off_block * (1.0 + c.norm()), ErrorKind::Domain,
          "beta_map: argument has a block-diagonal component of norm " + std::to_string(leak));
  const auto blocks = dec.blocks();
  for (std::size_t j = 0; j < blocks.size(); ++j)
    for (std::size_t k = j + 1; k < blocks.size(); ++k)
      require(std::abs(blocks[j].first - blocks[k].first) >= tol.beta_gap, ErrorKind::Conditioning,
              "beta_map: spectral gap below " + std::to_string(tol.beta_gap));

  Matrix out = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& [lj, ej] : blocks)
    for (const auto& [lk, ek] : blocks) {
      if (ej == ek) continue;
      out += (kI / (lk - lj)) * ((*ej) * c * (*ek));
    }
  return out;
}

enum class Keep { A, B };

inline Matrix partial_trace(const Matrix& rho, int dA, int dB, Keep keep) {
  require(dA > 0 && dB > 0 && rho.rows() == static_cast<Eigen::Index>(dA) * dB && rho.cols() == rho.rows(),
          ErrorKind::Shape, "partial_trace: dimension does not factor as dA*dB");
  if (keep == Keep::A) {
    Matrix out = Matrix::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int ap = 0; ap < dA; ++ap) {
        Complex s = 0.0;
        for (int b = 0; b < dB; ++b) s += rho(a * dB + b, ap * dB + b);
        out(a, ap) = s;
      }
    return out;
  }
  Matrix out = Matrix::Zero(dB, dB);
  for (int b = 0; b < dB; ++b)
    for (int bp = 0; bp < dB; ++bp) {
      Complex s = 0.0;
      for (int a = 0; a < dA; ++a) s += rho(a * dB + b, a * dB + bp);
      out(b, bp) = s;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int dA, int dB, Keep keep) {
  return DensityMatrix(partial_trace(rho.mat(), dA, dB, keep));
}

/// Reduced density matrix of one site of an n-site product space, straight
/// from a state vector.
inline Matrix site_marginal(const Vector& psi, int d, int n, int site) {
  require(site >= 1 && site <= n, ErrorKind::Shape, "site_marginal: site out of range");
  Eigen::Index left = 1, right = 1;
  for (int p = 1; p < site; ++p) left *= d;
  for (int p = site + 1; p <= n; ++p) right *= d;
  require(psi.size() == left * d * right, ErrorKind::Shape, "site_marginal: dimension mismatch");
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index l = 0; l < left; ++l)
    for (int a = 0; a < d; ++a)
      for (int ap = 0; ap < d; ++ap) {
        const Eigen::Index ia = (l * d + a) * right, iap = (l * d + ap) * right;
        out(a, ap) += psi.segment(iap, right).dot(psi.segment(ia, right));
      }
  return out;
}

struct MixtureComponent {
  double weight = 0.0;
  DensityMatrix state;
  std::optional<PureState> pure;
};

struct MixtureDecomposition {
  std::vector<MixtureComponent> components;

  Matrix barycenter() const {
    require(!components.empty(), ErrorKind::Shape, "MixtureDecomposition: no components");
    Matrix out = Matrix::Zero(components.front().state.dim(), components.front().state.dim());
    for (const auto& c : components) out += c.weight * c.state.mat();
    return out;
  }

  double total_weight() const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight;
    return s;
  }
};

inline void require_orthonormal(const std::vector<Vector>& basis, const char* who, double tol = 1e-10) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex g = basis[i].dot(basis[j]);
      require(std::abs(g - (i == j ? 1.0 : 0.0)) <= tol, ErrorKind::Domain,
              std::string(who) + ": basis is not orthonormal");
    }
}

/// Relative states of A for each basis vector of B. Components whose weight
/// is below the drop threshold are omitted.
inline MixtureDecomposition relative_state_decomposition(const PureState& psi, int dA, int dB,
                                                         const std::vector<Vector>& basis,
                                                         const Tolerances& tol = default_tolerances()) {
  require(psi.dim() == dA * dB, ErrorKind::Shape, "relative_state_decomposition: dimension mismatch");
  require(static_cast<int>(basis.size()) == dB, ErrorKind::Shape,
          "relative_state_decomposition: basis must have dB vectors");
  for (const auto& b : basis)
    require(b.size() == dB, ErrorKind::Shape, "relative_state_decomposition: basis vector of wrong length");
  require_orthonormal(basis, "relative_state_decomposition");

  MixtureDecomposition out;
  for (const auto& phi : basis) {
    Vector rel = Vector::Zero(dA);
    for (int a = 0; a < dA; ++a) rel(a) = phi.dot(psi.vec().segment(static_cast<Eigen::Index>(a) * dB, dB));
    const double w = rel.squaredNorm();
    if (w < tol.drop_weight) continue;
    PureState x = PureState::normalized(rel);
    out.components.push_back({w, DensityMatrix::from_pure(x), x});
  }
  return out;
}

/// Decomposition induced by a projection-valued measurement {E_l} on B.
inline MixtureDecomposition coarse_decomposition(const PureState& psi, int dA, int dB,
                                                 const std::vector<Matrix>& projectors,
                                                 const Tolerances& tol = default_tolerances()) {
  require(psi.dim() == dA * dB, ErrorKind::Shape, "coarse_decomposition: dimension mismatch");
  Matrix sum = Matrix::Zero(dB, dB);
  for (const auto& e : projectors) {
    require(e.rows() == dB && e.cols() == dB, ErrorKind::Shape, "coarse_decomposition: projector of wrong size");
    sum += e;
  }
  require((sum - Matrix::Identity(dB, dB)).norm() <= 1e-10, ErrorKind::Domain,
          "coarse_decomposition: projectors do not resolve the identity");
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = 0; j < projectors.size(); ++j) {
      const Matrix p = projectors[i] * projectors[j];
      const double r = (i == j ? (p - projectors[i]).norm() : p.norm());
      require(r <= 1e-10, ErrorKind::Domain, "coarse_decomposition: projectors are not mutually orthogonal");
    }

  MixtureDecomposition out;
  for (const auto& e : projectors) {
    const Vector proj = kron(Matrix::Identity(dA, dA), e) * psi.vec();
    const double k = proj.squaredNorm();
    if (k < tol.drop_weight) continue;
    const Matrix rho = partial_trace(Matrix(proj * proj.adjoint() / k), dA, dB, Keep::A);
    out.components.push_back({k, DensityMatrix(rho), std::nullopt});
  }
  return out;
}

inline Eigen::Index checked_power(int d, int n, Eigen::Index budget) {
  Eigen::Index total = 1;
  for (int i = 0; i < n; ++i) {
    total *= d;
    require(total <= budget, ErrorKind::Domain,
            "size budget exceeded: " + std::to_string(d) + "^" + std::to_string(n) + " > " +
                std::to_string(budget));
  }
  return total;
}

/// I x ... x x ... x I with x in slot p (1-based) of n.
inline Matrix embed_at_site(const Matrix& x, int p, int n, Eigen::Index budget = 4096) {
  require_square(x, "embed_at_site");
  require(n >= 1 && p >= 1 && p <= n, ErrorKind::Shape, "embed_at_site: site out of range");
  const int d = static_cast<int>(x.rows());
  checked_power(d, n, budget);
  Eigen::Index left = 1, right = 1;
  for (int i = 1; i < p; ++i) left *= d;
  for (int i = p + 1; i <= n; ++i) right *= d;
  Matrix out = kron(Matrix::Identity(left, left), x);
  return kron(out, Matrix::Identity(right, right));
}

}  // namespace eqmflow

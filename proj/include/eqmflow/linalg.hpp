// linalg.hpp - dense complex matrix kernel: commutators, ordered Hermitian
// eigendecomposition, exponentials of Hermitian generators, Hermitian bases.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "eqmflow/error.hpp"

namespace eqmflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Domain aliases. Hermiticity and unitarity are checked at the boundaries
// that need them, not carried in the type.
using ComplexMatrix = Matrix;
using HermitianMatrix = Matrix;
using UnitaryMatrix = Matrix;

inline constexpr Complex kI{0.0, 1.0};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline void require_square(const Matrix& m, const char* who) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorKind::Shape,
          std::string(who) + ": expected a non-empty square matrix");
}

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* who) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::Shape,
          std::string(who) + ": dimension mismatch (" + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
              std::to_string(b.cols()) + ")");
}

inline double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline bool is_hermitian(const Matrix& m, double tol = default_tolerances().hermitian) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol * (1.0 + max_abs(m));
}

inline void require_hermitian(const Matrix& m, const char* who,
                              double tol = default_tolerances().hermitian) {
  require_square(m, who);
  require(all_finite(m), ErrorKind::Invariant, std::string(who) + ": non-finite entries");
  require(is_hermitian(m, tol), ErrorKind::Invariant,
          std::string(who) + ": matrix is not Hermitian (defect " +
              std::to_string(hermiticity_defect(m)) + ")");
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

inline bool is_unitary(const Matrix& u, double tol = default_tolerances().unitary) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol * static_cast<double>(u.rows());
}

/// ab - ba
inline Matrix commutator(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "commutator");
  require(a.rows() == a.cols(), ErrorKind::Shape, "commutator: operands must be square");
  return a * b - b * a;
}

inline Matrix anticommutator(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "anticommutator");
  return a * b + b * a;
}

/// Frobenius pairing (a, b)_2 = Tr(a^dagger b).
inline Complex frobenius_pairing(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "frobenius_pairing");
  return (a.adjoint() * b).trace();
}

/// Re Tr(ab) without forming the product.
inline double trace_product_real(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

inline Complex trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k = Eigen::kroneckerProduct(a, b).eval();
  return k;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector k(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) k.segment(i * b.size(), b.size()) = a(i) * b;
  return k;
}

struct EigenSystem {
  RealVector values;  // descending
  Matrix vectors;     // columns, orthonormal

  Matrix reconstruct() const { return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint(); }
};

/// Hermitian eigendecomposition with eigenvalues in descending order.
///
/// Equal eigenvalues keep the order of the basis position at which their
/// eigenvector has its largest component, so a diagonal input keeps its own
/// order among ties. Each eigenvector is phased so that this largest component
/// is real and positive.
inline EigenSystem eigh_ordered(const Matrix& m, double herm_tol = default_tolerances().hermitian) {
  require_hermitian(m, "eigh_ordered", herm_tol);
  const Eigen::Index n = m.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  require(es.info() == Eigen::Success, ErrorKind::Numerical, "eigh_ordered: eigensolver failed");

  const RealVector& vals = es.eigenvalues();
  Matrix vecs = es.eigenvectors();

  std::vector<Eigen::Index> anchor(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index arg = 0;
    vecs.col(c).cwiseAbs().maxCoeff(&arg);
    anchor[static_cast<std::size_t>(c)] = arg;
    const Complex lead = vecs(arg, c);
    vecs.col(c) *= std::conj(lead) / std::abs(lead);
  }

  // Ties are decided on the anchor position; the solver's ascending order
  // only matters when eigenvalues are numerically distinct.
  const double scale = 1.0 + (n > 0 ? vals.cwiseAbs().maxCoeff() : 0.0);
  const double tie = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(vals(a) - vals(b)) > tie) return vals(a) > vals(b);
    return anchor[static_cast<std::size_t>(a)] < anchor[static_cast<std::size_t>(b)];
  });

  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = vals(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Sorted (descending) eigenvalues of a Hermitian matrix.
inline RealVector eigenvalues_descending(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  RealVector v = es.eigenvalues().reverse();
  return v;
}

/// exp(-i t x) for Hermitian x, through its eigendecomposition.
inline UnitaryMatrix exp_hermitian_generator(const HermitianMatrix& x, double t) {
  const EigenSystem es = eigh_ordered(x);
  Vector phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(-kI * t * es.values(i));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

/// Applies a real function to a Hermitian matrix through its spectrum.
template <class Fn>
Matrix hermitian_function(const HermitianMatrix& x, Fn&& fn) {
  const EigenSystem es = eigh_ordered(x);
  Vector d(es.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = fn(es.values(i));
  return es.vectors * d.asDiagonal() * es.vectors.adjoint();
}

/// Orthonormal Hermitian basis of the d x d matrices under Tr(a^dagger b):
/// symmetric and antisymmetric off-diagonal Gell-Mann elements pair by pair,
/// then the traceless diagonal ones, then I/sqrt(d) last.
inline std::vector<HermitianMatrix> hermitian_basis(int dim) {
  require(dim >= 1, ErrorKind::Shape, "hermitian_basis: dim must be >= 1");
  std::vector<HermitianMatrix> basis;
  basis.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  const double r2 = std::sqrt(0.5);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      Matrix s = Matrix::Zero(dim, dim);
      s(j, k) = r2;
      s(k, j) = r2;
      Matrix a = Matrix::Zero(dim, dim);
      a(j, k) = -kI * r2;
      a(k, j) = kI * r2;
      basis.push_back(std::move(s));
      basis.push_back(std::move(a));
    }
  }
  for (int l = 1; l < dim; ++l) {
    Matrix d = Matrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int i = 0; i < l; ++i) d(i, i) = norm;
    d(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(std::move(d));
  }
  basis.push_back(Matrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
  return basis;
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
inline double trace_norm_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Trace norm of an arbitrary square matrix (sum of singular values).
inline double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

}  // namespace eqmflow

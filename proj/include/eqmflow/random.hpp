#pragma once

#include <cstdint>
#include <random>

#include "eqmflow/linalg.hpp"

namespace eqmflow {

/// Seeded generator for random test inputs. The same seed gives the same
/// sequence within one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Complex cnormal() { return {normal(), normal()}; }

  Vector vector(int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cnormal();
    return v;
  }

  Vector unit_vector(int dim) {
    Vector v = vector(dim);
    return v / v.norm();
  }

  RealVector real_vector(int n, double scale = 1.0) {
    RealVector v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * normal();
    return v;
  }

  Matrix matrix(int dim) {
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = cnormal();
    return m;
  }

  /// GUE-like sample, exactly Hermitian.
  Matrix hermitian(int dim) {
    const Matrix m = matrix(dim);
    return 0.5 * (m + m.adjoint());
  }

  /// Full-rank density matrix with a generic spectrum.
  Matrix density(int dim) {
    const Matrix g = matrix(dim);
    Matrix r = g * g.adjoint();
    r /= r.trace().real();
    return 0.5 * (r + r.adjoint());
  }

  Matrix pure_density(int dim) {
    const Vector v = unit_vector(dim);
    return v * v.adjoint();
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace eqmflow

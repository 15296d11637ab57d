// Seeded case generators for the property tests. Each generator draws from
// its own engine so the cases depend only on (seed, index).

#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>

#include "eqmflow/eqmflow.hpp"

namespace gen {

/// Engine for case `index` of a property with base seed `seed`.
inline eqmflow::Rng case_rng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return eqmflow::Rng((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
}

/// Runs body(rng, index) for each case and tags failures with the case so
/// they can be replayed alone.
template <class Body>
void for_all(std::uint64_t seed, int cases, Body&& body) {
  for (int i = 0; i < cases; ++i) {
    SCOPED_TRACE("seed " + std::to_string(seed) + " case " + std::to_string(i));
    eqmflow::Rng rng = case_rng(seed, i);
    body(rng, i);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

inline int dim(eqmflow::Rng& rng, int lo = 2, int hi = 5) { return rng.uniform_int(lo, hi); }

/// Density matrix of random rank between 1 and d.
inline eqmflow::Matrix density_of_rank(eqmflow::Rng& rng, int d, int rank) {
  eqmflow::Matrix g = eqmflow::Matrix::Zero(d, d);
  g.leftCols(rank) = rng.matrix(d).leftCols(rank);
  eqmflow::Matrix r = g * g.adjoint();
  r /= r.trace().real();
  return eqmflow::hermitian_part(r);
}

/// Quadratic state function a0 + f1 * f2 with linear factors.
inline eqmflow::StateFunction quadratic(eqmflow::Rng& rng, int d) {
  using namespace eqmflow;
  return sum(linear_function(0.5 * rng.hermitian(d)),
             product(linear_function(0.5 * rng.hermitian(d)), linear_function(0.5 * rng.hermitian(d))));
}

}  // namespace gen

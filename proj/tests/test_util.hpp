#pragma once

#include "holoforge/linalg.hpp"

#include <random>
#include <vector>

namespace holoforge::test {

inline Vector gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline Vector unit(Index n, std::mt19937_64& rng) { return gaussian(n, rng).normalized(); }

inline Vector e(Index n, Index i) { return Vector::Unit(n, i); }

inline SubspaceBasis span_of(std::vector<Vector> vs) {
  return orthonormalize(std::span<const Vector>(vs));
}

inline Operator rotation_generator(Index n, Index i, Index j) {
  Operator a = Operator::Zero(n, n);
  a(j, i) = 1.0;
  a(i, j) = -1.0;
  return a;
}

}  // namespace holoforge::test

// Shared fixtures and small independent oracles for the test suites.
#pragma once

#include <random>
#include <vector>

#include "kstab/polytope.hpp"

namespace kstab::testing {

inline Rational q(long num, long den = 1) { return make_rational(num, den); }

inline QVec qv(std::initializer_list<long> vals) {
  QVec v;
  for (long x : vals) v.push_back(Rational(x));
  return v;
}

inline ZVec zv(std::initializer_list<long> vals) {
  ZVec v;
  for (long x : vals) v.push_back(Integer(x));
  return v;
}

/// [lo, hi] as a 1-D polytope.
inline HPolytope interval(const Rational& lo, const Rational& hi) {
  return HPolytope::from_halfspaces(1, {{{Rational(1)}, -lo}, {{Rational(-1)}, hi}});
}

/// [0,1]^n.
inline HPolytope unit_cube(int n) {
  std::vector<QHalfspace> hs;
  for (int i = 0; i < n; ++i) {
    QVec e(n, Rational(0)), me(n, Rational(0));
    e[i] = 1;
    me[i] = -1;
    hs.push_back({e, Rational(0)});
    hs.push_back({me, Rational(1)});
  }
  return HPolytope::from_halfspaces(n, std::move(hs));
}

/// conv{0, a e_1, ..., a e_n}.
inline HPolytope corner_simplex(int n, const Rational& a) {
  std::vector<QHalfspace> hs;
  for (int i = 0; i < n; ++i) {
    QVec e(n, Rational(0));
    e[i] = 1;
    hs.push_back({e, Rational(0)});
  }
  QVec diag(n, Rational(-1));
  hs.push_back({diag, a});
  return HPolytope::from_halfspaces(n, std::move(hs));
}

/// Anticanonical triangle of the projective plane: conv{(-1,-1),(2,-1),(-1,2)}.
inline HPolytope p2_triangle() {
  return HPolytope::from_halfspaces(2, {{qv({1, 0}), q(1)},
                                        {qv({0, 1}), q(1)},
                                        {qv({-1, -1}), q(1)}});
}

/// Deterministic random rational in [-bound, bound] with small denominator.
inline Rational random_rational(std::mt19937& rng, long bound, long max_den = 4) {
  std::uniform_int_distribution<long> den_dist(1, max_den);
  long den = den_dist(rng);
  std::uniform_int_distribution<long> num_dist(-bound * den, bound * den);
  return make_rational(num_dist(rng), den);
}

/// Random bounded full-dimensional polytope: a box plus a few random cuts.
inline HPolytope random_polytope(std::mt19937& rng, int n, int extra_cuts = 3) {
  for (;;) {
    std::vector<QHalfspace> hs;
    for (int i = 0; i < n; ++i) {
      QVec e(n, Rational(0)), me(n, Rational(0));
      e[i] = 1;
      me[i] = -1;
      hs.push_back({e, random_rational(rng, 2) + 2});
      hs.push_back({me, random_rational(rng, 2) + 2});
    }
    for (int k = 0; k < extra_cuts; ++k) {
      QVec u(n);
      bool zero = true;
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<long> d(-2, 2);
        u[i] = Rational(d(rng));
        if (u[i] != 0) zero = false;
      }
      if (zero) continue;
      hs.push_back({u, random_rational(rng, 3) + 3});
    }
    try {
      return HPolytope::from_halfspaces(n, std::move(hs));
    } catch (const GeometryError&) {
      continue;  // degenerate draw, retry
    }
  }
}

}  // namespace kstab::testing

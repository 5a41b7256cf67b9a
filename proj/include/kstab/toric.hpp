// The toric dictionary for the variety itself: normal fan, log discrepancy
// of monomial valuations, and the canonical deformation of the polytope.
#pragma once

#include "kstab/polytope.hpp"

namespace kstab {

/// A monomial valuation, identified with a rational covector; the zero
/// covector is the trivial valuation.
using ToricValuation = QVec;

inline bool is_trivial(const ToricValuation& xi) {
  for (const auto& c : xi)
    if (c != 0) return false;
  return true;
}

struct FanData {
  std::vector<ZVec> rays;                   // primitive facet normals, aligned with P.facets()
  std::vector<std::vector<int>> max_cones;  // per vertex of P: incident ray indices
  std::vector<bool> cone_simplicial;
  std::vector<bool> cone_smooth;  // simplicial with unimodular ray matrix
  bool has_nonsmooth_cone = false;
};

/// Normal fan of the moment polytope (one maximal cone per vertex).
FanData normal_fan(const HPolytope& p);

/// The log discrepancy of the monomial valuation xi: value of the function
/// that is linear on each maximal cone and equals 1 on every primitive ray
/// generator. On non-simplicial cones it is the linear-programming value
/// min sum c_rho with sum c_rho u_rho = xi, c >= 0 over the cone's rays.
Rational log_discrepancy(const FanData& fan, const ToricValuation& xi);

/// Moment polytope of the canonically deformed polarization: every facet
/// offset decreases by s. Throws CombinatorialCollapse when the deformation
/// changes the combinatorial type (or empties the polytope).
HPolytope deform_canonical(const HPolytope& p, const Rational& s);

}  // namespace kstab

#include "kstab/toric.hpp"

#include <algorithm>

#include "kstab/errors.hpp"
#include "kstab/lp.hpp"

namespace kstab {

FanData normal_fan(const HPolytope& p) {
  FanData fan;
  for (const auto& f : p.facets()) fan.rays.push_back(f.normal);
  const int n = p.dim();
  for (size_t v = 0; v < p.vertices().size(); ++v) {
    std::vector<int> cone = p.vertex_active()[v];
    bool simplicial = static_cast<int>(cone.size()) == n;
    bool smooth = false;
    if (simplicial) {
      QMat m(n, QVec(n));
      for (int i = 0; i < n; ++i) m[i] = to_qvec(fan.rays[cone[i]]);
      smooth = abs(determinant(m)) == 1;
    }
    fan.cone_simplicial.push_back(simplicial);
    fan.cone_smooth.push_back(smooth);
    if (!smooth) fan.has_nonsmooth_cone = true;
    fan.max_cones.push_back(std::move(cone));
  }
  return fan;
}

Rational log_discrepancy(const FanData& fan, const ToricValuation& xi) {
  if (is_trivial(xi)) return Rational(0);
  const int n = static_cast<int>(xi.size());
  std::optional<Rational> best;
  for (size_t c = 0; c < fan.max_cones.size(); ++c) {
    const auto& cone = fan.max_cones[c];
    if (fan.cone_simplicial[c]) {
      QMat m(n, QVec(n));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m[i][j] = Rational(fan.rays[cone[j]][i]);
      auto coeffs = solve_linear(std::move(m), xi);
      if (!coeffs) continue;
      bool inside = true;
      Rational sum = 0;
      for (const auto& x : *coeffs) {
        if (x < 0) {
          inside = false;
          break;
        }
        sum += x;
      }
      if (inside && (!best || sum < *best)) best = sum;
    } else {
      // min sum c_rho subject to sum c_rho u_rho = xi, c >= 0.
      const int r = static_cast<int>(cone.size());
      QMat a(n, QVec(r));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) a[i][j] = Rational(fan.rays[cone[j]][i]);
      LpResult res = solve_lp(a, xi, QVec(r, Rational(1)));
      if (res.status != LpStatus::kOptimal) continue;
      if (!best || res.value < *best) best = res.value;
    }
  }
  if (!best) throw GeometryError("valuation outside the support of the fan");
  return *best;
}

HPolytope deform_canonical(const HPolytope& p, const Rational& s) {
  std::vector<QHalfspace> hs;
  for (const auto& f : p.facets()) hs.push_back({to_qvec(f.normal), f.offset - s});
  HPolytope deformed = [&] {
    try {
      return HPolytope::from_halfspaces(p.dim(), std::move(hs), /*check_bounded=*/false);
    } catch (const GeometryError&) {
      throw CombinatorialCollapse("canonical deformation emptied the polytope at s = " +
                                  to_string(s));
    }
  }();
  // Same facet set (normals) and the same vertex-facet incidence structure.
  if (deformed.facets().size() != p.facets().size())
    throw CombinatorialCollapse("canonical deformation dropped a facet at s = " + to_string(s));
  for (size_t i = 0; i < p.facets().size(); ++i) {
    if (deformed.facets()[i].normal != p.facets()[i].normal)
      throw CombinatorialCollapse("canonical deformation changed the normal fan at s = " +
                                  to_string(s));
  }
  auto incidence = [](const HPolytope& q) {
    std::vector<std::vector<int>> inc = q.vertex_active();
    std::sort(inc.begin(), inc.end());
    return inc;
  };
  if (incidence(deformed) != incidence(p))
    throw CombinatorialCollapse("canonical deformation changed the combinatorial type at s = " +
                                to_string(s));
  return deformed;
}

}  // namespace kstab

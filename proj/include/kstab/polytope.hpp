// Exact rational convex geometry: bounded full-dimensional polytopes in
// half-space representation, vertex enumeration, triangulation, volumes,
// moments of polynomial densities, and the lattice boundary measure.
//
// Scale contract: dimensions <= 3 and a few dozen facets. Vertex enumeration
// is exhaustive over facet subsets; exactness is the point, not asymptotics.
#pragma once

#include <optional>
#include <vector>

#include "kstab/polynomial.hpp"

namespace kstab {

/// The half-space {alpha : <alpha, normal> >= -offset}.
struct Halfspace {
  ZVec normal;
  Rational offset;
};

/// Half-space with rational normal, normalized at polytope construction.
struct QHalfspace {
  QVec normal;
  Rational offset;
};

class HPolytope {
 public:
  /// Builds from half-spaces. Throws GeometryError when the data does not
  /// describe a bounded full-dimensional nonempty polytope. Redundant
  /// facets are removed; facets and vertices are put in canonical (lex)
  /// order, so equal polytopes compare equal.
  static HPolytope from_halfspaces(int dim, std::vector<QHalfspace> halfspaces,
                                   bool check_bounded = true);

  /// Like from_halfspaces but reports empty-or-degenerate as nullopt instead
  /// of throwing. Boundedness is assumed (use for cells of bounded parents).
  static std::optional<HPolytope> try_intersection(int dim, std::vector<QHalfspace> halfspaces);

  int dim() const { return dim_; }
  const std::vector<Halfspace>& facets() const { return facets_; }
  const std::vector<QVec>& vertices() const { return vertices_; }
  /// Facet indices active at each vertex.
  const std::vector<std::vector<int>>& vertex_active() const { return vertex_active_; }

  bool contains(const QVec& p) const;
  bool operator==(const HPolytope& o) const {
    return dim_ == o.dim_ && facets_size_eq(o) && vertices_ == o.vertices_;
  }

 private:
  bool facets_size_eq(const HPolytope& o) const;
  int dim_ = 0;
  std::vector<Halfspace> facets_;
  std::vector<QVec> vertices_;
  std::vector<std::vector<int>> vertex_active_;
};

/// Exact intersection with additional half-spaces; nullopt when the interior
/// vanishes (empty or lower-dimensional).
std::optional<HPolytope> intersect(const HPolytope& p, const std::vector<QHalfspace>& halfspaces);

/// Simplices as vertex-index tuples into p.vertices().
std::vector<std::vector<int>> triangulate_indices(const HPolytope& p);

Rational simplex_volume(const std::vector<QVec>& verts);
Rational integrate_polynomial_simplex(const std::vector<QVec>& verts, const Polynomial& poly);

/// Exact Euclidean (= lattice-normalized) volume.
Rational volume(const HPolytope& p);

/// Exact integral of a polynomial density over p.
Rational integrate_polynomial(const HPolytope& p, const Polynomial& poly);

struct SupportResult {
  Rational max, min;
  std::vector<int> argmax_vertices, argmin_vertices;  // indices into vertices()
};

/// Exact extrema of <., eta> over p with the optimal faces (as vertex sets).
SupportResult lp_support(const HPolytope& p, const QVec& eta);

/// Lattice-normalized parametrization of a facet: alpha = base + basis * y,
/// with basis a lattice basis of the facet normal's orthogonal sublattice.
/// Euclidean volume in y-coordinates equals the lattice facet measure.
struct FacetChart {
  QVec base;
  std::vector<QVec> basis;          // n-1 columns in ambient coordinates
  std::optional<HPolytope> poly;    // the facet in chart coordinates (n >= 2)
  std::vector<int> parent_vertices; // chart vertex i <-> parent vertex index
};

FacetChart facet_chart(const HPolytope& p, int facet_index);

/// The lattice boundary measure sigma: sigma(F) is normalized so that moving
/// every facet inward by lattice distance s changes the volume at rate
/// -sum_F sigma(F). For dim 1 every vertex facet has sigma = 1.
class FacetMeasure {
 public:
  explicit FacetMeasure(const HPolytope& p);

  const Rational& sigma(int facet) const { return sigma_[facet]; }
  size_t facet_count() const { return sigma_.size(); }
  Rational total() const;
  /// Integral of a polynomial density over facet F against d(sigma).
  Rational integrate(int facet, const Polynomial& density) const;

 private:
  HPolytope p_;
  std::vector<Rational> sigma_;
  std::vector<FacetChart> charts_;
};

/// Image of p under alpha -> M alpha + t for unimodular integer M.
HPolytope apply_unimodular(const HPolytope& p, const ZMat& m, const ZVec& t);

}  // namespace kstab

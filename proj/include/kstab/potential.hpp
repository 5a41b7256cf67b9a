// Piecewise-linear potentials in the toric dictionary: rational concave PL
// functions on the moment polytope, their convex-conjugate transforms,
// evaluation at monomial valuations, cell subdivisions, potential-level
// linear paths, the scaling action, and concave envelopes.
//
// Normalization: potentials are anchored to the trivial metric, i.e. the
// evaluation of the zero function at every valuation is zero, which keeps
// every evaluation rational.
#pragma once

#include "kstab/param_polytope.hpp"
#include "kstab/toric.hpp"

namespace kstab {

struct PLPiece {
  QVec slope;
  Rational c;
};

/// Concave PL function g(alpha) = min_k (<alpha, slope_k> + c_k) on a
/// carrier polytope. Construction normalizes: duplicate slopes keep the
/// lower constant, pieces active only on measure-zero sets are dropped,
/// pieces are sorted lexicographically.
class PLConcave {
 public:
  PLConcave(HPolytope carrier, std::vector<PLPiece> pieces);

  static PLConcave zero(const HPolytope& carrier);
  static PLConcave affine(const HPolytope& carrier, const QVec& slope, const Rational& c);

  const HPolytope& carrier() const { return carrier_; }
  const std::vector<PLPiece>& pieces() const { return pieces_; }
  /// Full-dimensional cells, aligned with pieces().
  const std::vector<HPolytope>& cells() const { return cells_; }

  Rational eval(const QVec& alpha) const;
  Rational max_over_carrier() const;
  /// Smallest positive integer b with b*slope_k integral.
  Integer multiplicity(int k) const;
  /// Deduplicated vertices of all cells.
  const std::vector<QVec>& subdivision_vertices() const { return subdiv_vertices_; }

  PLConcave operator+(const Rational& constant) const;
  bool operator==(const PLConcave& o) const {
    return carrier_ == o.carrier_ && pieces_eq(o);
  }

 private:
  bool pieces_eq(const PLConcave& o) const;
  HPolytope carrier_;
  std::vector<PLPiece> pieces_;
  std::vector<HPolytope> cells_;
  std::vector<QVec> subdiv_vertices_;
};

/// Convex transform G(eta) = max_alpha (g(alpha) - <alpha, eta>), stored by
/// its support data: points (w_j, b_j) with G = max_j (b_j - <w_j, eta>).
struct GTransform {
  int dim = 0;
  std::vector<std::pair<QVec, Rational>> points;

  Rational eval(const QVec& eta) const;
};

/// One subdivision cell of a PL potential: moment polytope of a component
/// of the degenerate fiber, with its slope and multiplicity.
struct Cell {
  HPolytope polytope;
  QVec slope;
  Integer multiplicity;
};

GTransform g_transform(const PLConcave& g);

/// Concave conjugate back from a transform; requires the transform's
/// gradient data to cover the carrier (every carrier vertex must be a convex
/// combination of the support points). Round-trips with g_transform exactly.
PLConcave inv_g_transform(const GTransform& gt, const HPolytope& carrier);

/// Potential evaluation at a monomial valuation, anchored so the zero
/// function evaluates to zero: G_g(xi) - G_0(xi). Exact rational.
Rational evaluate_potential(const PLConcave& g, const ToricValuation& xi);

/// Same evaluation for a convex max-combination of affine potentials.
Rational evaluate_potential_maxform(const std::vector<PLPiece>& max_pieces,
                                    const HPolytope& carrier, const ToricValuation& xi);

std::vector<Cell> subdivision(const PLConcave& g);

/// The PL function whose potential is the pointwise convex combination
/// s*phi_{g1} + (1-s)*phi_{g0}; endpoints are exact.
PLConcave linear_path(const PLConcave& g0, const PLConcave& g1, const Rational& s);

/// Structural cache for a whole path family: the piece set of every interior
/// path point lives over the fixed vertex set of the common refinement of
/// the two transform complexes, with constants affine in s.
class PathFamily {
 public:
  PathFamily(const PLConcave& g0, const PLConcave& g1);

  PLConcave at(const Rational& s) const;
  /// Piece data for the parametric machinery: slope eta_k, constant
  /// (1-s)*G0(eta_k) + s*G1(eta_k).
  const std::vector<QVec>& slopes() const { return etas_; }
  const QVec& g0_values() const { return v0_; }
  const QVec& g1_values() const { return v1_; }
  const HPolytope& carrier() const { return carrier_; }

  /// Indices of the pieces active on a full-dimensional cell somewhere on
  /// the open parameter interval. The linearity complex of the combined
  /// transform is constant on (0,1), so activity at the midpoint certifies
  /// the whole interior; endpoint evaluations keep the full piece set.
  const std::vector<int>& active_indices() const;

 private:
  HPolytope carrier_;
  std::vector<QVec> etas_;
  QVec v0_, v1_;
  mutable std::vector<int> active_;
};

/// Scaling action c.g (pointwise), contract: the evaluation of the scaled
/// potential at xi equals c times the evaluation of g at xi/c.
PLConcave scale_action(const PLConcave& g, const Rational& c);

/// Concave envelope of f = max_l (<alpha, slope_l> + c_l), with the contact
/// set {env(f) = f} reported as faces (vertex lists).
struct Envelope {
  PLConcave env;
  struct ContactFace {
    std::vector<QVec> vertices;
    bool full_dimensional;
  };
  std::vector<ContactFace> contact;
};

Envelope concave_envelope(const std::vector<PLPiece>& max_pieces, const HPolytope& carrier);

/// Upper concave hull pieces of weighted points (w_j, y_j); the affine
/// pieces of the hull as a min-form. Used by inv_g_transform and envelopes.
std::vector<PLPiece> concave_hull_pieces(const std::vector<std::pair<QVec, Rational>>& points);

}  // namespace kstab

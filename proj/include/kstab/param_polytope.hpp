// Parametric polytopes and min-subdivisions: half-space offsets that are
// affine in a small parameter vector, with a frozen combinatorial snapshot
// that can be exactly re-evaluated at nearby parameter values.
//
// The snapshot records, per vertex, the defining facet subset and the full
// tight pattern. Re-evaluation at a new parameter validates feasibility and
// pattern equality; any combinatorial change is detected and reported so the
// caller can re-snapshot or bisect. Quantities (volumes, weighted moments)
// are polynomial in the parameters on each combinatorial chamber, which is
// what the exact interpolation integrators upstream rely on.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kstab/polytope.hpp"

namespace kstab {

/// Half-space {alpha : <alpha, normal> >= -(c0 + <cslope, tau>)}.
struct ParamHalfspace {
  QVec normal;
  Rational c0;
  QVec cslope;

  Rational offset_at(const QVec& tau) const {
    Rational c = c0;
    for (size_t i = 0; i < cslope.size(); ++i) c += cslope[i] * tau[i];
    return c;
  }
};

/// Frozen combinatorial structure of one parametric polytope.
struct CellSnapshot {
  bool empty = true;
  std::vector<std::vector<int>> vertex_defs;   // n constraint indices per vertex
  std::vector<std::vector<int>> vertex_tight;  // full tight pattern per vertex
  std::vector<std::vector<int>> simplices;     // triangulation over vertex indices
};

class ParamPolytope {
 public:
  ParamPolytope(int dim, int nparams, std::vector<ParamHalfspace> halfspaces);

  int dim() const { return dim_; }
  int nparams() const { return nparams_; }
  const std::vector<ParamHalfspace>& halfspaces() const { return hs_; }

  /// The one-parameter family obtained by freezing every parameter except
  /// `free_param` at the given values; constraint order is preserved, so
  /// snapshots remain valid on the restriction.
  ParamPolytope restricted(int free_param, const QVec& fixed) const;

  /// Builds the combinatorial snapshot at tau (empty snapshot if the
  /// polytope has empty interior there).
  CellSnapshot snapshot(const QVec& tau) const;

  /// Vertex coordinates at tau under a frozen snapshot; nullopt when the
  /// combinatorial type changed.
  std::optional<std::vector<QVec>> evaluate(const CellSnapshot& s, const QVec& tau) const;

  /// Exact integral of a polynomial over the frozen triangulation at tau.
  static Rational integrate(const CellSnapshot& s, const std::vector<QVec>& verts,
                            const Polynomial& poly);

  /// Gauss-Legendre integral of a smooth function over the frozen
  /// triangulation at tau (for the non-polynomial weight lane).
  static double integrate_numeric(const CellSnapshot& s, const std::vector<QVec>& verts,
                                  const std::function<double(const std::vector<double>&)>& f,
                                  double rel_tol, double* achieved_err);

 private:
  int dim_;
  int nparams_;
  std::vector<ParamHalfspace> hs_;
};

/// A parametric concave-min subdivision: pieces (slope, affine-in-tau
/// constant) over a parametric carrier. Cell k is where piece k attains the
/// minimum; cells tile the carrier.
class SubdivisionFamily {
 public:
  struct Piece {
    QVec slope;
    Rational c0;
    QVec cslope;
  };

  SubdivisionFamily(int dim, int nparams, std::vector<ParamHalfspace> carrier,
                    std::vector<Piece> pieces);

  struct Snapshot {
    std::vector<CellSnapshot> cells;  // aligned with pieces
    CellSnapshot carrier;
  };

  Snapshot snapshot(const QVec& tau) const;

  /// Exact per-cell integrals of `weight` at tau; nullopt when the frozen
  /// snapshot fails validation (pattern change or tiling mismatch).
  std::optional<std::vector<Rational>> cell_integrals(const Snapshot& s, const QVec& tau,
                                                      const Polynomial& weight) const;

  /// Numeric per-cell integrals for non-polynomial densities.
  std::optional<std::vector<double>> cell_integrals_numeric(
      const Snapshot& s, const QVec& tau,
      const std::function<double(const std::vector<double>&)>& f, double rel_tol,
      double* achieved_err) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  const ParamPolytope& carrier() const { return carrier_poly_; }
  const ParamPolytope& cell_polytope(int k) const { return cell_polys_[k]; }

 private:
  ParamPolytope build_cell_polytope(int k) const;
  int dim_;
  int nparams_;
  std::vector<ParamHalfspace> carrier_;
  std::vector<Piece> pieces_;
  ParamPolytope carrier_poly_;
  std::vector<ParamPolytope> cell_polys_;
};

/// Open parameter interval on which a frozen structure remains valid.
struct Chamber {
  std::optional<Rational> lo, hi;  // nullopt = unbounded on that side
};

/// Validity interval of a frozen snapshot around probe: vertex coordinates
/// are affine in the (single) parameter, so every structure-change event is
/// an exact rational zero crossing of a constraint value. Returns nullopt
/// when the probe itself is structurally non-generic.
std::optional<Chamber> snapshot_chamber(const ParamPolytope& poly, const CellSnapshot& snap,
                                        const Rational& probe);

/// Intersection of chambers.
Chamber chamber_intersect(const Chamber& a, const Chamber& b);

/// Joint validity chamber of a subdivision snapshot (carrier and all
/// nonempty cells); cells empty at the probe carry no certificate of their
/// own, but any opening is witnessed by events on their neighbors.
std::optional<Chamber> family_chamber(const SubdivisionFamily& fam,
                                      const SubdivisionFamily::Snapshot& snap,
                                      const Rational& probe);

/// Validity chamber of a multi-parameter snapshot along one parameter line
/// (the other parameters frozen at `fixed`).
std::optional<Chamber> family_chamber_restricted(const SubdivisionFamily& fam,
                                                 const SubdivisionFamily::Snapshot& snap,
                                                 int free_param, const QVec& fixed,
                                                 const Rational& probe);

/// Snapshot of a one-parameter family whose validity chamber reaches down to
/// zero: shrinks the probe until the structure is stable on (0, hi).
/// Throws CombinatorialCollapse when no such chamber exists.
struct StableChamber {
  SubdivisionFamily::Snapshot snap;
  Rational hi;
};
StableChamber stable_chamber_to_zero(const SubdivisionFamily& fam, Rational probe_hint);

/// Exact integration of a piecewise-polynomial function of one parameter.
/// `rebuild(probe)` freezes internal structure and reports its exact
/// validity chamber (nullopt: probe non-generic, caller re-probes);
/// `eval(s)` is exact for s inside the last chamber. On each chamber the
/// function is interpolated at max_degree+1 rational nodes and cross-checked
/// at one more.
class ChamberedFunction {
 public:
  virtual ~ChamberedFunction() = default;
  virtual int max_degree() const = 0;
  virtual std::optional<Chamber> rebuild(const Rational& probe) = 0;
  virtual Rational eval(const Rational& s) = 0;
};

Rational integrate_chambered(ChamberedFunction& f, const Rational& a, const Rational& b);

/// Gauss-Legendre integral of a smooth density over a polytope with order
/// doubling until the relative change drops below rel_tol.
double integrate_numeric(const HPolytope& p,
                         const std::function<double(const std::vector<double>&)>& f,
                         double rel_tol, double* achieved_err);

}  // namespace kstab

// Non-Archimedean weighted Monge-Ampere measures of PL potentials, the
// canonical-twisted measure, the translation-invariant I functional, the
// product-configuration distance, and Monge-Ampere inversion.
#pragma once

#include "kstab/potential.hpp"
#include "kstab/weight.hpp"

namespace kstab {

struct Atom {
  ToricValuation xi;
  Scalar mass;
  Integer multiplicity;  // smallest b with b*xi integral, reported for audit
};

struct AtomicMeasure {
  std::vector<Atom> atoms;  // distinct valuations, sorted lexicographically

  Scalar total() const;
  /// Merges duplicate valuations by mass addition and sorts.
  static AtomicMeasure from_atoms(std::vector<Atom> atoms);
  const Atom* find(const ToricValuation& xi) const;
};

/// Weighted Monge-Ampere measure of a PL potential: one atom per
/// full-dimensional subdivision cell, valuation = cell slope, mass = the
/// weighted degree of the cell. Total mass is the weighted degree of the
/// polarization, exactly in the polynomial lane.
AtomicMeasure ma_weighted(const Weight& v, const PLConcave& g);

/// Canonically twisted measure: per cell, the derivative at zero of the
/// weighted cell degree along the canonical deformation with the
/// log-discrepancy shift. Signed; total mass equals the canonical degree
/// derivative exactly in the polynomial lane.
AtomicMeasure ma_twisted_canonical(const FanData& fan, const Weight& v, const PLConcave& g);

/// I_{v}(phi_g, phi_h) = sum (phi_g - phi_h) d(MA_v(h) - MA_v(g)) >= 0.
Scalar i_functional(const Weight& v, const PLConcave& g, const PLConcave& h);

/// Distance between product configurations:
/// (1/(L^n)) n! int_P |<xi - xi', alpha>| d(alpha), exact.
Rational d1_product(const HPolytope& p, const ToricValuation& xi, const ToricValuation& xi2);

struct SolveOptions {
  double residual_tol = 1e-6;
  long max_iterations = 100000;
  double mass_rel_tol = 1e-9;
};

struct SolveDiagnostics {
  double residual = 0.0;
  long iterations = 0;
};

/// Solves MA_{v}(phi_g) = mu for g, normalized by max_P g = 0. The measure
/// must be positive with total mass deg_v(L) (relative tolerance). Residual
/// below options.residual_tol per atom or NonConvergence.
PLConcave solve_ma(const HPolytope& p, const Weight& v, const AtomicMeasure& mu,
                   const SolveOptions& options = {}, SolveDiagnostics* diag = nullptr);

}  // namespace kstab

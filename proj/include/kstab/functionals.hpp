// Energy-side functionals: weighted Monge-Ampere energy, canonical (Ricci)
// energy, weighted entropy, the weighted Mabuchi functional assembled by the
// Chen-Tian decomposition, Futaki characters of product configurations, and
// the extremal affine function.
//
// All functionals use unnormalized weighted masses (total = weighted degree);
// the probability-normalized unweighted theory corresponds to the constant
// weight 1/degree.
#pragma once

#include "kstab/measure.hpp"

namespace kstab {

/// Euler-Lagrange energy of the weighted Monge-Ampere operator along the
/// potential-level segment from zero: integral over s in [0,1] of the
/// pairing of the path's measure against the potential of g. Exact rational
/// for polynomial weights; quadrature with reported error otherwise.
Scalar energy_weighted(const Weight& v, const PLConcave& g);

/// Canonical twisted energy (the Ricci energy): same path integral against
/// the canonically twisted measures.
Scalar ricci_energy(const FanData& fan, const Weight& v, const PLConcave& g);

/// Weighted entropy: log discrepancy integrated against the weighted
/// Monge-Ampere measure. Exact for polynomial weights.
Scalar entropy_weighted(const FanData& fan, const Weight& v, const PLConcave& g);

struct FunctionalReport {
  Scalar e_v;      // energy with weight v
  Scalar r_v;      // canonical twisted energy
  Scalar h_v;      // weighted entropy
  Scalar e_vw;     // energy with weight v*w
  Scalar m_vw;     // h_v + r_v + e_vw
  Scalar deg_v;    // weighted degree of the polarization
  Scalar deg_v_canonical;  // canonical degree derivative
  Scalar mass_balance;     // deg_{vw} + deg_v_canonical; zero iff translation invariant
  bool translation_invariant = false;
  // Boundary-integral cross-check, attached when v and w are constants with
  // w equal to the mean weighted scalar degree.
  std::optional<Scalar> boundary_oracle;
  std::optional<double> boundary_oracle_gap;
};

FunctionalReport mabuchi(const FanData& fan, const Weight& v, const Weight& w,
                         const PLConcave& g);

/// Futaki character of the product configuration in direction xi.
Scalar futaki(const HPolytope& p, const FanData& fan, const Weight& v, const Weight& w,
              const ToricValuation& xi);

struct ExtremalFunction {
  QVec lambda;  // affine function <alpha, lambda> + c
  Rational c;
  double condition_estimate = 0.0;

  Polynomial as_polynomial() const {
    Polynomial l = Polynomial::constant(static_cast<int>(lambda.size()), c);
    for (size_t i = 0; i < lambda.size(); ++i)
      l += Polynomial::coordinate(static_cast<int>(lambda.size()), static_cast<int>(i)) *
           lambda[i];
    return l;
  }
};

/// The unique affine function making the relative weighted Mabuchi
/// functional translation invariant and torus invariant: solves the linear
/// system of the mass balance plus Futaki vanishing in all basis directions.
ExtremalFunction extremal_function(const HPolytope& p, const FanData& fan, const Weight& v,
                                   const Weight& w);

/// Independent boundary-integral expression for the unweighted Mabuchi
/// functional on toric data: mean-degree times bulk integral minus the
/// lattice boundary integral of g. Used as a cross-check oracle.
Rational donaldson_boundary_formula(const PLConcave& g);

}  // namespace kstab

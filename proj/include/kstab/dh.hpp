// Duistermaat-Heckman measures of toric polarizations and their exact
// pushforwards under integral lattice projections.
//
// Convention: the full-torus measure is n! times Lebesgue measure on P, so
// the total mass is the top self-intersection degree. Some of the literature
// divides by n!; every mass produced here carries the n! factor.
#pragma once

#include "kstab/weight.hpp"

namespace kstab {

/// A piecewise-polynomial measure on a polyhedral complex in the target
/// lattice, carrying the ambient n! factor separately.
struct DHMeasure {
  int source_dim = 0;
  int target_dim = 0;
  Integer factor = 1;  // n! of the source torus dimension

  // target_dim >= 1: cells with polynomial fiber-volume densities.
  struct Cell {
    HPolytope carrier;
    Polynomial density;
  };
  std::vector<Cell> cells;

  // target_dim == 0: a single atom (Lebesgue part of the mass, factor apart).
  Rational atom_mass = 0;

  /// Total mass including the n! factor; exact.
  Rational total_mass() const;

  /// Integral of a polynomial in the target coordinates, including factor.
  Rational integrate(const Polynomial& w) const;
};

/// The full-torus measure n!.Lebesgue on P.
DHMeasure dh_measure(const HPolytope& p);

/// Exact pushforward under a full-rank integral surjection proj (m x n).
/// The density on each chamber of the image is the exact polynomial fiber
/// volume; total mass is preserved.
DHMeasure pushforward(const HPolytope& p, const ZMat& proj);

}  // namespace kstab

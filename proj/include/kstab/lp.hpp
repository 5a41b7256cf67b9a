// Exact rational linear programming (dense simplex, Bland's rule).
// Problems here are tiny (tens of variables); exactness matters, speed not.
#pragma once

#include "kstab/linalg.hpp"

namespace kstab {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status;
  Rational value;  // optimal objective (minimization)
  QVec x;          // optimizer, size = #vars
};

/// Minimizes c.x subject to A x = b, x >= 0.
LpResult solve_lp(const QMat& a, const QVec& b, const QVec& c);

/// Feasibility of A x = b, x >= 0.
bool lp_feasible(const QMat& a, const QVec& b);

}  // namespace kstab

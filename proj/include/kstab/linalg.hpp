// Small dense exact linear algebra over the rationals, plus the integer
// lattice utilities (primitive vectors, kernel bases, unimodular maps)
// that the polytope kernel relies on.
#pragma once

#include <optional>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

using QVec = std::vector<Rational>;
using ZVec = std::vector<Integer>;
using QMat = std::vector<QVec>;  // row major
using ZMat = std::vector<ZVec>;  // row major

Rational dot(const QVec& a, const QVec& b);
Rational dot(const QVec& a, const ZVec& b);
QVec add(const QVec& a, const QVec& b);
QVec sub(const QVec& a, const QVec& b);
QVec scale(const QVec& a, const Rational& c);

bool lex_less(const QVec& a, const QVec& b);

/// Solves A x = b exactly; returns nullopt when A is singular.
std::optional<QVec> solve_linear(QMat a, QVec b);

/// Rank of a rational matrix.
int rank(QMat a);

/// Determinant of a square rational matrix.
Rational determinant(QMat a);

/// Rational kernel basis of an m x n matrix (vectors of length n).
std::vector<QVec> kernel_basis(QMat a);

/// Solves A x = b for a general (possibly rectangular / rank-deficient)
/// system; returns nullopt when inconsistent.
std::optional<QVec> solve_least_structured(const QMat& a, const QVec& b);

/// Divides an integer vector by the gcd of its entries; zero vector rejected.
/// Sign convention: the first nonzero entry of the result keeps its sign.
ZVec primitive(ZVec v);

/// Scales a rational vector to the primitive integer vector on the same ray.
ZVec primitive_direction(const QVec& v);

/// Unimodular matrix U (n x n, integer, det = +-1) with u^T U = e_1^T for a
/// primitive integer vector u. Columns 2..n of U form a lattice basis of the
/// hyperplane u^perp.
ZMat unimodular_completion(const ZVec& u);

/// Matrix-vector products.
QVec mat_vec(const QMat& a, const QVec& x);
QVec mat_vec(const ZMat& a, const QVec& x);
ZVec mat_vec(const ZMat& a, const ZVec& x);

ZMat transpose(const ZMat& a);

/// Smith-style reduction for a full-rank integral surjection p : Z^n -> Z^m.
/// Returns unimodular U (n x n) and V (m x m) with p = V [I_m | 0] U.
struct SurjectionFactorization {
  ZMat u;  // n x n unimodular
  ZMat v;  // m x m unimodular
};
SurjectionFactorization factor_surjection(const ZMat& p);

inline QVec to_qvec(const ZVec& v) {
  QVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

}  // namespace kstab

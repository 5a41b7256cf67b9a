// Sparse multivariate polynomials with rational coefficients.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "kstab/linalg.hpp"

namespace kstab {

class Polynomial {
 public:
  // Terms keyed by exponent vector (length = nvars), zero coefficients pruned.
  using Terms = std::map<std::vector<int>, Rational>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Rational& c);
  /// The coordinate monomial alpha_i.
  static Polynomial coordinate(int nvars, int i);
  /// Affine polynomial <alpha, xi> + c.
  static Polynomial affine(const QVec& xi, const Rational& c);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const;

  void add_term(const std::vector<int>& exps, const Rational& coef);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& c) const;
  Polynomial operator-() const { return *this * Rational(-1); }

  Rational eval(const QVec& point) const;

  /// Substitutes alpha_i = base_i + sum_j cols[j][i] * y_j, producing a
  /// polynomial in the y variables (one per column).
  Polynomial compose_affine(const QVec& base, const std::vector<QVec>& cols) const;

  /// Antiderivative in variable i (constant of integration zero).
  Polynomial antiderivative(int var) const;

  /// Partial derivative in variable i.
  Polynomial derivative(int var) const;

  /// Substitutes variable `var` by the affine form <rest, coeffs> + c of the
  /// remaining variables, producing a polynomial in nvars-1 variables.
  Polynomial substitute_var(int var, const QVec& coeffs, const Rational& c) const;

  bool operator==(const Polynomial& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

  std::string str() const;

 private:
  int nvars_;
  Terms terms_;
};

/// Lagrange interpolation through (x_i, y_i); exact, nodes distinct.
/// Returns coefficients c_0..c_d of c_0 + c_1 t + ... + c_d t^d.
QVec interpolate_polynomial(const QVec& xs, const QVec& ys);

/// Evaluates a univariate coefficient vector at t.
Rational eval_univariate(const QVec& coeffs, const Rational& t);

/// Integrates a univariate coefficient vector over [a, b].
Rational integrate_univariate(const QVec& coeffs, const Rational& a, const Rational& b);

/// Derivative coefficients of a univariate coefficient vector.
QVec derive_univariate(const QVec& coeffs);

}  // namespace kstab

// Weight functions on moment coordinates: exact polynomials or the
// exponential-of-linear preset, weighted degrees, and the facet-displacement
// derivative of weighted degrees.
#pragma once

#include <optional>

#include "kstab/polytope.hpp"
#include "kstab/scalar.hpp"

namespace kstab {

class Weight {
 public:
  static Weight polynomial(Polynomial p);
  static Weight constant(int dim, const Rational& c);
  /// exp(scale * <xi0, alpha>).
  static Weight exp_linear(QVec xi0, Rational scale);

  bool is_polynomial() const { return kind_ == Kind::kPolynomial; }
  int dim() const { return dim_; }
  const Polynomial& poly() const;
  const QVec& xi0() const { return xi0_; }
  const Rational& exp_scale() const { return scale_; }

  Scalar eval(const QVec& alpha) const;
  double eval_double(const std::vector<double>& alpha) const;

  /// Pointwise product; defined when at least one side is polynomial (an
  /// exponential weight times a polynomial stays integrable numerically).
  Weight operator*(const Weight& o) const;

  /// Positivity on P checked at vertices plus a 10^n sample grid; recorded,
  /// not enforced. A negative sample only triggers a warning downstream.
  struct PositivityReport {
    bool positive_on_samples;
    int samples_checked;
  };
  PositivityReport check_positivity(const HPolytope& p) const;

  std::optional<bool> claimed_positive;
  std::optional<bool> claimed_log_concave;
  /// Extra polynomial factor attached to an exponential weight by products.
  const Polynomial& exp_poly_factor() const { return poly_; }

 private:
  enum class Kind { kPolynomial, kExpLinear };
  Kind kind_ = Kind::kPolynomial;
  int dim_ = 0;
  Polynomial poly_{0};  // the polynomial, or the polynomial factor of an exp weight
  QVec xi0_;
  Rational scale_ = 0;
};

/// Relative quadrature tolerance for the exponential-weight lane.
inline constexpr double kExpQuadratureRelTol = 1e-12;

/// n! * integral of v over P: the v-weighted degree of the polarization.
/// Exact rational for polynomial weights.
Scalar integrate_weight(const HPolytope& p, const Weight& v);

/// Directional derivative of the weighted degree under facet displacement:
/// -n! * sum_F d_F * int_F v dsigma. `displacement` is per-facet (aligned
/// with p.facets()); the all-ones displacement gives the canonical direction.
Scalar degree_derivative(const HPolytope& p, const Weight& v, const std::vector<Rational>& displacement);
Scalar degree_derivative_canonical(const HPolytope& p, const Weight& v);

}  // namespace kstab

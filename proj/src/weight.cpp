#include "kstab/weight.hpp"

#include <cmath>

#include "kstab/param_polytope.hpp"

namespace kstab {

Weight Weight::polynomial(Polynomial p) {
  Weight w;
  w.kind_ = Kind::kPolynomial;
  w.dim_ = p.nvars();
  w.poly_ = std::move(p);
  return w;
}

Weight Weight::constant(int dim, const Rational& c) {
  return polynomial(Polynomial::constant(dim, c));
}

Weight Weight::exp_linear(QVec xi0, Rational scale) {
  Weight w;
  w.kind_ = Kind::kExpLinear;
  w.dim_ = static_cast<int>(xi0.size());
  w.poly_ = Polynomial::constant(w.dim_, Rational(1));
  w.xi0_ = std::move(xi0);
  w.scale_ = std::move(scale);
  return w;
}

const Polynomial& Weight::poly() const {
  if (!is_polynomial()) throw InputError("weight is not polynomial");
  return poly_;
}

Scalar Weight::eval(const QVec& alpha) const {
  if (is_polynomial()) return Scalar(poly_.eval(alpha));
  double arg = to_double(scale_ * dot(alpha, xi0_));
  double v = to_double(poly_.eval(alpha)) * std::exp(arg);
  return Scalar::approx(v, std::fabs(v) * 1e-15);
}

double Weight::eval_double(const std::vector<double>& alpha) const {
  double poly_val = 0.0;
  for (const auto& [e, c] : poly_.terms()) {
    double t = to_double(c);
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= alpha[i];
    poly_val += t;
  }
  if (is_polynomial()) return poly_val;
  double arg = 0.0;
  for (int i = 0; i < dim_; ++i) arg += to_double(xi0_[i]) * alpha[i];
  return poly_val * std::exp(to_double(scale_) * arg);
}

Weight Weight::operator*(const Weight& o) const {
  if (dim_ != o.dim_) throw InputError("weight dimension mismatch");
  if (kind_ == Kind::kExpLinear && o.kind_ == Kind::kExpLinear)
    throw InputError("product of two exponential weights is not supported");
  Weight w = kind_ == Kind::kExpLinear ? *this : o;
  const Polynomial& other_poly = kind_ == Kind::kExpLinear ? o.poly_ : poly_;
  w.poly_ = w.poly_ * other_poly;
  if (w.kind_ == Kind::kPolynomial) w.dim_ = dim_;
  return w;
}

Weight::PositivityReport Weight::check_positivity(const HPolytope& p) const {
  int checked = 0;
  bool ok = true;
  for (const auto& v : p.vertices()) {
    ++checked;
    if (eval(v).value() <= 0) ok = false;
  }
  // 10 steps per dimension across the bounding box, restricted to P.
  const int n = p.dim();
  QVec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    QVec e(n, Rational(0));
    e[i] = 1;
    SupportResult r = lp_support(p, e);
    lo[i] = r.min;
    hi[i] = r.max;
  }
  std::vector<int> idx(n, 0);
  const int steps = 10;
  for (;;) {
    QVec pt(n);
    for (int i = 0; i < n; ++i)
      pt[i] = lo[i] + (hi[i] - lo[i]) * Rational(idx[i]) / Rational(steps - 1);
    if (p.contains(pt)) {
      ++checked;
      if (eval(pt).value() <= 0) ok = false;
    }
    int c = 0;
    while (c < n && ++idx[c] == steps) idx[c++] = 0;
    if (c == n) break;
  }
  return {ok, checked};
}

namespace {

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Scalar integrate_weight(const HPolytope& p, const Weight& v) {
  const Integer nf = factorial(p.dim());
  if (v.is_polynomial()) {
    return Scalar(integrate_polynomial(p, v.poly()) * Rational(nf));
  }
  double err = 0.0;
  double val = integrate_numeric(
      p, [&](const std::vector<double>& x) { return v.eval_double(x); }, kExpQuadratureRelTol,
      &err);
  double f = to_double(Rational(nf));
  return Scalar::approx(val * f, err * f);
}

Scalar degree_derivative(const HPolytope& p, const Weight& v,
                         const std::vector<Rational>& displacement) {
  if (displacement.size() != p.facets().size())
    throw InputError("displacement must assign a value to every facet");
  const Integer nf = factorial(p.dim());
  FacetMeasure fm(p);
  if (v.is_polynomial()) {
    Rational total = 0;
    for (size_t f = 0; f < p.facets().size(); ++f) {
      if (displacement[f] == 0) continue;
      total += displacement[f] * fm.integrate(static_cast<int>(f), v.poly());
    }
    return Scalar(-total * Rational(nf));
  }
  // Exponential lane: integrate numerically over each facet chart.
  double total = 0.0, err_total = 0.0;
  for (size_t f = 0; f < p.facets().size(); ++f) {
    if (displacement[f] == 0) continue;
    FacetChart chart = facet_chart(p, static_cast<int>(f));
    double part = 0.0, err = 0.0;
    if (p.dim() == 1) {
      part = v.eval_double({to_double(chart.base[0])});
    } else {
      auto density = [&](const std::vector<double>& y) {
        std::vector<double> alpha(p.dim());
        for (int i = 0; i < p.dim(); ++i) {
          double x = to_double(chart.base[i]);
          for (size_t j = 0; j < chart.basis.size(); ++j)
            x += to_double(chart.basis[j][i]) * y[j];
          alpha[i] = x;
        }
        return v.eval_double(alpha);
      };
      part = integrate_numeric(*chart.poly, density, kExpQuadratureRelTol, &err);
    }
    total += to_double(displacement[f]) * part;
    err_total += std::fabs(to_double(displacement[f])) * err;
  }
  double f = to_double(Rational(nf));
  return Scalar::approx(-total * f, err_total * f);
}

Scalar degree_derivative_canonical(const HPolytope& p, const Weight& v) {
  return degree_derivative(p, v, std::vector<Rational>(p.facets().size(), Rational(1)));
}

}  // namespace kstab

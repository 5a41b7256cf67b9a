#include "kstab/polynomial.hpp"

#include <numeric>
#include <sstream>

namespace kstab {

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(std::vector<int>(nvars, 0), c);
  return p;
}

Polynomial Polynomial::coordinate(int nvars, int i) {
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  e[i] = 1;
  p.add_term(e, Rational(1));
  return p;
}

Polynomial Polynomial::affine(const QVec& xi, const Rational& c) {
  const int n = static_cast<int>(xi.size());
  Polynomial p = constant(n, c);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    p.add_term(e, xi[i]);
  }
  return p;
}

bool Polynomial::is_constant() const {
  for (const auto& [e, c] : terms_) {
    for (int k : e)
      if (k != 0) return false;
  }
  return true;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

void Polynomial::add_term(const std::vector<int>& exps, const Rational& coef) {
  if (coef == 0) return;
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    terms_.emplace(exps, coef);
  } else {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(nvars_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      std::vector<int> e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  }
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(nvars_);
  if (c == 0) return r;
  for (const auto& [e, coef] : terms_) r.terms_.emplace(e, coef * c);
  return r;
}

Rational Polynomial::eval(const QVec& point) const {
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    s += t;
  }
  return s;
}

Polynomial Polynomial::compose_affine(const QVec& base, const std::vector<QVec>& cols) const {
  const int m = static_cast<int>(cols.size());
  Polynomial result(m);
  // alpha_i as a polynomial in y.
  std::vector<Polynomial> alpha(nvars_);
  for (int i = 0; i < nvars_; ++i) {
    QVec row(m);
    for (int j = 0; j < m; ++j) row[j] = cols[j][i];
    alpha[i] = Polynomial::affine(row, base[i]);
  }
  for (const auto& [e, c] : terms_) {
    Polynomial t = Polynomial::constant(m, c);
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t = t * alpha[i];
    result += t;
  }
  return result;
}

Polynomial Polynomial::antiderivative(int var) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    std::vector<int> e2 = e;
    e2[var] += 1;
    r.add_term(e2, c / e2[var]);
  }
  return r;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> e2 = e;
    e2[var] -= 1;
    r.add_term(e2, c * e[var]);
  }
  return r;
}

Polynomial Polynomial::substitute_var(int var, const QVec& coeffs, const Rational& c) const {
  const int m = nvars_ - 1;
  // Build the affine image of each original variable in the reduced ring.
  QVec base(nvars_, Rational(0));
  std::vector<QVec> cols(m, QVec(nvars_, Rational(0)));
  int j = 0;
  for (int i = 0; i < nvars_; ++i) {
    if (i == var) continue;
    cols[j][i] = 1;
    cols[j][var] = coeffs[j];
    ++j;
  }
  base[var] = c;
  return compose_affine(base, cols);
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] > 0) os << "*a" << i << "^" << e[i];
    }
  }
  return os.str();
}

QVec interpolate_polynomial(const QVec& xs, const QVec& ys) {
  const int n = static_cast<int>(xs.size());
  // Newton divided differences, then expand to monomial coefficients.
  QVec dd = ys;
  for (int level = 1; level < n; ++level) {
    for (int i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
    }
  }
  QVec coeffs(n, Rational(0));
  QVec basis(n, Rational(0));  // expanding product (t-x_0)...(t-x_{k-1})
  basis[0] = 1;
  int basis_deg = 0;
  for (int k = 0; k < n; ++k) {
    for (int d = 0; d <= basis_deg; ++d) coeffs[d] += dd[k] * basis[d];
    if (k + 1 < n) {
      for (int d = basis_deg + 1; d >= 1; --d) basis[d] = basis[d - 1] - xs[k] * basis[d];
      basis[0] = -xs[k] * basis[0];
      ++basis_deg;
    }
  }
  return coeffs;
}

Rational eval_univariate(const QVec& coeffs, const Rational& t) {
  Rational v = 0;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) v = v * t + coeffs[i];
  return v;
}

Rational integrate_univariate(const QVec& coeffs, const Rational& a, const Rational& b) {
  Rational va = 0, vb = 0;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    Rational c = coeffs[i] / (i + 1);
    va = va * a + c;
    vb = vb * b + c;
  }
  return vb * b - va * a;
}

QVec derive_univariate(const QVec& coeffs) {
  if (coeffs.size() <= 1) return {Rational(0)};
  QVec d(coeffs.size() - 1);
  for (size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = coeffs[i] * static_cast<long>(i);
  return d;
}

}  // namespace kstab

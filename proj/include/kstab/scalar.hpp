// A number that is either an exact rational or a floating value with a
// tracked absolute error bound. Exactness propagates through arithmetic:
// polynomial-weight pipelines stay rational end to end, exponential-weight
// pipelines degrade to floats with explicit bounds.
#pragma once

#include <cmath>
#include <limits>

#include "kstab/rational.hpp"

namespace kstab {

class Scalar {
 public:
  Scalar() : exact_(true), q_(0), d_(0.0), err_(0.0) {}
  Scalar(const Rational& q) : exact_(true), q_(q), d_(to_double(q)), err_(0.0) {}
  Scalar(long v) : Scalar(Rational(v)) {}
  static Scalar approx(double v, double abs_err) {
    Scalar s;
    s.exact_ = false;
    s.q_ = 0;
    s.d_ = v;
    s.err_ = abs_err;
    return s;
  }

  bool exact() const { return exact_; }
  const Rational& rational() const {
    if (!exact_) throw InputError("Scalar is not exact");
    return q_;
  }
  double value() const { return exact_ ? to_double(q_) : d_; }
  double error() const { return err_; }

  Scalar operator-() const {
    if (exact_) return Scalar(Rational(-q_));
    return approx(-d_, err_);
  }
  Scalar& operator+=(const Scalar& o) { return assign_add(o, false); }
  Scalar& operator-=(const Scalar& o) { return assign_add(o, true); }
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(Rational(a.q_ * b.q_));
    double av = a.value(), bv = b.value();
    double err = std::fabs(av) * b.err_ + std::fabs(bv) * a.err_ + a.err_ * b.err_ +
                 4 * std::numeric_limits<double>::epsilon() * std::fabs(av * bv);
    return approx(av * bv, err);
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
      if (b.q_ == 0) throw InputError("Scalar division by zero");
      return Scalar(Rational(a.q_ / b.q_));
    }
    double av = a.value(), bv = b.value();
    double err = (a.err_ + std::fabs(av / bv) * b.err_) / std::fabs(bv) +
                 4 * std::numeric_limits<double>::epsilon() * std::fabs(av / bv);
    return approx(av / bv, err);
  }

 private:
  Scalar& assign_add(const Scalar& o, bool negate) {
    if (exact_ && o.exact_) {
      q_ += negate ? Rational(-o.q_) : o.q_;
      d_ = to_double(q_);
      return *this;
    }
    double ov = negate ? -o.value() : o.value();
    double v = value() + ov;
    double err = err_ + o.err_ + 2 * std::numeric_limits<double>::epsilon() * std::fabs(v);
    *this = approx(v, err);
    return *this;
  }

  bool exact_;
  Rational q_;
  double d_;
  double err_;
};

}  // namespace kstab

// Exact rational scalar type and parsing/formatting helpers.
//
// All exact arithmetic in the library runs on GMP rationals. GMP keeps
// results of arithmetic canonical (gcd(num, den) = 1, den > 0), but raw
// construction from strings or from a (num, den) pair does not, so every
// construction goes through the helpers below.
#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

#include "kstab/errors.hpp"

namespace kstab {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Canonical rational from a numerator/denominator pair.
inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw InputError("rational with zero denominator");
  Rational q;
  mpq_set_num(q.backend().data(), num.backend().data());
  mpq_set_den(q.backend().data(), den.backend().data());
  mpq_canonicalize(q.backend().data());
  return q;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(Integer(num), Integer(den));
}

/// Parses "p", "-p/q" or a plain integer string into a canonical rational.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw InputError("empty rational literal");
  try {
    Rational q(s);
    mpq_canonicalize(q.backend().data());
    return q;
  } catch (const std::exception&) {
    throw InputError("malformed rational literal: '" + s + "'");
  }
}

inline std::string to_string(const Rational& q) { return q.str(); }

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline int sign(const Rational& q) { return mpq_sgn(q.backend().data()); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Nearest rational with denominator dividing 2^bits; used to feed floating
/// iterates back into the exact kernel without denominator blow-up.
inline Rational rationalize(double x, unsigned bits = 40) {
  if (!(x == x)) throw InputError("cannot rationalize NaN");
  Rational exact;
  mpq_set_d(exact.backend().data(), x);
  Integer scale = Integer(1) << bits;
  Rational scaled = exact * scale;
  Integer n = numerator(scaled), d = denominator(scaled);
  Integer nearest = n >= 0 ? Integer((2 * n + d) / (2 * d)) : Integer(-((-2 * n + d) / (2 * d)));
  return make_rational(nearest, scale);
}

}  // namespace kstab

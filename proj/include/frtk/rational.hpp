#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "frtk/errors.hpp"

namespace frtk {

// Exact arbitrary-precision rational. mpq_class keeps values canonical
// (gcd(num, den) = 1, den > 0) through arithmetic; the constructors here
// canonicalize explicitly.
using Rational = mpq_class;
using RatVec = std::vector<Rational>;

// Parses "p", "-p" or "p/q". Throws ParseError on anything else or q = 0.
inline Rational rat_from_string(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  for (char ch : text) {
    if (!(ch == '-' || ch == '/' || (ch >= '0' && ch <= '9')))
      throw ParseError("bad rational literal: " + text);
  }
  Rational r;
  if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
    throw ParseError("bad rational literal: " + text);
  if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
    throw ParseError("zero denominator: " + text);
  r.canonicalize();
  return r;
}

// "p/q" with q omitted when 1.
inline std::string rat_to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Exact conversion: every finite double is dyadic.
inline Rational rat_from_double(double x) {
  if (!(x == x) || x > 1.7976931348623157e308 || x < -1.7976931348623157e308)
    throw NonFinite("non-finite value cannot become a rational");
  Rational r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

inline double rat_to_double(const Rational& r) { return r.get_d(); }

inline bool rat_is_integer(const Rational& r) { return r.get_den() == 1; }

// The two-argument mpq_class constructor does not canonicalize; this does.
inline Rational rat(long num, long den = 1) {
  if (den == 0) throw ParseError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace frtk

#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairsignal {

// Exact arithmetic everywhere in the library. mpq_class keeps values in
// canonical (reduced, positive denominator) form after every operation.
using Rational = mpq_class;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts "p/q", integers, and decimal literals with an optional exponent
// ("0.25", "-1.5e-3"). Decimals are converted exactly: "0.1" is 1/10.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& r);

// Fixed-point decimal rounded to `digits` fractional digits (half away from
// zero). Used for plot-ready CSV columns.
std::string to_decimal(const Rational& r, int digits = 12);

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace fairsignal

#include "fairsignal/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace fairsignal {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

mpz_class pow10(unsigned long e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, e);
  return out;
}

Rational parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ParseError("not an integer: '" + std::string(s) + "'");
  mpz_class z(std::string(s), 10);
  if (negative) z = -z;
  return Rational(z);
}

Rational parse_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    std::string_view digits = exp_part;
    if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) digits.remove_prefix(1);
    if (!all_digits(digits) || digits.size() > 6) {
      throw ParseError("bad exponent in '" + std::string(exp_part) + "'");
    }
    exponent = std::strtol(std::string(exp_part).c_str(), nullptr, 10);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    throw ParseError("not a decimal number: '" + std::string(s) + "'");
  }
  std::string mantissa = std::string(int_part) + std::string(frac_part);
  mpz_class num(mantissa.empty() ? std::string("0") : mantissa, 10);
  long scale = exponent - static_cast<long>(frac_part.size());
  Rational out(num);
  if (scale > 0) {
    out *= Rational(pow10(static_cast<unsigned long>(scale)));
  } else if (scale < 0) {
    out /= Rational(pow10(static_cast<unsigned long>(-scale)));
  }
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty rational");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_integer(trim(s.substr(0, slash)));
    Rational den = parse_integer(trim(s.substr(slash + 1)));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    Rational out = num / den;
    out.canonicalize();
    return out;
  }
  return parse_decimal(s);
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_decimal(const Rational& r, int digits) {
  if (digits < 0) digits = 0;
  mpz_class scale = pow10(static_cast<unsigned long>(digits));
  mpz_class num = abs(r.get_num()) * scale;
  mpz_class den = r.get_den();
  // Round half away from zero: floor((2*num + den) / (2*den)).
  mpz_class scaled = (2 * num + den) / (2 * den);
  std::string body = scaled.get_str();
  if (digits > 0) {
    if (body.size() <= static_cast<size_t>(digits)) {
      body.insert(0, static_cast<size_t>(digits) + 1 - body.size(), '0');
    }
    body.insert(body.size() - static_cast<size_t>(digits), ".");
  }
  bool zero = scaled == 0;
  return (r < 0 && !zero ? "-" : "") + body;
}

}  // namespace fairsignal

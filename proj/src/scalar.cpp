#include "warpkit/scalar.hpp"

#include <cctype>

namespace warpkit {

namespace {

bool is_plain_integer(const std::string& s) {
  std::size_t i = (s.size() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

boost::multiprecision::mpz_int parse_int(const std::string& s) {
  if (!is_plain_integer(s)) throw PreconditionError("not a number: '" + s + "'");
  return boost::multiprecision::mpz_int(s[0] == '+' ? s.substr(1) : s);
}

// decimal with optional exponent, as an exact fraction
Rational parse_decimal(const std::string& s) {
  std::string mant = s;
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    mant = s.substr(0, epos);
    std::string e = s.substr(epos + 1);
    if (!is_plain_integer(e)) throw PreconditionError("not a number: '" + s + "'");
    exp10 = std::stol(e);
  }
  std::string digits;
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    std::string frac = mant.substr(dot + 1);
    digits = mant.substr(0, dot) + frac;
    exp10 -= static_cast<long>(frac.size());
    if (digits == "" || digits == "-" || digits == "+") throw PreconditionError("not a number: '" + s + "'");
  } else {
    digits = mant;
  }
  Rational r(parse_int(digits));
  boost::multiprecision::mpz_int p = boost::multiprecision::pow(boost::multiprecision::mpz_int(10),
                                                                static_cast<unsigned>(std::labs(exp10)));
  return exp10 >= 0 ? Rational(r * Rational(p)) : Rational(r / Rational(p));
}

}  // namespace

template <>
Rational parse_scalar<Rational>(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    auto num = parse_int(s.substr(0, slash));
    auto den = parse_int(s.substr(slash + 1));
    if (den == 0) throw PreconditionError("zero denominator in '" + raw + "'");
    return Rational(num, den);
  }
  return parse_decimal(s);
}

template <>
double parse_scalar<double>(const std::string& raw) {
  Rational q = parse_scalar<Rational>(raw);
  return q.convert_to<double>();
}

}  // namespace warpkit

#include "sievekit/rational.hpp"

#include <sstream>
#include <stdexcept>

namespace sievekit {

namespace {

// base-10 only; leading zeros would switch cpp_int's parser into octal
BigInt parse_decimal_int(std::string digits) {
  bool negative = false;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    negative = digits[0] == '-';
    digits.erase(digits.begin());
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("parse_rational: bad integer '" + digits + "'");
  const auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  BigInt v(digits);
  return negative ? -v : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt num = parse_decimal_int(text.substr(0, slash));
    const BigInt den = parse_decimal_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_decimal_int(text));
  // decimal: scaled integer over a power of ten, exactly
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty() || digits == "-" || digits == "+")
    throw std::invalid_argument("parse_rational: bad decimal '" + text + "'");
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(parse_decimal_int(digits), den);
}

std::string to_string(const Rational& value) {
  std::ostringstream out;
  out << numerator(value);
  if (denominator(value) != 1) out << '/' << denominator(value);
  return out.str();
}

}  // namespace sievekit

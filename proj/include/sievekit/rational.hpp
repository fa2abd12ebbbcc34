#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace sievekit {

// Exact rational arithmetic for all exponent-space membership and
// factorization work. Boundary comparisons in the support sets mix strict and
// non-strict inequalities, so floating point is never used there.
// Expression templates are off so arithmetic composes with std::min/max.
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p/q" or a decimal literal ("0.125" -> 1/8) exactly.
Rational parse_rational(const std::string& text);

/// Canonical "p/q" (or "p" when q == 1) rendering.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace sievekit

#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace toricgh {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

using IVector = std::vector<Integer>;
using RVector = std::vector<Rational>;

/// Parses "p/q" or "p". Decimal points are rejected; use parse_decimal for those.
Rational parse_rational(std::string_view text);

/// Parses "p/q", "p" or a plain decimal such as "0.05" (read exactly as 1/20).
Rational parse_decimal(std::string_view text);

/// Nearest short decimal: the double is printed with 15 significant digits and read back exactly.
Rational rational_from_double(double value);

std::string to_string(const Rational& q);
double to_double(const Rational& q);
std::vector<double> to_double(const RVector& v);

Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);

/// Scales a nonzero rational vector by the unique positive factor making it a primitive integer vector.
/// Returns the factor through `scale` when non-null.
IVector primitive_integer_vector(const RVector& v, Rational* scale = nullptr);

/// Divides an integer vector by the gcd of its entries. Zero vectors are returned unchanged.
IVector primitive(const IVector& v);

RVector to_rational(const IVector& v);

Rational dot(const IVector& a, const RVector& x);
Rational dot(const RVector& a, const RVector& x);

}  // namespace toricgh

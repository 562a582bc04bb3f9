#include "toricgh/rational.hpp"

#include "toricgh/error.hpp"

#include <cstdio>
#include <string>

namespace toricgh {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

Integer parse_integer(std::string_view s) {
    if (!is_integer_literal(s)) fail(ErrorKind::InvalidInput, "not an integer: '" + std::string(s) + "'");
    if (s[0] == '+') s.remove_prefix(1);
    return Integer(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text));
    const Integer num = parse_integer(trim(text.substr(0, slash)));
    const Integer den = parse_integer(trim(text.substr(slash + 1)));
    if (den == 0) fail(ErrorKind::InvalidInput, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

Rational parse_decimal(std::string_view text) {
    text = trim(text);
    if (text.find('/') != std::string_view::npos) return parse_rational(text);
    std::string_view mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = text.substr(0, e);
        exponent = std::stol(std::string(text.substr(e + 1)));
    }
    const auto dot = mantissa.find('.');
    if (dot == std::string_view::npos) {
        Rational q(parse_integer(mantissa));
        for (long k = 0; k < exponent; ++k) q *= 10;
        for (long k = 0; k > exponent; --k) q /= 10;
        return q;
    }
    std::string digits(mantissa.substr(0, dot));
    const std::string_view frac = mantissa.substr(dot + 1);
    digits += frac;
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    Rational q(parse_integer(digits));
    exponent -= static_cast<long>(frac.size());
    for (long k = 0; k < exponent; ++k) q *= 10;
    for (long k = 0; k > exponent; --k) q /= 10;
    return q;
}

Rational rational_from_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    return parse_decimal(buf);
}

std::string to_string(const Rational& q) {
    const Integer& den = boost::multiprecision::denominator(q);
    if (den == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::vector<double> to_double(const RVector& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(to_double(q));
    return out;
}

Integer gcd(const Integer& a, const Integer& b) { return boost::multiprecision::gcd(a, b); }

Integer lcm(const Integer& a, const Integer& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::abs(a / gcd(a, b) * b);
}

IVector primitive_integer_vector(const RVector& v, Rational* scale) {
    Integer den = 1;
    for (const auto& q : v) den = lcm(den, boost::multiprecision::denominator(q));
    IVector out;
    out.reserve(v.size());
    Integer g = 0;
    for (const auto& q : v) {
        Integer entry = boost::multiprecision::numerator(q) * (den / boost::multiprecision::denominator(q));
        g = gcd(g, entry);
        out.push_back(std::move(entry));
    }
    if (g == 0) fail(ErrorKind::InvalidInput, "zero vector has no primitive form");
    for (auto& e : out) e /= g;
    if (scale != nullptr) *scale = Rational(den, g);
    return out;
}

IVector primitive(const IVector& v) {
    Integer g = 0;
    for (const auto& e : v) g = gcd(g, e);
    if (g == 0 || g == 1) return v;
    IVector out = v;
    for (auto& e : out) e /= g;
    return out;
}

RVector to_rational(const IVector& v) {
    RVector out;
    out.reserve(v.size());
    for (const auto& e : v) out.emplace_back(e);
    return out;
}

Rational dot(const IVector& a, const RVector& x) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
}

Rational dot(const RVector& a, const RVector& x) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
}

}  // namespace toricgh

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace borel {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

/// Parses "a", "-a", "a/b". Decimal points and exponents are rejected so that
/// exact inputs never silently become floating point.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

BigInt numerator_of(const Rational& r);
BigInt denominator_of(const Rational& r);

bool is_integer(const Rational& r);

/// Nearest rational with denominator <= max_den (continued fractions).
Rational approximate(double x, long long max_den);

}  // namespace borel

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace holdercover {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "1/12", "0.01" or "-2.5e-3" exactly. Throws DomainError on junk.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

/// Natural log of a positive big integer, accurate to double precision
/// for any magnitude.
double log_big(const BigInt& value);

}  // namespace holdercover

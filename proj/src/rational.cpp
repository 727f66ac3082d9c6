#include "holdercover/rational.hpp"

#include "holdercover/errors.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace holdercover {
namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw DomainError("malformed number '" + std::string(whole) + "'");
  BigInt value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw DomainError("malformed number '" + std::string(whole) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  std::string_view rest = text;
  if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = rest.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    exponent = static_cast<long>(parse_integer(exp_text, text));
    if (exp_negative) exponent = -exponent;
    rest = rest.substr(0, e);
  }
  std::string digits;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    digits = std::string(rest.substr(0, dot)) + std::string(rest.substr(dot + 1));
    exponent -= static_cast<long>(rest.size() - dot - 1);
  } else {
    digits = std::string(rest);
  }
  Rational value(parse_integer(digits, text));
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0)
    value *= scale;
  else
    value /= scale;
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw DomainError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

double log_big(const BigInt& value) {
  if (value <= 0) throw DomainError("log of a non-positive integer");
  const unsigned bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 62) return std::log(value.convert_to<double>());
  const unsigned shift = bits - 62;
  BigInt top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace holdercover

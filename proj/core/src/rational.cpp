#include "whitney/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "whitney/error.hpp"

namespace whitney {
namespace {

Rational parse_decimal(std::string_view text) {
  std::string mantissa;
  long exponent = 0;
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail(ErrorCode::kParse, "not a number: '" + std::string(text) + "'");
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') {
      fail(ErrorCode::kParse, "not a number: '" + std::string(text) + "'");
    }
    const std::string tail(text.substr(pos + 1));
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(tail, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "bad exponent in '" + std::string(text) + "'");
    }
    if (used != tail.size()) fail(ErrorCode::kParse, "bad exponent in '" + std::string(text) + "'");
    exponent += e;
  }
  mpz_class num(mantissa, 10);
  mpz_class scale = 1;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational out = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) fail(ErrorCode::kParse, "empty numeric literal");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) fail(ErrorCode::kParse, "zero denominator in '" + std::string(text) + "'");
  Rational out = num / den;
  out.canonicalize();
  return out;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::kParse, "non-finite constant");
  return Rational(value);
}

std::string to_string(const Rational& value) { return value.get_str(10); }

}  // namespace whitney

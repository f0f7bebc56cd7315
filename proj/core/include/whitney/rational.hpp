#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace whitney {

using Rational = mpq_class;

/// Parses "p/q", integers, and decimal or scientific literals ("0.1", "2.5e-3") exactly.
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite double.
Rational rational_from_double(double value);

/// Canonical "p/q" (or "p" for integers) form.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace whitney

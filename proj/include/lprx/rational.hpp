#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lprx {

using Rational = mpq_class;
using Integer = mpz_class;

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational rational_from_double(double value);

/// Canonical "num/den" form; the denominator is always printed.
std::string to_string(const Rational& value);

/// Accepts "num/den", "num", or a plain decimal such as "-0.25" or "1e-3".
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& value) { return value.get_d(); }

inline bool is_zero(const Rational& value) { return sgn(value) == 0; }

} // namespace lprx

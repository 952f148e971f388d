#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace succession {

using Integer = mpz_class;
using Rational = mpq_class;

// Builds num/den in canonical form (lowest terms, positive denominator).
// Throws std::domain_error when den == 0.
Rational make_rational(const Integer& num, const Integer& den);
Rational make_rational(std::int64_t num, std::int64_t den);

// Accepts "p/q", plain integers, and decimal literals. Decimals are read
// exactly as scaled integers ("0.55" -> 11/20); no floating point involved.
Rational parse_rational(const std::string& text);

// Nearest-integer division with ties to even. den must be positive.
Integer round_div_half_even(const Integer& num, const Integer& den);

// Fixed-point decimal rendering, round-half-even: 43/51 -> "0.843137".
std::string to_decimal(const Rational& value, int fraction_digits = 6);

// "p/q", or "p" when the value is integral.
std::string to_fraction(const Rational& value);

} // namespace succession

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace ergoscope {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
Rational make_rational(const Integer& num, const Integer& den);

// "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);
Rational parse_rational(const std::string& text);

Integer floor_of(const Rational& q);
Rational frac_of(const Rational& q);
double to_double(const Rational& q);
std::int64_t to_int64(const Integer& z);

}  // namespace ergoscope

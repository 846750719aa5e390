#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace exactpack {

// Exact arithmetic is carried by GMP throughout. mpq_class already maintains
// the invariants we need (positive denominator, fully reduced).
using Integer = mpz_class;
using Rational = mpq_class;

// num/den with canonicalization; den must be nonzero.
Rational make_rational(const Integer& num, const Integer& den);

// Parses decimal text like "-0.64759", "1e-4", "3", "7/25" into an exact value.
// Throws std::invalid_argument on malformed input.
Rational rational_from_decimal(std::string_view text);

// Fixed-point decimal rendering, round-to-nearest, `digits` places after the
// point. Exact values print without trailing noise beyond `digits`.
std::string decimal_string(const Rational& q, int digits);

std::string rational_to_string(const Rational& q);
Rational rational_from_string(std::string_view text);

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer int_pow(const Integer& base, unsigned long e);
Rational rational_pow(const Rational& base, unsigned long e);

// floor(sqrt(n)) for n >= 0.
Integer isqrt_floor(const Integer& n);

bool is_perfect_square(const Integer& n, Integer* root = nullptr);

// Exact square root of a rational if it is one.
std::optional<Rational> rational_sqrt_exact(const Rational& q);

// 10^-k as an exact rational.
Rational pow10_inv(unsigned k);

}  // namespace exactpack

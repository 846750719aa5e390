#pragma once

#include <functional>
#include <map>

#include "exactpack/multipoly.hpp"
#include "exactpack/unipoly.hpp"

namespace exactpack {

// Closed rational interval [lo, hi]. All certification paths use these; no
// floating point is involved anywhere in a trusted computation.
struct RatInterval {
    Rational lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(Rational a, Rational b);
    static RatInterval point(const Rational& q) { return RatInterval(q, q); }

    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }
    bool contains(const Rational& q) const { return lo <= q && q <= hi; }
    bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool excludes_zero() const { return lo > 0 || hi < 0; }

    RatInterval operator-() const { return RatInterval(-hi, -lo); }
    friend bool operator==(const RatInterval& a, const RatInterval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend RatInterval operator+(const RatInterval& a, const RatInterval& b);
    friend RatInterval operator-(const RatInterval& a, const RatInterval& b);
    friend RatInterval operator*(const RatInterval& a, const RatInterval& b);
    RatInterval pow(unsigned e) const;  // tight for even powers across zero
    RatInterval scaled(const Rational& c) const;
};

// Enclosure of sqrt on a nonneg interval, endpoints correct to ~`digits`.
RatInterval sqrt_interval(const RatInterval& x, unsigned digits);

enum class Sign { negative, zero_unresolved, positive };

using Box = std::map<std::string, RatInterval>;

// Interval extension: the result contains f(v) for every point v in the box.
// Every variable of f must be bound.
RatInterval eval_poly_box(const MultiPoly& f, const Box& box);

// Certifies the sign of f over a refinable family of boxes. The refiner is
// called to produce successively tighter boxes; a null refiner means the
// initial box is all there is. Gives up after max_rounds refinements.
Sign certified_sign(const MultiPoly& f, const Box& box,
                    const std::function<Box(const Box&)>& refiner = nullptr,
                    int max_rounds = 200);

// Rational approximation within 10^-digits of the root (interval refined to
// that width; midpoint returned).
Rational approx_digits(const AlgebraicNumber& a, unsigned digits);

}  // namespace exactpack

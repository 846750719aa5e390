#include "exactpack/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactpack {

RatInterval::RatInterval(Rational a, Rational b) : lo(std::move(a)), hi(std::move(b)) {
    if (lo > hi) throw std::invalid_argument("RatInterval: lo > hi");
}

RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return RatInterval(a.lo + b.lo, a.hi + b.hi);
}

RatInterval operator-(const RatInterval& a, const RatInterval& b) {
    return RatInterval(a.lo - b.hi, a.hi - b.lo);
}

RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rational lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rational hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return RatInterval(std::move(lo), std::move(hi));
}

RatInterval RatInterval::pow(unsigned e) const {
    if (e == 0) return point(Rational(1));
    if (e % 2 == 1 || lo >= 0 || hi <= 0) {
        // monotone on the whole interval (odd power, or no sign crossing)
        Rational plo = rational_pow(lo, e), phi = rational_pow(hi, e);
        if (plo > phi) std::swap(plo, phi);
        return RatInterval(std::move(plo), std::move(phi));
    }
    // even power across zero
    Rational m = std::max(rational_pow(-lo, e), rational_pow(hi, e));
    return RatInterval(Rational(0), std::move(m));
}

RatInterval RatInterval::scaled(const Rational& c) const {
    if (c >= 0) return RatInterval(lo * c, hi * c);
    return RatInterval(hi * c, lo * c);
}

RatInterval sqrt_interval(const RatInterval& x, unsigned digits) {
    if (x.lo < 0) throw std::domain_error("sqrt_interval: negative interval");
    Integer scale = int_pow(Integer(10), digits);
    auto lower = [&](const Rational& q) {
        // floor(sqrt(q*scale^2)) / scale <= sqrt(q)
        Integer t = isqrt_floor(q.get_num() * q.get_den() * scale * scale);
        return make_rational(t, q.get_den() * scale);
    };
    auto upper = [&](const Rational& q) {
        Integer t = isqrt_floor(q.get_num() * q.get_den() * scale * scale) + 1;
        return make_rational(t, q.get_den() * scale);
    };
    return RatInterval(lower(x.lo), upper(x.hi));
}

RatInterval eval_poly_box(const MultiPoly& f, const Box& box) {
    if (f.is_zero()) return RatInterval::point(Rational(0));
    const auto& vars = f.vars();
    std::vector<const RatInterval*> iv(vars.size(), nullptr);
    for (size_t i = 0; i < vars.size(); ++i) {
        auto it = box.find(vars[i]);
        if (it != box.end()) iv[i] = &it->second;
    }
    // term-wise enclosure with memoized power tables
    std::vector<std::vector<RatInterval>> powers(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
        unsigned d = f.degree(vars[i]);
        if (d == 0) continue;
        if (!iv[i]) throw std::invalid_argument("eval_poly_box: unbound variable " + vars[i]);
        powers[i].resize(d + 1);
        for (unsigned k = 0; k <= d; ++k) powers[i][k] = iv[i]->pow(k);
    }
    RatInterval acc = RatInterval::point(Rational(0));
    for (const auto& [e, c] : f.terms()) {
        RatInterval t = RatInterval::point(c);
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) t = t * powers[i][e[i]];
        acc = acc + t;
    }
    return acc;
}

Sign certified_sign(const MultiPoly& f, const Box& box,
                    const std::function<Box(const Box&)>& refiner, int max_rounds) {
    Box current = box;
    for (int round = 0;; ++round) {
        RatInterval enc = eval_poly_box(f, current);
        if (enc.lo > 0) return Sign::positive;
        if (enc.hi < 0) return Sign::negative;
        if (!refiner || round >= max_rounds) return Sign::zero_unresolved;
        Box next = refiner(current);
        if (next == current) return Sign::zero_unresolved;  // no more progress
        current = std::move(next);
    }
}

Rational approx_digits(const AlgebraicNumber& a, unsigned digits) {
    if (digits < 1) throw std::invalid_argument("approx_digits: digits must be >= 1");
    AlgebraicNumber r = refine_root(a, pow10_inv(digits));
    return r.midpoint();
}

}  // namespace exactpack

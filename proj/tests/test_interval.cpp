#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "exactpack/interval.hpp"
#include "helpers.hpp"

using namespace exactpack;
using testhelp::c;
using testhelp::random_poly;
using testhelp::v;

namespace {
Rational rr(const char* s) { return rational_from_decimal(s); }
}

TEST_CASE("square on a sign-crossing interval contains the true range") {
    MultiPoly x = v("x");
    RatInterval enc = eval_poly_box(x * x, {{"x", RatInterval(Rational(-1), Rational(2))}});
    CHECK(enc.lo <= 0);
    CHECK(enc.hi >= 4);
}

TEST_CASE("containment under random fuzzing") {
    std::mt19937 rng(60601);
    std::uniform_int_distribution<long> num(-50, 50);
    std::uniform_int_distribution<long> den(1, 9);
    int trials = 0;
    while (trials < 10000) {
        MultiPoly f = random_poly(rng, {"x", "y"}, 5, 3, 9);
        Rational ax = make_rational(num(rng), den(rng)), bx = ax + make_rational(den(rng), 3);
        Rational ay = make_rational(num(rng), den(rng)), by = ay + make_rational(den(rng), 5);
        Box box{{"x", RatInterval(ax, bx)}, {"y", RatInterval(ay, by)}};
        // random point inside the box
        Rational tx = ax + (bx - ax) * make_rational(num(rng) + 50, 101);
        Rational ty = ay + (by - ay) * make_rational(num(rng) + 50, 101);
        Rational val = f.eval({{"x", tx}, {"y", ty}});
        RatInterval enc = eval_poly_box(f, box);
        CHECK(enc.contains(val));
        ++trials;
    }
}

TEST_CASE("shrinking the box never widens the enclosure") {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        MultiPoly f = random_poly(rng, {"x", "y"}, 5, 3, 9);
        Box outer{{"x", RatInterval(Rational(-2), Rational(3))},
                  {"y", RatInterval(Rational(-1), Rational(4))}};
        Box inner{{"x", RatInterval(Rational(-1), Rational(2))},
                  {"y", RatInterval(Rational(0), Rational(2))}};
        RatInterval eo = eval_poly_box(f, outer), ei = eval_poly_box(f, inner);
        CHECK(eo.lo <= ei.lo);
        CHECK(ei.hi <= eo.hi);
    }
}

TEST_CASE("certified signs") {
    CHECK(certified_sign(c(1), {{"x", RatInterval(Rational(-9), Rational(9))}}) == Sign::positive);
    CHECK(certified_sign(v("x"), {{"x", RatInterval(Rational(-1), Rational(1))}}) ==
          Sign::zero_unresolved);
    CHECK(certified_sign(-v("x").pow(2) - c(1), {{"x", RatInterval(Rational(-1), Rational(1))}}) ==
          Sign::negative);

    // with a refiner closing in on a nonzero point, the sign resolves
    MultiPoly f = v("x") - c(1, 3);
    Box start{{"x", RatInterval(Rational(0), Rational(1))}};
    auto refiner = [](const Box& b) {
        Box next = b;
        RatInterval cur = b.at("x");
        Rational target(1, 2);
        next["x"] = RatInterval((cur.lo + target) / 2, (cur.hi + target) / 2);
        return next;
    };
    CHECK(certified_sign(f, start, refiner) == Sign::positive);
}

TEST_CASE("certified sign agrees with exact evaluation on point boxes") {
    std::mt19937 rng(8);
    std::uniform_int_distribution<long> num(-20, 20);
    for (int i = 0; i < 300; ++i) {
        MultiPoly f = random_poly(rng, {"x"}, 4, 3, 9);
        Rational pt = make_rational(num(rng), 7);
        Rational val = f.eval({{"x", pt}});
        Sign s = certified_sign(f, {{"x", RatInterval::point(pt)}});
        if (val > 0) CHECK(s == Sign::positive);
        if (val < 0) CHECK(s == Sign::negative);
        if (val == 0) CHECK(s == Sign::zero_unresolved);
    }
}

TEST_CASE("near-zero relation encloses zero on a tight box") {
    MultiPoly mu = v("mu"), a6 = v("a6");
    MultiPoly num = a6 * (c(1) + mu) - c(1) - mu + c(4) * mu * mu;
    Rational mu0 = rr("0.6475889787");
    Rational a6v = rr("-0.0181458866");
    Rational eps = pow10_inv(8);
    Box box{{"mu", RatInterval(mu0 - eps, mu0 + eps)}, {"a6", RatInterval(a6v - eps, a6v + eps)}};
    RatInterval enc = eval_poly_box(num, box);
    CHECK(enc.contains(Rational(0)));
}

TEST_CASE("digit approximation of algebraic numbers") {
    std::vector<Integer> coeffs;
    for (long x : {1L, 5L, -8L, -80L, -78L, 146L, -80L, -584L, 677L, 1537L}) coeffs.emplace_back(x);
    UniPoly nine = UniPoly::from_coeffs(std::move(coeffs));
    AlgebraicNumber mu0 = AlgebraicNumber::largest_real_root(nine);

    Rational ten = approx_digits(mu0, 10);
    CHECK(rational_abs(ten - rr("0.6475889787")) <= pow10_inv(10));

    AlgebraicNumber third(UniPoly::from_coeffs({Integer(-1), Integer(3)}), Rational(0), Rational(1));
    CHECK(rational_abs(approx_digits(third, 5) - make_rational(1, 3)) <= pow10_inv(5));

    Rational hundred = approx_digits(mu0, 100);
    CHECK(rational_abs(hundred - ten) <= pow10_inv(9));
}

TEST_CASE("sqrt enclosures") {
    RatInterval x(Rational(2), Rational(2));
    RatInterval s = sqrt_interval(x, 30);
    CHECK(s.lo * s.lo <= 2);
    CHECK(s.hi * s.hi >= 2);
    CHECK(s.width() < pow10_inv(25));
    RatInterval nine = sqrt_interval(RatInterval(Rational(9), Rational(9)), 10);
    CHECK(nine.contains(Rational(3)));
}

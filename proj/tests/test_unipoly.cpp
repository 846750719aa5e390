#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "exactpack/unipoly.hpp"
#include "helpers.hpp"

using namespace exactpack;

namespace {

UniPoly up(std::vector<long> asc) {
    std::vector<Integer> c;
    c.reserve(asc.size());
    for (long x : asc) c.emplace_back(x);
    return UniPoly::from_coeffs(std::move(c));
}

const UniPoly kDegree9 = up({1, 5, -8, -80, -78, 146, -80, -584, 677, 1537});

UniPoly random_unipoly(std::mt19937& rng, int maxdeg, long range) {
    std::uniform_int_distribution<int> dd(1, maxdeg);
    std::uniform_int_distribution<long> cc(-range, range);
    int d = dd(rng);
    std::vector<Integer> c(static_cast<size_t>(d) + 1);
    for (auto& x : c) x = cc(rng);
    while (c.back() == 0) c.back() = cc(rng);
    return UniPoly::from_coeffs(std::move(c));
}

// numeric real-root count via companion-matrix eigenvalues; returns -1 when
// an eigenvalue sits too close to the real axis to classify safely
int companion_real_root_count(const UniPoly& p) {
    int n = p.degree();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    double lead = p.coeffs().back().get_d();
    for (int i = 0; i < n; ++i) {
        m(i, n - 1) = -p.coeffs()[static_cast<size_t>(i)].get_d() / lead;
        if (i > 0) m(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    int count = 0;
    for (int i = 0; i < n; ++i) {
        double im = std::abs(es.eigenvalues()(i).imag());
        double scale = std::max(1.0, std::abs(es.eigenvalues()(i).real()));
        if (im < 1e-9 * scale)
            ++count;
        else if (im < 1e-4 * scale)
            return -1;  // ambiguous at double precision
    }
    return count;
}

}  // namespace

TEST_CASE("sturm counts") {
    CHECK(sturm_count(up({-2, 0, 1}), Rational(1), Rational(2)) == 1);
    CHECK(sturm_count(up({1, 0, 1}), Rational(-10), Rational(10)) == 0);
    CHECK(sturm_count(kDegree9, rational_from_decimal("0.6"), rational_from_decimal("0.64759")) == 1);
    CHECK_THROWS_AS(sturm_count(up({-1, 1}), Rational(1), Rational(2)), std::domain_error);
}

TEST_CASE("root isolation basics") {
    auto roots = isolate_real_roots(up({-1, 0, 1}));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].first <= -1);
    CHECK(roots[0].second >= -1);
    CHECK(roots[1].first <= 1);
    CHECK(roots[1].second >= 1);

    auto nine = isolate_real_roots(kDegree9);
    REQUIRE(!nine.empty());
    Rational target = rational_from_decimal("0.6475889787");
    CHECK(nine.back().first <= target);
    CHECK(nine.back().second >= target);
}

TEST_CASE("every isolating interval contains exactly one root") {
    std::mt19937 rng(4242);
    for (int i = 0; i < 100; ++i) {
        UniPoly p = unipoly_squarefree_part(random_unipoly(rng, 6, 9));
        if (p.degree() < 1) continue;
        SturmChain chain(p);
        auto roots = isolate_real_roots(p);
        for (auto& [lo, hi] : roots) CHECK(chain.count(lo, hi) == 1);
        // intervals pairwise disjoint
        for (size_t k = 1; k < roots.size(); ++k) CHECK(roots[k - 1].second <= roots[k].first);
    }
}

TEST_CASE("isolation count matches a companion-matrix eigenvalue oracle") {
    std::mt19937 rng(777);
    int conclusive = 0;
    for (int i = 0; i < 200; ++i) {
        UniPoly p = unipoly_squarefree_part(random_unipoly(rng, 6, 9));
        if (p.degree() < 1) continue;
        int oracle = companion_real_root_count(p);
        if (oracle < 0) continue;
        auto mine = isolate_real_roots(p);
        CHECK(static_cast<int>(mine.size()) == oracle);
        ++conclusive;
    }
    CHECK(conclusive >= 150);
}

TEST_CASE("sum of sturm counts over a partition equals the total") {
    std::mt19937 rng(31);
    for (int i = 0; i < 50; ++i) {
        UniPoly p = unipoly_squarefree_part(random_unipoly(rng, 6, 9));
        if (p.degree() < 1) continue;
        Rational b = cauchy_root_bound(p);
        if (p.sign_at(-b) == 0 || p.sign_at(b) == 0) continue;
        SturmChain chain(p);
        int total = chain.count(-b, b);
        // split at rational points that are unlikely to be roots; skip if they are
        Rational m1 = -b / 3, m2 = b / 7;
        if (p.sign_at(m1) == 0 || p.sign_at(m2) == 0) continue;
        int parts = chain.count(-b, m1) + chain.count(m1, m2) + chain.count(m2, b);
        CHECK(parts == total);
        CHECK(static_cast<size_t>(total) == isolate_real_roots(p).size());
    }
}

TEST_CASE("refinement keeps the root and shrinks the interval") {
    AlgebraicNumber mu0 = AlgebraicNumber::largest_real_root(kDegree9);
    AlgebraicNumber fine = refine_root(mu0, pow10_inv(12));
    CHECK(fine.width() <= pow10_inv(12));
    Rational target = rational_from_decimal("0.6475889787");
    CHECK(fine.lo() <= target + pow10_inv(10));
    CHECK(fine.hi() >= target - pow10_inv(10));
    // sign change persists
    CHECK(fine.minpoly().sign_at(fine.lo()) * fine.minpoly().sign_at(fine.hi()) < 0);

    // exact rational root collapses to a tight interval around it
    AlgebraicNumber three(up({-3, 1}), Rational(0), Rational(5));
    AlgebraicNumber t = refine_root(three, pow10_inv(9));
    CHECK(t.contains(Rational(3)));
    CHECK(t.width() <= pow10_inv(9));

    // refining twice is the same containment as refining once to that width;
    // compare against a 20-digit reference value of the root
    Rational target20 = rational_from_decimal("0.64758897873417862734");
    AlgebraicNumber twice = refine_root(refine_root(mu0, pow10_inv(6)), pow10_inv(12));
    CHECK(twice.contains(target20));
    CHECK(fine.contains(target20));
}

TEST_CASE("factorization of x^4 - 1") {
    Factorization f = factor_over_integers(up({-1, 0, 0, 0, 1}));
    REQUIRE(f.factors.size() == 3);
    CHECK(f.sign == 1);
    CHECK(f.factors[0].first == up({-1, 1}));
    CHECK(f.factors[1].first == up({1, 1}));
    CHECK(f.factors[2].first == up({1, 0, 1}));
    for (auto& [factor, mult] : f.factors) CHECK(mult == 1);
}

TEST_CASE("the degree-9 polynomial is irreducible") {
    Factorization f = factor_over_integers(kDegree9);
    REQUIRE(f.factors.size() == 1);
    CHECK(f.factors[0].first == kDegree9);
    CHECK(f.factors[0].second == 1);
    CHECK(f.factors[0].first.degree() == 9);
}

TEST_CASE("factorization recovers random products (multiply-back oracle)") {
    std::mt19937 rng(90210);
    int done = 0;
    for (int i = 0; i < 200; ++i) {
        UniPoly a = random_unipoly(rng, 4, 6);
        UniPoly b = random_unipoly(rng, 4, 6);
        if (a.degree() < 1 || b.degree() < 1) continue;
        // build the product as a primitive polynomial
        std::vector<Integer> prod(static_cast<size_t>(a.degree() + b.degree()) + 1, Integer(0));
        for (int i1 = 0; i1 <= a.degree(); ++i1)
            for (int i2 = 0; i2 <= b.degree(); ++i2)
                prod[static_cast<size_t>(i1 + i2)] +=
                    a.coeffs()[static_cast<size_t>(i1)] * b.coeffs()[static_cast<size_t>(i2)];
        UniPoly p = UniPoly::from_coeffs(std::move(prod));
        Factorization f = factor_over_integers(p);
        // multiply all factors back, with multiplicities and sign
        std::vector<Integer> acc{Integer(f.sign)};
        for (auto& [factor, mult] : f.factors) {
            for (int rep = 0; rep < mult; ++rep) {
                std::vector<Integer> next(acc.size() + static_cast<size_t>(factor.degree()), Integer(0));
                for (size_t x = 0; x < acc.size(); ++x)
                    for (size_t y = 0; y < factor.coeffs().size(); ++y)
                        next[x + y] += acc[x] * factor.coeffs()[y];
                acc = std::move(next);
            }
        }
        CHECK(UniPoly::from_coeffs(std::move(acc)) == p);
        for (auto& [factor, mult] : f.factors) {
            // each reported factor must be irreducible: factoring it again is a no-op
            if (factor.degree() > 1) {
                Factorization g = factor_over_integers(factor);
                CHECK(g.factors.size() == 1);
                CHECK(g.factors[0].second == 1);
            }
        }
        ++done;
    }
    CHECK(done >= 150);
}

TEST_CASE("factorization handles repeated factors") {
    // (x-1)^2 (x+2)^3
    UniPoly p1 = up({-1, 1});
    UniPoly p2 = up({2, 1});
    std::vector<Integer> acc{Integer(1)};
    auto mul_in = [&](const UniPoly& f) {
        std::vector<Integer> next(acc.size() + static_cast<size_t>(f.degree()), Integer(0));
        for (size_t x = 0; x < acc.size(); ++x)
            for (size_t y = 0; y < f.coeffs().size(); ++y) next[x + y] += acc[x] * f.coeffs()[y];
        acc = std::move(next);
    };
    mul_in(p1);
    mul_in(p1);
    mul_in(p2);
    mul_in(p2);
    mul_in(p2);
    Factorization f = factor_over_integers(UniPoly::from_coeffs(std::move(acc)));
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0].first == p1);
    CHECK(f.factors[0].second == 2);
    CHECK(f.factors[1].first == p2);
    CHECK(f.factors[1].second == 3);
}

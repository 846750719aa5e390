#pragma once

#include <utility>
#include <vector>

#include "exactpack/multipoly.hpp"

namespace exactpack {

// Univariate integer polynomial, ascending coefficients, content 1 (primitive),
// nonzero leading coefficient. The zero polynomial has an empty vector.
class UniPoly {
public:
    UniPoly() = default;

    // Strips trailing zeros and divides out the integer content (sign kept).
    static UniPoly from_coeffs(std::vector<Integer> ascending);
    static UniPoly from_multipoly(const MultiPoly& f, const std::string& var);

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Integer>& coeffs() const { return c_; }
    Integer lead() const { return c_.empty() ? Integer(0) : c_.back(); }

    Rational eval(const Rational& x) const;
    Integer eval_int(const Integer& x) const;
    int sign_at(const Rational& x) const;

    UniPoly derivative() const;
    UniPoly negate_variable() const;  // p(-x), primitive

    MultiPoly to_multipoly(const std::string& var) const;
    std::string to_string(const std::string& var = "x") const;

    bool operator==(const UniPoly& o) const { return c_ == o.c_; }
    bool operator!=(const UniPoly& o) const { return !(*this == o); }

private:
    std::vector<Integer> c_;
};

// gcd of primitive integer polynomials (primitive PRS), positive leading
// coefficient; gcd(p, 0) = |p|.
UniPoly unipoly_gcd(const UniPoly& a, const UniPoly& b);

// p / gcd(p, p'), primitive.
UniPoly unipoly_squarefree_part(const UniPoly& p);

bool unipoly_divides(const UniPoly& d, const UniPoly& p);

// Cauchy bound: every real root lies strictly inside (-B, B).
Rational cauchy_root_bound(const UniPoly& p);

// Sturm chain of a squarefree polynomial; counts real roots exactly.
class SturmChain {
public:
    explicit SturmChain(const UniPoly& p);
    // roots in the open interval (lo, hi); endpoints must not be roots
    int count(const Rational& lo, const Rational& hi) const;
    int sign_changes_at(const Rational& x) const;

private:
    std::vector<std::vector<Rational>> chain_;
};

// Exact number of real roots of squarefree p in (lo, hi).
// Throws std::domain_error if p vanishes at an endpoint.
int sturm_count(const UniPoly& p, const Rational& lo, const Rational& hi);

// One disjoint isolating interval per real root of squarefree p, sorted
// ascending; p is nonzero at all interval endpoints.
std::vector<std::pair<Rational, Rational>> isolate_real_roots(const UniPoly& p);

// A real algebraic number: squarefree integer polynomial plus an isolating
// interval with a sign change and no other root inside.
class AlgebraicNumber {
public:
    AlgebraicNumber(UniPoly minpoly, Rational lo, Rational hi);

    const UniPoly& minpoly() const { return p_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    Rational width() const { return hi_ - lo_; }
    Rational midpoint() const { return (lo_ + hi_) / 2; }

    void refine_to(const Rational& width);  // bisection, exact endpoint signs
    bool contains(const Rational& q) const { return lo_ <= q && q <= hi_; }

    // all real roots of squarefree p, as algebraic numbers, sorted ascending
    static std::vector<AlgebraicNumber> real_roots(const UniPoly& p);
    static AlgebraicNumber largest_real_root(const UniPoly& p);

private:
    UniPoly p_;
    Rational lo_, hi_;
};

// Same root, interval width at most `width` (value-returning refinement).
AlgebraicNumber refine_root(const AlgebraicNumber& a, const Rational& width);

// Irreducible factorization over the integers: p = sign * prod f_i^{m_i}
// with each f_i primitive, irreducible, positive leading coefficient.
struct Factorization {
    int sign = 1;
    std::vector<std::pair<UniPoly, int>> factors;
};
Factorization factor_over_integers(const UniPoly& p);

}  // namespace exactpack

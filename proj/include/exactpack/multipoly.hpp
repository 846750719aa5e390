#pragma once

#include <map>
#include <string>
#include <vector>

#include "exactpack/rational.hpp"

namespace exactpack {

// Canonical variable order used everywhere: "mu" first, then a1..a14 by index,
// then any other name alphabetically. Polynomials keep their variable context
// sorted in this order so results are deterministic.
bool var_precedes(const std::string& a, const std::string& b);

// Sparse multivariate polynomial with exact rational coefficients.
// Terms map exponent vectors (one entry per context variable) to nonzero
// coefficients; the zero polynomial has an empty term map.
class MultiPoly {
public:
    using ExpVec = std::vector<unsigned>;
    using TermMap = std::map<ExpVec, Rational>;

    MultiPoly() = default;
    explicit MultiPoly(long c) : MultiPoly(Rational(c)) {}
    explicit MultiPoly(const Rational& c);

    static MultiPoly constant(const Rational& c) { return MultiPoly(c); }
    static MultiPoly variable(const std::string& name);
    // coeff * prod vars[i]^exps[i]; vars need not be sorted.
    static MultiPoly monomial(const Rational& coeff, const std::vector<std::string>& vars,
                              const std::vector<unsigned>& exps);

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // 0 for the zero polynomial
    size_t term_count() const { return terms_.size(); }

    unsigned degree(const std::string& var) const;       // 0 if var absent or poly zero
    unsigned total_degree() const;                       // 0 for zero polynomial
    bool contains(const std::string& var) const { return degree(var) > 0; }
    std::vector<std::string> present_vars() const;       // vars with positive degree
    MultiPoly compact() const;                           // drop unused context variables

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
    MultiPoly scaled(const Rational& c) const;
    MultiPoly pow(unsigned e) const;

    bool operator==(const MultiPoly& o) const;
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    // Coefficient of var^k, as a polynomial in the same context (degree 0 in var).
    MultiPoly coeff_of(const std::string& var, unsigned k) const;
    MultiPoly leading_coeff(const std::string& var) const { return coeff_of(var, degree(var)); }

    Rational eval(const std::map<std::string, Rational>& point) const;
    MultiPoly eval_partial(const std::map<std::string, Rational>& point) const;
    MultiPoly derivative(const std::string& var) const;

    // f = rational_content() * primitive_part(); the primitive part has coprime
    // integer coefficients and positive leading (graded-lex) coefficient.
    Rational rational_content() const;
    MultiPoly primitive_part() const;

    // Canonical text: terms sorted graded-lex (descending), integer or rational
    // coefficients rendered explicitly, e.g. "4*mu^2 - mu - 1".
    std::string to_string() const;

    // Context embedding: newvars must be a canonically sorted superset.
    MultiPoly with_vars(const std::vector<std::string>& newvars) const;
    static std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b);
    static void align(MultiPoly& a, MultiPoly& b);

    // Graded-lex leading term (exponents, coefficient); poly must be nonzero.
    std::pair<ExpVec, Rational> leading_term_grlex() const;

private:
    void insert_term(const ExpVec& e, const Rational& c);  // accumulate, drop zeros

    std::vector<std::string> vars_;  // sorted by var_precedes
    TermMap terms_;
};

// num/den of polynomials; den nonzero. Kept content-reduced (both parts
// integer-primitive up to one shared rational factor folded into num's
// content); full gcd cancellation is a separate explicit operation.
class RationalExpr {
public:
    RationalExpr() : num_(), den_(Rational(1)) {}
    explicit RationalExpr(MultiPoly n);
    RationalExpr(MultiPoly n, MultiPoly d);

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }

    RationalExpr operator-() const;
    friend RationalExpr operator+(const RationalExpr& a, const RationalExpr& b);
    friend RationalExpr operator-(const RationalExpr& a, const RationalExpr& b);
    friend RationalExpr operator*(const RationalExpr& a, const RationalExpr& b);
    friend RationalExpr operator/(const RationalExpr& a, const RationalExpr& b);

    // identical as rational functions: num*o.den == o.num*den
    bool same_function(const RationalExpr& o) const;

    Rational eval(const std::map<std::string, Rational>& point) const;  // throws on zero den

    // cancel gcd(num, den); expensive, opt-in
    RationalExpr reduced_full() const;

    std::string to_string() const;

private:
    void normalize();
    MultiPoly num_, den_;
};

}  // namespace exactpack

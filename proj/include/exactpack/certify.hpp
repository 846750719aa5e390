#pragma once

#include <array>

#include "exactpack/eliminate.hpp"
#include "exactpack/interval.hpp"

namespace exactpack {

struct CertifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element of K[y]/(y^2 - rho) with K = Q[x]/(minpoly): c0 + c1*y, both dense
// rational coefficient vectors of length deg(minpoly).
struct RingElem {
    std::vector<Rational> c0, c1;
    bool is_zero() const;
    bool operator==(const RingElem& o) const { return c0 == o.c0 && c1 == o.c1; }
};

// The quotient ring generated by x (the coherence) and y (the off-ring
// entry), with a real embedding picked by an isolating interval and a sign.
class QuotientRing {
public:
    using KElem = std::vector<Rational>;

    QuotientRing(UniPoly minpoly, KElem rho, int y_sign, AlgebraicNumber x_root);

    int degree() const { return static_cast<int>(minpoly_.coeffs().size()) - 1; }
    const UniPoly& minpoly() const { return minpoly_; }
    const KElem& rho() const { return rho_; }
    int y_sign() const { return y_sign_; }
    const AlgebraicNumber& x_root() const { return x_root_; }

    // base-field arithmetic
    KElem k_zero() const { return KElem(static_cast<size_t>(degree()), Rational(0)); }
    KElem k_one() const;
    KElem k_reduce(const std::vector<Rational>& raw) const;  // mod minpoly
    KElem k_from_poly(const MultiPoly& univariate_in_mu) const;
    KElem k_add(const KElem& a, const KElem& b) const;
    KElem k_sub(const KElem& a, const KElem& b) const;
    KElem k_mul(const KElem& a, const KElem& b) const;
    KElem k_inverse(const KElem& a) const;  // throws CertifyError if zero

    RingElem zero() const { return {k_zero(), k_zero()}; }
    RingElem one() const { return {k_one(), k_zero()}; }
    RingElem x() const;
    RingElem y() const;

    // When rho is a square in K the extension is trivial: y is represented in
    // the base field itself and every element keeps c1 = 0, which makes ring
    // zero-tests decide vanishing at the embedding exactly.
    void adopt_y_in_base(KElem y_in_k);
    bool y_is_in_base() const { return y_in_k_.has_value(); }
    RingElem from_k(KElem c0) const { return {std::move(c0), k_zero()}; }
    RingElem add(const RingElem& a, const RingElem& b) const;
    RingElem sub(const RingElem& a, const RingElem& b) const;
    RingElem neg(const RingElem& a) const;
    RingElem mul(const RingElem& a, const RingElem& b) const;
    // division via the conjugate norm; throws CertifyError on zero divisors
    RingElem inverse(const RingElem& a) const;

    // exact value of a store expression as a ring element
    RingElem from_expr(const RationalExpr& e, const ConstraintStore& store) const;

    // real-embedding enclosure at roughly 10^-digits interval width
    RatInterval embed(const RingElem& e, unsigned digits) const;
    RatInterval x_box(unsigned digits) const;
    RatInterval y_box(unsigned digits) const;

private:
    UniPoly minpoly_;
    KElem rho_;
    int y_sign_;
    std::optional<KElem> y_in_k_;
    mutable AlgebraicNumber x_root_;  // refined on demand
};

// Builds the ring from the derivation output: the a8 square relation becomes
// rho, the recorded sign fact orients y, and the x interval is refined until
// rho's enclosure is strictly positive. Throws CertifyError when the store
// lacks the square relation or the sign, or when rho cannot be certified
// positive.
QuotientRing build_ring(const UniPoly& minpoly, const ConstraintStore& store,
                        const AlgebraicNumber& mu_root);

struct ExactGram {
    int n = 0;
    std::vector<std::vector<RingElem>> entries;
    const RingElem& at(int i, int j) const {
        return entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
};

// Fills every entry of the exact Gram: contacts become +/-x, solved variables
// come from the store, the square variable becomes y, and each remaining
// entry is recovered from a bordered 4x4 minor that is linear in it, then
// checked against every determining principal minor.
ExactGram complete_tail_entries(const QuotientRing& ring, const ConstraintStore& store,
                                const SymbolicPattern& pattern, const WitnessValues& witness);

struct Minor4Ref {
    std::array<int, 4> rows, cols;  // 1-based
};

struct RankEvidence {
    std::vector<Minor4Ref> vanishing;       // every 4x4 minor, all ring-zero
    std::array<int, 3> nonzero_rows, nonzero_cols;
    int nonzero_sign = 0;                   // certified sign of that 3x3 minor
};

// Exact rank-3 check: all 4x4 minors are ring-zero, one 3x3 minor has a
// certified nonzero sign in the real embedding.
RankEvidence verify_rank3(const ExactGram& g, const QuotientRing& ring, int threads = 1);

struct PsdEvidence {
    unsigned digits = 100;
    Rational floor;
    // lower bounds with certified enclosures
    std::vector<std::pair<std::array<int, 3>, Rational>> principal3;
    std::vector<std::pair<std::array<int, 2>, Rational>> principal2;
    std::vector<std::pair<std::pair<int, int>, Rational>> entry_gaps;  // mu - |a_j| lower bounds
};

// Principal-minor floor check at certified precision, following a rank-3
// perturbation argument, plus the strict |entry| < mu bounds.
PsdEvidence verify_psd(const ExactGram& g, const QuotientRing& ring,
                       const SymbolicPattern& pattern, unsigned digits = 100,
                       const Rational& floor = make_rational(1, 10000), int threads = 1);

struct Certificate {
    UniPoly minpoly;
    QuotientRing::KElem rho;
    int y_sign = -1;
    Rational x_lo, x_hi;
    int n = 0;
    std::vector<std::vector<RingElem>> entries;
    std::vector<std::vector<std::string>> pattern_cells;  // "1", "+mu", "-mu", "a<k>"
    RankEvidence rank;
    PsdEvidence psd;
    std::vector<std::vector<double>> numeric;  // the numerical input Gram
    Rational numeric_residual;                 // max |embedded - numeric|
};

Certificate build_certificate(const QuotientRing& ring, const ExactGram& gram,
                              const SymbolicPattern& pattern, const RankEvidence& rank,
                              const PsdEvidence& psd, const NumericGram& numeric);

std::string certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);

// Full serialization, including an immediate parse-back equality check.
std::string emit_certificate(const Certificate& c);

struct RecheckReport {
    bool accepted = false;
    std::vector<std::string> failures;
};

// Independent re-verification of a certificate file: ring sanity, entry
// structure, every vanishing minor recomputed, completeness of the minor
// enumeration, the 3x3 sign, the PSD floors, the entry bounds, and the
// numeric residual. Does not touch the elimination engine.
RecheckReport recheck_certificate(const std::string& json_text);

}  // namespace exactpack

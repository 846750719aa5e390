#pragma once

#include <optional>
#include <variant>

#include "exactpack/gram.hpp"
#include "exactpack/interval.hpp"
#include "exactpack/polyops.hpp"
#include "exactpack/unipoly.hpp"

namespace exactpack {

// One scripted derivation step: a row/column block of the symbolic Gram whose
// 4x4 minors are analyzed, with an ordered list of actions to apply to them.
struct StepAction {
    enum class Kind {
        solve_linear,      // bind `target` from a minor factor linear in it
        solve_square,      // record target^2 = rhs from a pure-square factor
        sign_from_witness, // record the sign of `target` from the witness
        mu_lower_bound,    // raise the mu lower bound from a discriminant
        eliminate_to_mu    // resultants down to a univariate mu constraint
    };
    Kind kind;
    std::string target;                   // variable being solved / signed
    std::vector<std::string> eliminate;   // elimination order for eliminate_to_mu
    int minor_index = -1;                 // pin a specific minor; -1 scans in order
};

struct StepSpec {
    int step = 0;
    std::vector<int> rows, cols;          // 1-based indices into the pattern
    std::vector<std::string> var_order;
    std::vector<StepAction> actions;
};

// Everything the derivation has established so far.
struct ConstraintStore {
    // variable -> rational function of the still-free variables, in solve order
    std::vector<std::pair<std::string, RationalExpr>> solved;
    // denominator-cleared relations like (2+4mu)*a8^2 - (1+mu-3mu^2-mu^3)
    std::vector<MultiPoly> algebraic;
    // variable -> rhs of var^2 = rhs (matching an entry of `algebraic`)
    std::map<std::string, RationalExpr> square_rhs;
    std::map<std::string, int> sign_facts;  // -1 or +1
    RatInterval mu_bounds{Rational(0), Rational(1)};
    std::optional<UniPoly> mu_bound_poly;   // minimal polynomial of the lower bound

    bool is_solved(const std::string& var) const;
    const RationalExpr* binding(const std::string& var) const;
};

struct EliminationError : std::runtime_error {
    int step;
    std::string diagnostic_poly;
    EliminationError(int step_, const std::string& what, std::string poly = "")
        : std::runtime_error("step " + std::to_string(step_) + ": " + what),
          step(step_),
          diagnostic_poly(std::move(poly)) {}
};

// All 4x4 minors of the symbolic pattern restricted to the given row/column
// sets (1-based), enumerated in lexicographic subset order.
std::vector<MultiPoly> symbolic_minors(const SymbolicPattern& pattern,
                                       const std::vector<int>& rows,
                                       const std::vector<int>& cols);

// Substitutes solved bindings to a fixed point (clearing denominators),
// reduces powers through the stored square relations, and strips rational
// content. Cleared denominators are checked against the witness when given.
MultiPoly reduce_with_store(const MultiPoly& f, const ConstraintStore& store,
                            const WitnessValues* witness = nullptr);

// |f(w)| relative to the sum of term magnitudes at w; scale-free residual.
Rational witness_residual(const MultiPoly& f, const WitnessValues& w);

// Solves a degree-1 relation for var; the coefficient's sign is certified
// over the mu interval and witness-centered boxes before dividing.
RationalExpr solve_linear(const MultiPoly& f, const std::string& var,
                          const WitnessValues& witness, const RatInterval& mu_interval);

// Splits f into candidate factors (store-relation trial division, per-variable
// content, quadratic discriminant splits, univariate factorization) and
// returns the unique factor vanishing at the witness. Factors certified
// nonvanishing on the feasible region are excluded from selection.
MultiPoly select_vanishing_factor(const MultiPoly& f, const WitnessValues& witness,
                                  const Rational& tol,
                                  const ConstraintStore* store = nullptr);

// Pairwise resultants in var, content- and squarefree-reduced, zero results
// dropped. Errors if every resultant is identically zero.
std::vector<MultiPoly> eliminate_var_resultant(const std::vector<MultiPoly>& polys,
                                               const std::string& var,
                                               const WitnessValues& witness);

struct ScriptResult {
    ConstraintStore store;
    UniPoly minpoly;        // irreducible, witness-selected
    AlgebraicNumber mu;     // largest real root of minpoly
};

// Executes the scripted derivation over the pattern; the shipped default
// script encodes the ten-step derivation for the 8-line case.
ScriptResult run_script(const std::vector<StepSpec>& script, const SymbolicPattern& pattern,
                        const WitnessValues& witness);

// Greedy best-effort search over small row/column subsets; `budget` bounds the
// number of candidate subsystems analyzed.
struct AutoFailure {
    ConstraintStore partial;
    std::string reason;
};
std::variant<ScriptResult, AutoFailure> auto_pipeline(const SymbolicPattern& pattern,
                                                      const WitnessValues& witness, int budget);

// Table-style default script for the 8-line pattern, plus JSON (de)serialization.
std::vector<StepSpec> default_script();
std::vector<StepSpec> parse_script_json(const std::string& text);
std::string script_to_json(const std::vector<StepSpec>& script);

// Normal form of a rational expression over the store: all solved bindings
// substituted, powers of the square-relation variable reduced, conjugate
// rationalization applied, leaving (c0 + c1*y)/den with univariate parts.
struct RingForm {
    MultiPoly c0, c1, den;  // polynomials in mu alone; den nonzero
    std::string yvar;       // empty when no square variable is involved
};
RingForm ring_normal_form(const RationalExpr& e, const ConstraintStore& store);

// rational-function identity modulo the store (bindings + square relations)
bool same_mod_store(const RationalExpr& a, const RationalExpr& b, const ConstraintStore& store);

}  // namespace exactpack

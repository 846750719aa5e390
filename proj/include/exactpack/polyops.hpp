#pragma once

#include <optional>

#include "exactpack/multipoly.hpp"

namespace exactpack {

// Exact quotient f/g when g divides f; nullopt otherwise.
std::optional<MultiPoly> exact_divide(const MultiPoly& f, const MultiPoly& g);

// Determinant by fraction-free one-step (Bareiss) elimination; divisions are
// exact at every step, avoiding rational-function blowup on symbolic minors.
MultiPoly det_fraction_free(const std::vector<std::vector<MultiPoly>>& m);

// Plain cofactor expansion; kept as an independent oracle for tests.
MultiPoly det_cofactor(const std::vector<std::vector<MultiPoly>>& m);

// Sylvester resultant of f and g with respect to var, f's coefficient rows
// first. Errors if either input has degree 0 in var.
MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, const std::string& var);

// Pseudo-remainder of f by g in var: lc(g)^(deg f - deg g + 1) * f = q*g + r.
MultiPoly pseudo_rem(const MultiPoly& f, const MultiPoly& g, const std::string& var);

// Full multivariate gcd (primitive PRS); result is integer-primitive with
// positive leading coefficient. gcd(0,0) = 0.
MultiPoly poly_gcd(const MultiPoly& f, const MultiPoly& g);

// Content of f with respect to var: gcd of the coefficients of the powers of
// var (a polynomial in the remaining variables).
MultiPoly content_wrt(const MultiPoly& f, const std::string& var);

// f / gcd(f, df/dvar), integer-primitive. Requires positive degree in var.
MultiPoly squarefree_part(const MultiPoly& f, const std::string& var);

// Exact polynomial square root, if f is a perfect square.
std::optional<MultiPoly> poly_sqrt(const MultiPoly& f);

// Substitutes bindings (variable -> rational function) into f, clearing all
// denominators into a single RationalExpr; unbound variables pass through.
RationalExpr substitute(const MultiPoly& f,
                        const std::map<std::string, RationalExpr>& bindings);

}  // namespace exactpack

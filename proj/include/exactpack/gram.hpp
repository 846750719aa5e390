#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "exactpack/multipoly.hpp"

namespace exactpack {

// Columns are unit vectors spanning lines through the origin in R^d.
struct PackingMatrix {
    int d = 0;
    int n = 0;
    std::vector<std::vector<double>> columns;  // n columns of d coordinates
};

struct NumericGram {
    int n = 0;
    std::vector<std::vector<double>> entries;

    double at(int i, int j) const { return entries[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
};

enum class Cell { diagonal, plus_mu, minus_mu, free_var };

// Per-entry classification of a Gram matrix: diagonal, +mu/-mu contacts, or a
// numbered free variable (row-major first occurrence).
struct SymbolicPattern {
    int n = 0;
    std::vector<std::vector<Cell>> cells;
    std::vector<std::vector<int>> free_index;  // 1-based; 0 where not a free cell
    int free_count = 0;

    Cell cell(int i, int j) const { return cells[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    int free_at(int i, int j) const { return free_index[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    std::string free_name(int i, int j) const { return "a" + std::to_string(free_at(i, j)); }
    bool operator==(const SymbolicPattern& o) const {
        return n == o.n && cells == o.cells && free_index == o.free_index;
    }
};

struct ContactGraph {
    int n = 0;
    std::set<std::pair<int, int>> edges;  // 0-based, i < j
    bool operator==(const ContactGraph& o) const { return n == o.n && edges == o.edges; }
};

// mu plus each free variable, as exact rationals taken from the numeric input.
using WitnessValues = std::map<std::string, Rational>;

struct DetectedStructure {
    SymbolicPattern pattern;
    ContactGraph graph;
    WitnessValues witness;
};

// Square-root-of-rational value with an exact radicand.
struct RadicalValue {
    Rational radicand;                    // value = sqrt(radicand)
    std::optional<Rational> exact_root;   // set when the radicand is a perfect square
    double approx = 0.0;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sloane raw format: whitespace/newline separated decimals, column-major
// (column 1's d coordinates first); '#' comment lines ignored. Columns are
// renormalized to unit length; a zero-norm column is an error.
PackingMatrix parse_packing(const std::string& text, int d, int n);

// Gram text format: first token n, then n^2 entries row-major.
NumericGram parse_gram(const std::string& text);

NumericGram gram_from_packing(const PackingMatrix& p);

double coherence(const NumericGram& g);

// Levenshtein bound sqrt((3n - d^2 - 2d) / ((n-d)(d+2))); zero when vacuous.
RadicalValue levenshtein_bound(int d, int n);

// Classifies entries within tol of the coherence as contacts (sign kept),
// assigns free variables elsewhere. Entries between tol and 2*tol of the
// coherence are ambiguous and raise StructureError naming the cells.
DetectedStructure detect_structure(const NumericGram& g, double tol);

// Symbolic Gram matrix over variables mu, a1..aK following the pattern.
std::vector<std::vector<MultiPoly>> pattern_to_symbolic(const SymbolicPattern& pattern);

}  // namespace exactpack

#pragma once

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "exactpack/gram.hpp"
#include "exactpack/multipoly.hpp"

namespace testhelp {

using exactpack::Cell;
using exactpack::MultiPoly;
using exactpack::Rational;

inline MultiPoly v(const std::string& name) { return MultiPoly::variable(name); }
inline MultiPoly c(long k) { return MultiPoly(Rational(k)); }
inline MultiPoly c(long n, long d) { return MultiPoly(exactpack::make_rational(n, d)); }

inline std::string data_dir() {
    const char* env = std::getenv("EXACTPACK_DATA");
    return env ? env : "data";
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// random integer polynomial in the given variables
inline MultiPoly random_poly(std::mt19937& rng, const std::vector<std::string>& vars,
                             int max_terms, unsigned max_exp, long coeff_range) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<unsigned> expd(0, max_exp);
    std::uniform_int_distribution<long> coeff(-coeff_range, coeff_range);
    MultiPoly acc;
    int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
        std::vector<unsigned> exps;
        exps.reserve(vars.size());
        for (size_t i = 0; i < vars.size(); ++i) exps.push_back(expd(rng));
        long cv = coeff(rng);
        if (cv == 0) cv = 1;
        acc += MultiPoly::monomial(Rational(cv), vars, exps);
    }
    return acc;
}

// the published 5-decimal Gram entries of the 8-line packing
inline const double kPublishedGram[8][8] = {
    {1.00000, -0.59840, 0.64759, -0.12425, 0.16026, -0.64759, -0.22283, -0.64759},
    {-0.59840, 1.00000, -0.64759, -0.44579, -0.64759, -0.01815, -0.64759, 0.39325},
    {0.64759, -0.64759, 1.00000, 0.64759, -0.16026, -0.64759, 0.16026, 0.10359},
    {-0.12425, -0.44579, 0.64759, 1.00000, -0.10359, -0.01815, 0.64759, 0.64759},
    {0.16026, -0.64759, -0.16026, -0.10359, 1.00000, 0.64759, 0.64759, -0.64759},
    {-0.64759, -0.01815, -0.64759, -0.01815, 0.64759, 1.00000, 0.64759, -0.01815},
    {-0.22283, -0.64759, 0.16026, 0.64759, 0.64759, 0.64759, 1.00000, 0.12425},
    {-0.64759, 0.39325, 0.10359, 0.64759, -0.64759, -0.01815, 0.12425, 1.00000}};

// expected 8x8 pattern: 'd' diagonal, '+'/'-' contacts, 1..14 free variables
// (row-major first-occurrence numbering)
inline exactpack::SymbolicPattern reference_pattern() {
    static const char* rows[8] = {
        "d 1 + 2 3 - 4 -",
        "1 d - 5 - 6 - 7",
        "+ - d + 8 - 9 10",
        "2 5 + d 11 12 + +",
        "3 - 8 11 d + + -",
        "- 6 - 12 + d + 13",
        "4 - 9 + + + d 14",
        "- 7 10 + - 13 14 d"};
    exactpack::SymbolicPattern p;
    p.n = 8;
    p.cells.assign(8, std::vector<Cell>(8, Cell::free_var));
    p.free_index.assign(8, std::vector<int>(8, 0));
    p.free_count = 14;
    for (int i = 0; i < 8; ++i) {
        std::istringstream is(rows[i]);
        std::string tok;
        for (int j = 0; j < 8; ++j) {
            is >> tok;
            if (tok == "d")
                p.cells[i][j] = Cell::diagonal;
            else if (tok == "+")
                p.cells[i][j] = Cell::plus_mu;
            else if (tok == "-")
                p.cells[i][j] = Cell::minus_mu;
            else {
                p.cells[i][j] = Cell::free_var;
                p.free_index[i][j] = std::stoi(tok);
            }
        }
    }
    return p;
}

}  // namespace testhelp

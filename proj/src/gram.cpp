#include "exactpack/gram.hpp"

#include <cmath>
#include <sstream>

namespace exactpack {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    return tokens;
}

double parse_number(const std::string& tok) {
    try {
        return to_double(rational_from_decimal(tok));
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'");
    }
}

}  // namespace

PackingMatrix parse_packing(const std::string& text, int d, int n) {
    if (d < 1 || n < 1) throw ParseError("parse_packing: need d >= 1 and n >= 1");
    auto tokens = tokenize(text);
    if (static_cast<int>(tokens.size()) < d * n)
        throw ParseError("parse_packing: expected " + std::to_string(d * n) + " numbers, found " +
                         std::to_string(tokens.size()));
    if (static_cast<int>(tokens.size()) != d * n)
        throw ParseError("parse_packing: trailing data (" + std::to_string(tokens.size()) +
                         " numbers for " + std::to_string(d * n) + " expected)");
    PackingMatrix p;
    p.d = d;
    p.n = n;
    p.columns.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(d)));
    size_t t = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) p.columns[static_cast<size_t>(j)][static_cast<size_t>(i)] = parse_number(tokens[t++]);
    for (int j = 0; j < n; ++j) {
        double norm2 = 0;
        for (double x : p.columns[static_cast<size_t>(j)]) norm2 += x * x;
        if (norm2 < 1e-24) throw ParseError("parse_packing: column " + std::to_string(j + 1) + " has zero norm");
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : p.columns[static_cast<size_t>(j)]) x *= inv;
    }
    return p;
}

NumericGram parse_gram(const std::string& text) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw ParseError("parse_gram: empty input");
    int n;
    try {
        n = std::stoi(tokens[0]);
    } catch (const std::exception&) {
        throw ParseError("parse_gram: bad size token '" + tokens[0] + "'");
    }
    if (n < 1) throw ParseError("parse_gram: size must be positive");
    if (static_cast<int>(tokens.size()) != 1 + n * n)
        throw ParseError("parse_gram: expected " + std::to_string(n * n) + " entries, found " +
                         std::to_string(tokens.size() - 1));
    NumericGram g;
    g.n = n;
    g.entries.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
    size_t t = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = parse_number(tokens[t++]);
    for (int i = 0; i < n; ++i) {
        if (std::abs(g.at(i, i) - 1.0) > 1e-9)
            throw ParseError("parse_gram: diagonal entry " + std::to_string(i + 1) + " is not 1");
        for (int j = i + 1; j < n; ++j)
            if (std::abs(g.at(i, j) - g.at(j, i)) > 1e-9)
                throw ParseError("parse_gram: asymmetric at (" + std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + ")");
    }
    return g;
}

NumericGram gram_from_packing(const PackingMatrix& p) {
    NumericGram g;
    g.n = p.n;
    g.entries.assign(static_cast<size_t>(p.n), std::vector<double>(static_cast<size_t>(p.n), 0.0));
    for (int i = 0; i < p.n; ++i) {
        for (int j = i; j < p.n; ++j) {
            double s = 0;
            for (int k = 0; k < p.d; ++k)
                s += p.columns[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                     p.columns[static_cast<size_t>(j)][static_cast<size_t>(k)];
            g.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
            g.entries[static_cast<size_t>(j)][static_cast<size_t>(i)] = s;
        }
        g.entries[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
    }
    return g;
}

double coherence(const NumericGram& g) {
    if (g.n < 2) throw std::invalid_argument("coherence: need n >= 2");
    double m = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) m = std::max(m, std::abs(g.at(i, j)));
    return m;
}

RadicalValue levenshtein_bound(int d, int n) {
    if (d < 1 || n <= d) throw std::invalid_argument("levenshtein_bound: need n > d >= 1");
    RadicalValue v;
    long num = 3L * n - static_cast<long>(d) * d - 2L * d;
    if (num <= 0) {
        v.radicand = Rational(0);
        v.exact_root = Rational(0);
        v.approx = 0.0;
        return v;
    }
    long den = static_cast<long>(n - d) * (d + 2);
    v.radicand = make_rational(Integer(num), Integer(den));
    v.exact_root = rational_sqrt_exact(v.radicand);
    v.approx = std::sqrt(to_double(v.radicand));
    return v;
}

DetectedStructure detect_structure(const NumericGram& g, double tol) {
    if (tol <= 0) throw std::invalid_argument("detect_structure: tol must be positive");
    const int n = g.n;
    double mu = coherence(g);
    if (mu <= 0) throw StructureError("structure detection failed: coherence is zero");

    // ambiguity scan first, so errors mention every offending cell
    std::vector<std::pair<int, int>> ambiguous;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double gap = std::abs(std::abs(g.at(i, j)) - mu);
            if (gap > tol && gap <= 2 * tol) ambiguous.emplace_back(i, j);
        }
    if (!ambiguous.empty()) {
        std::string msg = "structure detection ambiguous near the coherence threshold at cells:";
        for (auto [i, j] : ambiguous)
            msg += " (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        throw StructureError(msg);
    }

    DetectedStructure out;
    out.pattern.n = n;
    out.pattern.cells.assign(static_cast<size_t>(n), std::vector<Cell>(static_cast<size_t>(n), Cell::free_var));
    out.pattern.free_index.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
    out.graph.n = n;

    for (int i = 0; i < n; ++i) out.pattern.cells[static_cast<size_t>(i)][static_cast<size_t>(i)] = Cell::diagonal;
    int next_free = 1;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = g.at(i, j);
            if (std::abs(std::abs(v) - mu) <= tol) {
                Cell c = v > 0 ? Cell::plus_mu : Cell::minus_mu;
                out.pattern.cells[static_cast<size_t>(i)][static_cast<size_t>(j)] = c;
                out.pattern.cells[static_cast<size_t>(j)][static_cast<size_t>(i)] = c;
                out.graph.edges.insert({i, j});
            } else {
                int k = next_free++;
                out.pattern.free_index[static_cast<size_t>(i)][static_cast<size_t>(j)] = k;
                out.pattern.free_index[static_cast<size_t>(j)][static_cast<size_t>(i)] = k;
                out.witness["a" + std::to_string(k)] = Rational(v);  // exact dyadic
            }
        }
    }
    out.pattern.free_count = next_free - 1;
    out.witness["mu"] = Rational(mu);  // exact dyadic of the coherence
    return out;
}

std::vector<std::vector<MultiPoly>> pattern_to_symbolic(const SymbolicPattern& pattern) {
    const int n = pattern.n;
    MultiPoly mu = MultiPoly::variable("mu");
    std::vector<std::vector<MultiPoly>> m(static_cast<size_t>(n), std::vector<MultiPoly>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            switch (pattern.cell(i, j)) {
                case Cell::diagonal: m[static_cast<size_t>(i)][static_cast<size_t>(j)] = MultiPoly(Rational(1)); break;
                case Cell::plus_mu: m[static_cast<size_t>(i)][static_cast<size_t>(j)] = mu; break;
                case Cell::minus_mu: m[static_cast<size_t>(i)][static_cast<size_t>(j)] = -mu; break;
                case Cell::free_var:
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] = MultiPoly::variable(pattern.free_name(i, j));
                    break;
            }
        }
    }
    return m;
}

}  // namespace exactpack

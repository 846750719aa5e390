#include "exactpack/polyops.hpp"

#include <algorithm>
#include <stdexcept>

#include "exactpack/unipoly.hpp"

namespace exactpack {

std::optional<MultiPoly> exact_divide(const MultiPoly& f, const MultiPoly& g) {
    if (g.is_zero()) return std::nullopt;
    if (f.is_zero()) return MultiPoly();
    if (g.is_constant()) return f.scaled(Rational(1) / g.constant_value());
    MultiPoly rem = f, div = g;
    MultiPoly::align(rem, div);
    const auto vars = rem.vars();
    auto [ge, gc] = div.leading_term_grlex();
    MultiPoly q;
    while (!rem.is_zero()) {
        auto [fe, fc] = rem.leading_term_grlex();
        MultiPoly::ExpVec qe(fe.size());
        for (size_t i = 0; i < fe.size(); ++i) {
            if (fe[i] < ge[i]) return std::nullopt;
            qe[i] = fe[i] - ge[i];
        }
        std::vector<unsigned> exps(qe.begin(), qe.end());
        MultiPoly t = MultiPoly::monomial(fc / gc, vars, exps);
        q += t;
        rem -= t * div;
    }
    return q;
}

MultiPoly det_fraction_free(const std::vector<std::vector<MultiPoly>>& m) {
    const size_t n = m.size();
    if (n == 0) throw std::invalid_argument("det: empty matrix");
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("det: matrix not square");
    if (n == 1) return m[0][0];

    std::vector<std::vector<MultiPoly>> a = m;
    int sign = 1;
    MultiPoly prev(Rational(1));
    for (size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k].is_zero()) {
            size_t p = k + 1;
            while (p < n && a[p][k].is_zero()) ++p;
            if (p == n) return MultiPoly();  // singular column
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                MultiPoly t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                auto q = exact_divide(t, prev);
                if (!q) throw std::logic_error("det_fraction_free: inexact division");
                a[i][j] = std::move(*q);
            }
            a[i][k] = MultiPoly();
        }
        prev = a[k][k];
    }
    MultiPoly d = a[n - 1][n - 1];
    return sign < 0 ? -d : d;
}

MultiPoly det_cofactor(const std::vector<std::vector<MultiPoly>>& m) {
    const size_t n = m.size();
    if (n == 1) return m[0][0];
    MultiPoly acc;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<MultiPoly>> sub(n - 1);
        for (size_t i = 1; i < n; ++i)
            for (size_t k = 0; k < n; ++k)
                if (k != j) sub[i - 1].push_back(m[i][k]);
        MultiPoly t = m[0][j] * det_cofactor(sub);
        if (j % 2)
            acc -= t;
        else
            acc += t;
    }
    return acc;
}

MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, const std::string& var) {
    unsigned df = f.degree(var), dg = g.degree(var);
    if (df == 0 || dg == 0)
        throw std::invalid_argument("resultant: inputs must have positive degree in " + var);
    std::vector<MultiPoly> fc(df + 1), gc(dg + 1);
    for (unsigned k = 0; k <= df; ++k) fc[k] = f.coeff_of(var, k);
    for (unsigned k = 0; k <= dg; ++k) gc[k] = g.coeff_of(var, k);
    const size_t n = df + dg;
    std::vector<std::vector<MultiPoly>> s(n, std::vector<MultiPoly>(n));
    for (unsigned r = 0; r < dg; ++r)  // f's rows first
        for (unsigned k = 0; k <= df; ++k) s[r][r + df - k] = fc[k];
    for (unsigned r = 0; r < df; ++r)
        for (unsigned k = 0; k <= dg; ++k) s[dg + r][r + dg - k] = gc[k];
    return det_fraction_free(s);
}

MultiPoly pseudo_rem(const MultiPoly& f, const MultiPoly& g, const std::string& var) {
    unsigned dg = g.degree(var);
    if (dg == 0) throw std::invalid_argument("pseudo_rem: divisor constant in " + var);
    unsigned df = f.degree(var);
    if (f.is_zero() || df < dg) return f;
    MultiPoly r = f;
    MultiPoly lg = g.leading_coeff(var);
    MultiPoly v = MultiPoly::variable(var);
    long mults = static_cast<long>(df) - static_cast<long>(dg) + 1;
    while (!r.is_zero() && r.degree(var) >= dg) {
        unsigned dr = r.degree(var);
        MultiPoly lr = r.leading_coeff(var);
        r = r * lg - lr * v.pow(dr - dg) * g;
        --mults;
    }
    // degree can drop by more than one per step; keep the multiplier at
    // exactly lc(g)^(df-dg+1) so prem matches the textbook definition
    for (; mults > 0; --mults) r = r * lg;
    return r;
}

namespace {

// gcd over Q reduced to primitive parts; operates recursively on variables.
MultiPoly gcd_primitive(const MultiPoly& a, const MultiPoly& b);

MultiPoly content_in(const MultiPoly& f, const std::string& var) {
    unsigned d = f.degree(var);
    MultiPoly c;
    for (unsigned k = 0; k <= d; ++k) {
        MultiPoly ck = f.coeff_of(var, k);
        if (ck.is_zero()) continue;
        c = c.is_zero() ? ck.primitive_part() : gcd_primitive(c, ck);
        if (c.is_constant()) break;
    }
    return c;
}

MultiPoly gcd_primitive(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero()) return b.is_zero() ? MultiPoly() : b.primitive_part();
    if (b.is_zero()) return a.primitive_part();
    MultiPoly f = a.compact(), g = b.compact();
    if (f.is_constant() || g.is_constant()) return MultiPoly(Rational(1));

    // main variable: last canonical variable present in either
    auto pf = f.present_vars(), pg = g.present_vars();
    std::string var = pf.back();
    if (var_precedes(var, pg.back())) var = pg.back();

    if (!f.contains(var)) return gcd_primitive(content_in(g, var), f);
    if (!g.contains(var)) return gcd_primitive(content_in(f, var), g);

    MultiPoly cf = content_in(f, var), cg = content_in(g, var);
    MultiPoly cont = gcd_primitive(cf, cg);
    MultiPoly pfp = *exact_divide(f, cf);
    MultiPoly pgp = *exact_divide(g, cg);

    if (pfp.degree(var) < pgp.degree(var)) std::swap(pfp, pgp);
    while (true) {
        MultiPoly r = pseudo_rem(pfp, pgp, var);
        if (r.is_zero()) break;
        if (r.degree(var) == 0) return cont;  // coprime primitive parts
        pfp = pgp;
        MultiPoly rc = content_in(r, var);
        pgp = *exact_divide(r, rc);
    }
    MultiPoly gp = *exact_divide(pgp, content_in(pgp, var));
    return (cont * gp).primitive_part();
}

}  // namespace

MultiPoly poly_gcd(const MultiPoly& f, const MultiPoly& g) {
    // univariate pairs in the same variable take the fast integer path
    auto pf = f.present_vars(), pg = g.present_vars();
    if (pf.size() == 1 && pg.size() == 1 && pf[0] == pg[0]) {
        UniPoly d = unipoly_gcd(UniPoly::from_multipoly(f, pf[0]),
                                UniPoly::from_multipoly(g, pf[0]));
        return d.to_multipoly(pf[0]);
    }
    return gcd_primitive(f, g);
}

MultiPoly content_wrt(const MultiPoly& f, const std::string& var) {
    if (f.is_zero()) return MultiPoly();
    if (!f.contains(var)) return f.primitive_part();
    return content_in(f, var);
}

MultiPoly squarefree_part(const MultiPoly& f, const std::string& var) {
    if (f.degree(var) == 0)
        throw std::invalid_argument("squarefree_part: no positive degree in " + var);
    if (auto pv = f.present_vars(); pv.size() == 1 && pv[0] == var)
        return unipoly_squarefree_part(UniPoly::from_multipoly(f, var)).to_multipoly(var);
    MultiPoly d = f.derivative(var);
    MultiPoly g = poly_gcd(f, d);
    auto q = exact_divide(f, g);
    if (!q) throw std::logic_error("squarefree_part: gcd does not divide input");
    return q->primitive_part();
}

std::optional<MultiPoly> poly_sqrt(const MultiPoly& f) {
    if (f.is_zero()) return MultiPoly();
    if (f.is_constant()) {
        auto r = rational_sqrt_exact(f.constant_value());
        if (!r) return std::nullopt;
        return MultiPoly(*r);
    }
    auto present = f.present_vars();
    const std::string var = present.front();
    unsigned d = f.degree(var);
    if (d % 2) return std::nullopt;
    unsigned m = d / 2;
    auto lead = poly_sqrt(f.coeff_of(var, d));
    if (!lead) return std::nullopt;

    // match coefficients downward from the top: s = sum s_k var^k
    std::vector<MultiPoly> s(m + 1);
    s[m] = *lead;
    MultiPoly v = MultiPoly::variable(var);
    MultiPoly twice_lead = lead->scaled(Rational(2));
    for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
        // coefficient of var^(k+m) in s^2 is 2*s_m*s_k plus cross terms s_i*s_j
        // with i+j = k+m and k < i,j < m
        MultiPoly cross;
        for (unsigned i = static_cast<unsigned>(k) + 1; i + 1 <= m; ++i) {
            unsigned j = static_cast<unsigned>(k) + m - i;
            if (j < i) break;
            if (j + 1 > m) continue;
            MultiPoly t = s[i] * s[j];
            cross += (i == j) ? t : t.scaled(Rational(2));
        }
        MultiPoly target = f.coeff_of(var, static_cast<unsigned>(k) + m) - cross;
        auto q = exact_divide(target, twice_lead);
        if (!q) return std::nullopt;
        s[static_cast<unsigned>(k)] = std::move(*q);
    }
    MultiPoly root;
    for (unsigned k = 0; k <= m; ++k) root += s[k] * v.pow(k);
    if (root * root != f) return std::nullopt;
    return root;
}

RationalExpr substitute(const MultiPoly& f,
                        const std::map<std::string, RationalExpr>& bindings) {
    // simultaneous substitution: each term c * prod v^e_v maps to
    // c * prod_{bound v} bn_v^e_v * bd_v^(deg_v f - e_v) * prod_{unbound} v^e_v
    // over the common denominator prod_{bound v} bd_v^(deg_v f)
    struct Bound {
        size_t idx;
        unsigned deg;
        std::vector<MultiPoly> num_pow, den_pow;
    };
    const auto& vars = f.vars();
    std::vector<Bound> bound;
    MultiPoly den(Rational(1));
    for (const auto& [var, expr] : bindings) {
        unsigned d = f.degree(var);
        if (d == 0) continue;
        auto it = std::find(vars.begin(), vars.end(), var);
        Bound b;
        b.idx = static_cast<size_t>(it - vars.begin());
        b.deg = d;
        b.num_pow.resize(d + 1);
        b.den_pow.resize(d + 1);
        b.num_pow[0] = MultiPoly(Rational(1));
        b.den_pow[0] = MultiPoly(Rational(1));
        for (unsigned k = 1; k <= d; ++k) {
            b.num_pow[k] = b.num_pow[k - 1] * expr.num();
            b.den_pow[k] = b.den_pow[k - 1] * expr.den();
        }
        den = den * b.den_pow[d];
        bound.push_back(std::move(b));
    }
    if (bound.empty()) return RationalExpr(f);

    MultiPoly acc;
    for (const auto& [e, c] : f.terms()) {
        MultiPoly::ExpVec rest = e;
        MultiPoly piece(c);
        for (const auto& b : bound) {
            unsigned ev = e[b.idx];
            rest[b.idx] = 0;
            piece = piece * b.num_pow[ev] * b.den_pow[b.deg - ev];
        }
        std::vector<unsigned> exps(rest.begin(), rest.end());
        piece = piece * MultiPoly::monomial(Rational(1), vars, exps);
        acc += piece;
    }
    return RationalExpr(std::move(acc), std::move(den));
}

RationalExpr RationalExpr::reduced_full() const {
    if (num_.is_zero()) return *this;
    MultiPoly g = poly_gcd(num_, den_);
    if (g.is_constant()) return *this;
    return RationalExpr(*exact_divide(num_, g), *exact_divide(den_, g));
}

}  // namespace exactpack

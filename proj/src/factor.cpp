#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "exactpack/unipoly.hpp"

// Irreducible factorization over Z: squarefree split (Yun), factorization mod
// a small prime (Berlekamp), linear Hensel lifting to a Landau-Mignotte height
// bound, then exhaustive subset recombination. Adequate to degree ~64.

namespace exactpack {

namespace {

using IVec = std::vector<Integer>;

void trim(IVec& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

IVec exact_div(const IVec& num, const IVec& den) {
    IVec r = num, q;
    long dd = static_cast<long>(den.size()) - 1;
    if (dd < 0) throw std::logic_error("exact_div by zero");
    if (r.empty()) return r;
    if (static_cast<long>(r.size()) - 1 < dd) throw std::logic_error("exact_div underflow");
    q.assign(r.size() - den.size() + 1, Integer(0));
    while (static_cast<long>(r.size()) - 1 >= dd && !r.empty()) {
        long shift = static_cast<long>(r.size()) - 1 - dd;
        Integer qc = r.back() / den.back();
        if (qc * den.back() != r.back()) throw std::logic_error("exact_div: inexact");
        q[static_cast<size_t>(shift)] = qc;
        for (long i = 0; i <= dd; ++i) r[static_cast<size_t>(i + shift)] -= qc * den[static_cast<size_t>(i)];
        trim(r);
    }
    if (!r.empty()) throw std::logic_error("exact_div: nonzero remainder");
    return q;
}

// --- arithmetic mod a word-sized prime --------------------------------------

using PVec = std::vector<long>;  // coefficients in [0, p)

void ptrim(PVec& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

PVec pmul(const PVec& a, const PVec& b, long p) {
    if (a.empty() || b.empty()) return {};
    PVec r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    ptrim(r);
    return r;
}

long pinv(long a, long p) {
    long t = 0, nt = 1, r = p, nr = a % p;
    while (nr != 0) {
        long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    return ((t % p) + p) % p;
}

// remainder of a by b (b nonzero)
PVec pmod(PVec a, const PVec& b, long p) {
    long db = static_cast<long>(b.size()) - 1;
    long invlead = pinv(b.back(), p);
    while (static_cast<long>(a.size()) - 1 >= db && !a.empty()) {
        long shift = static_cast<long>(a.size()) - 1 - db;
        long q = a.back() * invlead % p;
        for (long i = 0; i <= db; ++i)
            a[static_cast<size_t>(i + shift)] =
                ((a[static_cast<size_t>(i + shift)] - q * b[static_cast<size_t>(i)]) % p + p) % p;
        ptrim(a);
    }
    return a;
}

PVec pgcd(PVec a, PVec b, long p) {
    while (!b.empty()) {
        PVec r = pmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        long inv = pinv(a.back(), p);
        for (long& c : a) c = c * inv % p;
    }
    return a;
}

PVec pmonic(PVec a, long p) {
    if (a.empty()) return a;
    long inv = pinv(a.back(), p);
    for (long& c : a) c = c * inv % p;
    return a;
}

PVec ppow_xq(long e, const PVec& m, long p) {
    // x^e mod m
    PVec r{1}, base{0, 1};
    base = pmod(base, m, p);
    while (e) {
        if (e & 1) r = pmod(pmul(r, base, p), m, p);
        e >>= 1;
        if (e) base = pmod(pmul(base, base, p), m, p);
    }
    return r;
}

long mod_small(const Integer& a, long p) {
    Integer t = a % p;
    long v = t.get_si();
    return ((v % p) + p) % p;
}

PVec pderiv(const PVec& a, long p) {
    PVec d;
    for (size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<long>(k) % p * a[k] % p);
    ptrim(d);
    return d;
}

// Berlekamp factorization of a squarefree monic polynomial mod small p.
std::vector<PVec> berlekamp(const PVec& f, long p) {
    long n = static_cast<long>(f.size()) - 1;
    if (n <= 1) return {f};
    // rows of B: x^(k*p) mod f
    std::vector<PVec> rows(static_cast<size_t>(n));
    PVec xp = ppow_xq(p, f, p);
    rows[0] = PVec{1};
    for (long k = 1; k < n; ++k) rows[static_cast<size_t>(k)] = pmod(pmul(rows[static_cast<size_t>(k - 1)], xp, p), f, p);
    // nullspace of (B - I)^T
    std::vector<PVec> m(static_cast<size_t>(n), PVec(static_cast<size_t>(n), 0));
    for (long r = 0; r < n; ++r) {
        const PVec& row = rows[static_cast<size_t>(r)];
        for (long c = 0; c < n; ++c) {
            long v = c < static_cast<long>(row.size()) ? row[static_cast<size_t>(c)] : 0;
            if (c == r) v = ((v - 1) % p + p) % p;
            m[static_cast<size_t>(c)][static_cast<size_t>(r)] = v;  // transpose
        }
    }
    // Gaussian elimination; collect free-variable basis
    std::vector<long> pivot_col(static_cast<size_t>(n), -1);
    long rank = 0;
    for (long col = 0; col < n && rank < n; ++col) {
        long sel = -1;
        for (long r = rank; r < n; ++r)
            if (m[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(m[static_cast<size_t>(sel)], m[static_cast<size_t>(rank)]);
        long inv = pinv(m[static_cast<size_t>(rank)][static_cast<size_t>(col)], p);
        for (long c = 0; c < n; ++c) m[static_cast<size_t>(rank)][static_cast<size_t>(c)] = m[static_cast<size_t>(rank)][static_cast<size_t>(c)] * inv % p;
        for (long r = 0; r < n; ++r) {
            if (r == rank) continue;
            long factor = m[static_cast<size_t>(r)][static_cast<size_t>(col)];
            if (factor == 0) continue;
            for (long c = 0; c < n; ++c)
                m[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                    ((m[static_cast<size_t>(r)][static_cast<size_t>(c)] - factor * m[static_cast<size_t>(rank)][static_cast<size_t>(c)]) % p + p) % p;
        }
        pivot_col[static_cast<size_t>(rank)] = col;
        ++rank;
    }
    std::vector<PVec> basis;
    std::vector<bool> is_pivot(static_cast<size_t>(n), false);
    for (long r = 0; r < rank; ++r) is_pivot[static_cast<size_t>(pivot_col[static_cast<size_t>(r)])] = true;
    for (long col = 0; col < n; ++col) {
        if (is_pivot[static_cast<size_t>(col)]) continue;
        PVec v(static_cast<size_t>(n), 0);
        v[static_cast<size_t>(col)] = 1;
        for (long r = 0; r < rank; ++r) {
            long pc = pivot_col[static_cast<size_t>(r)];
            v[static_cast<size_t>(pc)] = ((-m[static_cast<size_t>(r)][static_cast<size_t>(col)]) % p + p) % p;
        }
        ptrim(v);
        basis.push_back(std::move(v));
    }
    // nullspace dimension equals the number of irreducible factors; the
    // constant vector (always present) is in the basis
    size_t nfactors = basis.size();
    std::vector<PVec> factors{pmonic(f, p)};
    if (nfactors <= 1) return factors;
    for (const PVec& v : basis) {
        if (factors.size() >= nfactors) break;
        if (v.size() <= 1) continue;  // skip the constant basis vector
        for (long s = 0; s < p && factors.size() < nfactors; ++s) {
            PVec vs = v;
            if (vs.empty()) vs.push_back(0);
            vs[0] = ((vs[0] - s) % p + p) % p;
            ptrim(vs);
            if (vs.empty()) continue;
            std::vector<PVec> next;
            for (const PVec& f0 : factors) {
                if (static_cast<long>(f0.size()) - 1 <= 1) {
                    next.push_back(f0);
                    continue;
                }
                PVec g = pgcd(f0, vs, p);
                if (g.size() <= 1 || g.size() == f0.size()) {
                    next.push_back(f0);
                } else {
                    PVec h = pmonic(f0, p);
                    // h / g
                    PVec q;
                    {
                        PVec r = h;
                        long dg = static_cast<long>(g.size()) - 1;
                        q.assign(r.size() - g.size() + 1, 0);
                        while (static_cast<long>(r.size()) - 1 >= dg && !r.empty()) {
                            long shift = static_cast<long>(r.size()) - 1 - dg;
                            long qc = r.back();  // g monic
                            q[static_cast<size_t>(shift)] = qc;
                            for (long i = 0; i <= dg; ++i)
                                r[static_cast<size_t>(i + shift)] =
                                    ((r[static_cast<size_t>(i + shift)] - qc * g[static_cast<size_t>(i)]) % p + p) % p;
                            ptrim(r);
                        }
                    }
                    next.push_back(g);
                    next.push_back(q);
                }
            }
            factors = std::move(next);
        }
    }
    return factors;
}

// --- Hensel lifting ----------------------------------------------------------

Integer sym_mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (r * 2 > m) r -= m;
    return r;
}

// lift monic factors f ≡ lc * prod(fi) (mod p) to the same congruence mod p^k
std::vector<IVec> hensel_lift(const IVec& f, const std::vector<PVec>& modular, long p,
                              unsigned rounds) {
    const size_t r = modular.size();
    std::vector<IVec> fi(r);
    for (size_t i = 0; i < r; ++i) {
        fi[i].assign(modular[i].begin(), modular[i].end());
    }
    const Integer lc = f.back();
    long lcp = mod_small(lc, p);
    long lcinv = pinv(lcp, p);

    // Bezout data: bi = (prod_{j != i} fj)^(-1) mod (fi, p)
    std::vector<PVec> bez(r);
    for (size_t i = 0; i < r; ++i) {
        PVec prod{1};
        for (size_t j = 0; j < r; ++j) {
            if (j == i) continue;
            prod = pmod(pmul(prod, modular[j], p), modular[i], p);
        }
        // invert prod mod (fi, p) by extended euclid over F_p[x]
        PVec a = modular[i], b = prod, s0{}, s1{1};
        // maintain: s * prod ≡ b (mod fi)
        while (true) {
            if (b.empty()) throw std::logic_error("hensel: factors not coprime");
            if (b.size() == 1) {
                long inv = pinv(b[0], p);
                for (long& c : s1) c = c * inv % p;
                bez[i] = s1;
                break;
            }
            // a = q*b + rem
            PVec rem = a;
            long db = static_cast<long>(b.size()) - 1;
            long invlead = pinv(b.back(), p);
            PVec q(rem.size() >= b.size() ? rem.size() - b.size() + 1 : 0, 0);
            while (static_cast<long>(rem.size()) - 1 >= db && !rem.empty()) {
                long shift = static_cast<long>(rem.size()) - 1 - db;
                long qc = rem.back() * invlead % p;
                q[static_cast<size_t>(shift)] = qc;
                for (long ii = 0; ii <= db; ++ii)
                    rem[static_cast<size_t>(ii + shift)] =
                        ((rem[static_cast<size_t>(ii + shift)] - qc * b[static_cast<size_t>(ii)]) % p + p) % p;
                ptrim(rem);
            }
            // s_new = s0 - q*s1
            PVec qs1 = pmul(q, s1, p);
            PVec snew = s0;
            if (snew.size() < qs1.size()) snew.resize(qs1.size(), 0);
            for (size_t k2 = 0; k2 < qs1.size(); ++k2) snew[k2] = ((snew[k2] - qs1[k2]) % p + p) % p;
            ptrim(snew);
            a = std::move(b);
            b = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(snew);
        }
    }

    Integer mj(p);  // current modulus p^j
    for (unsigned round = 1; round < rounds; ++round) {
        Integer mnext = mj * p;
        // e = (f - lc * prod fi) / p^j mod p
        IVec prod{Integer(1)};
        for (const IVec& g : fi) {
            IVec np(prod.size() + g.size() - 1, Integer(0));
            for (size_t a2 = 0; a2 < prod.size(); ++a2)
                for (size_t b2 = 0; b2 < g.size(); ++b2) np[a2 + b2] += prod[a2] * g[b2];
            for (Integer& c : np) mpz_mod(c.get_mpz_t(), c.get_mpz_t(), mnext.get_mpz_t());
            prod = std::move(np);
        }
        IVec e = f;
        if (e.size() < prod.size()) e.resize(prod.size(), Integer(0));
        for (size_t k2 = 0; k2 < prod.size(); ++k2) e[k2] -= lc * prod[k2];
        PVec ep(e.size(), 0);
        bool zero = true;
        for (size_t k2 = 0; k2 < e.size(); ++k2) {
            Integer t;
            mpz_mod(t.get_mpz_t(), e[k2].get_mpz_t(), mnext.get_mpz_t());
            t /= mj;  // exact: e ≡ 0 mod p^j
            ep[k2] = mod_small(t, p);
            if (ep[k2]) zero = false;
        }
        ptrim(ep);
        if (!zero) {
            for (size_t i = 0; i < r; ++i) {
                PVec fi_p(fi[i].size());
                for (size_t k2 = 0; k2 < fi[i].size(); ++k2)
                    fi_p[k2] = mod_small(fi[i][k2], p);
                PVec ei = pmod(ep, fi_p, p);
                PVec delta = pmod(pmul(pmul(ei, bez[i], p), PVec{lcinv}, p), fi_p, p);
                for (size_t k2 = 0; k2 < delta.size(); ++k2) fi[i][k2] += mj * delta[k2];
            }
        }
        mj = mnext;
    }
    return fi;
}

// --- driver ------------------------------------------------------------------

bool is_prime_small(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<UniPoly> factor_squarefree(const UniPoly& g) {
    if (g.degree() <= 1) return {g};
    const IVec& coeffs = g.coeffs();
    long n = g.degree();

    long p = 3;
    PVec gbar;
    while (true) {
        while (!is_prime_small(p)) ++p;
        if (g.lead() % p != 0) {
            gbar.assign(static_cast<size_t>(n + 1), 0);
            for (long k = 0; k <= n; ++k) {
                Integer t = coeffs[static_cast<size_t>(k)] % p;
                if (t < 0) t += p;
                gbar[static_cast<size_t>(k)] = static_cast<long>(t.get_si());
            }
            ptrim(gbar);
            PVec d = pderiv(gbar, p);
            if (!d.empty() && pgcd(gbar, d, p).size() == 1) break;  // squarefree mod p
        }
        ++p;
    }

    std::vector<PVec> modular = berlekamp(pmonic(gbar, p), p);
    if (modular.size() == 1) return {g};
    std::sort(modular.begin(), modular.end());

    // Landau-Mignotte style height bound for any factor of g (including lc)
    Integer norm2(0);
    for (const Integer& c : coeffs) norm2 += c * c;
    Integer height = isqrt_floor(norm2) + 1;
    Integer lead = g.lead() < 0 ? Integer(-g.lead()) : g.lead();
    Integer bound = (height * lead) << static_cast<unsigned>(n + 1);
    unsigned rounds = 1;
    Integer pk(p);
    while (pk <= bound * 2) {
        pk *= p;
        ++rounds;
    }

    std::vector<IVec> lifted = hensel_lift(coeffs, modular, p, rounds);

    // subset recombination
    std::vector<size_t> live(lifted.size());
    std::iota(live.begin(), live.end(), 0);
    IVec rest = coeffs;
    Integer lc = rest.back();
    std::vector<UniPoly> out;

    auto try_subset = [&](const std::vector<size_t>& subset) -> bool {
        IVec prod{lc};
        for (size_t idx : subset) {
            const IVec& fi = lifted[idx];
            IVec np(prod.size() + fi.size() - 1, Integer(0));
            for (size_t a2 = 0; a2 < prod.size(); ++a2)
                for (size_t b2 = 0; b2 < fi.size(); ++b2) np[a2 + b2] += prod[a2] * fi[b2];
            for (Integer& c : np) c = sym_mod(c, pk);
            prod = std::move(np);
        }
        UniPoly cand = UniPoly::from_coeffs(prod);
        if (cand.lead() < 0) {
            IVec neg = cand.coeffs();
            for (Integer& c : neg) c = -c;
            cand = UniPoly::from_coeffs(std::move(neg));
        }
        UniPoly current = UniPoly::from_coeffs(rest);
        if (!unipoly_divides(cand, current)) return false;
        out.push_back(cand);
        rest = exact_div(current.coeffs(), cand.coeffs());
        lc = rest.back();
        std::vector<size_t> remaining;
        for (size_t idx : live)
            if (std::find(subset.begin(), subset.end(), idx) == subset.end())
                remaining.push_back(idx);
        live = std::move(remaining);
        return true;
    };

    size_t s = 1;
    while (2 * s <= live.size()) {
        // iterate subsets of size s of `live` in lexicographic order
        std::vector<size_t> pick(s);
        std::iota(pick.begin(), pick.end(), 0);
        bool found = false;
        while (true) {
            std::vector<size_t> subset(s);
            for (size_t i = 0; i < s; ++i) subset[i] = live[pick[i]];
            if (try_subset(subset)) {
                found = true;
                break;
            }
            // next combination
            long i = static_cast<long>(s) - 1;
            while (i >= 0 && pick[static_cast<size_t>(i)] == live.size() - s + static_cast<size_t>(i)) --i;
            if (i < 0) break;
            ++pick[static_cast<size_t>(i)];
            for (size_t j = static_cast<size_t>(i) + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
        }
        if (!found) ++s;
    }
    UniPoly tail = UniPoly::from_coeffs(rest);
    if (tail.degree() >= 1) {
        if (tail.lead() < 0) {
            IVec neg = tail.coeffs();
            for (Integer& c : neg) c = -c;
            tail = UniPoly::from_coeffs(std::move(neg));
        }
        out.push_back(tail);
    }
    return out;
}

}  // namespace

Factorization factor_over_integers(const UniPoly& p) {
    if (p.degree() < 1) throw std::invalid_argument("factor_over_integers: degree must be >= 1");
    Factorization result;
    result.sign = p.lead() < 0 ? -1 : 1;
    UniPoly q = p;
    if (result.sign < 0) {
        IVec neg = q.coeffs();
        for (Integer& c : neg) c = -c;
        q = UniPoly::from_coeffs(std::move(neg));
    }

    // Yun's squarefree decomposition. b stays primitive; c and d keep their
    // raw integer content (re-normalizing them would break the recurrence).
    std::vector<std::pair<UniPoly, int>> squarefree;
    {
        auto raw_deriv = [](const IVec& v) {
            IVec d;
            for (size_t k = 1; k < v.size(); ++k) d.push_back(v[k] * Integer(static_cast<long>(k)));
            trim(d);
            return d;
        };
        UniPoly qd = q.derivative();
        UniPoly a = unipoly_gcd(q, qd);
        if (a.degree() == 0) {
            squarefree.emplace_back(q, 1);
        } else {
            IVec b = exact_div(q.coeffs(), a.coeffs());
            // compute against the true derivative of q, not the primitivized one
            IVec qderiv = raw_deriv(q.coeffs());
            IVec c = exact_div(qderiv, a.coeffs());
            int i = 1;
            while (b.size() > 1) {
                IVec bd = raw_deriv(b);
                IVec d = c;
                if (d.size() < bd.size()) d.resize(bd.size(), Integer(0));
                for (size_t k = 0; k < bd.size(); ++k) d[k] -= bd[k];
                trim(d);
                UniPoly ai = unipoly_gcd(UniPoly::from_coeffs(b), UniPoly::from_coeffs(d));
                if (ai.degree() > 0) squarefree.emplace_back(ai, i);
                b = exact_div(b, ai.coeffs());
                c = exact_div(d, ai.coeffs());
                ++i;
            }
        }
    }

    std::vector<std::pair<UniPoly, int>> out;
    for (auto& [g, mult] : squarefree) {
        // normalize factor sign before splitting
        UniPoly gg = g;
        if (gg.lead() < 0) {
            IVec neg = gg.coeffs();
            for (Integer& c : neg) c = -c;
            gg = UniPoly::from_coeffs(std::move(neg));
        }
        for (UniPoly& f : factor_squarefree(gg)) out.emplace_back(std::move(f), mult);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
        return a.first.coeffs() < b.first.coeffs();
    });
    result.factors = std::move(out);
    return result;
}

}  // namespace exactpack

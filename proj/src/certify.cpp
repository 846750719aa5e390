#include "exactpack/certify.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace exactpack {

bool RingElem::is_zero() const {
    auto all0 = [](const std::vector<Rational>& v) {
        return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
    };
    return all0(c0) && all0(c1);
}

QuotientRing::QuotientRing(UniPoly minpoly, KElem rho, int y_sign, AlgebraicNumber x_root)
    : minpoly_(std::move(minpoly)), rho_(std::move(rho)), y_sign_(y_sign), x_root_(std::move(x_root)) {
    if (minpoly_.degree() < 1) throw CertifyError("quotient ring: constant modulus");
    if (static_cast<int>(rho_.size()) != degree()) throw CertifyError("quotient ring: bad rho size");
    if (y_sign_ != 1 && y_sign_ != -1) throw CertifyError("quotient ring: y sign must be +/-1");
}

QuotientRing::KElem QuotientRing::k_one() const {
    KElem e = k_zero();
    e[0] = 1;
    return e;
}

QuotientRing::KElem QuotientRing::k_reduce(const std::vector<Rational>& raw) const {
    const int deg = degree();
    std::vector<Rational> r = raw;
    Rational lead(minpoly_.lead());
    for (int k = static_cast<int>(r.size()) - 1; k >= deg; --k) {
        if (r[static_cast<size_t>(k)] == 0) continue;
        Rational q = r[static_cast<size_t>(k)] / lead;
        for (int i = 0; i <= deg; ++i)
            r[static_cast<size_t>(k - deg + i)] -= q * Rational(minpoly_.coeffs()[static_cast<size_t>(i)]);
    }
    r.resize(static_cast<size_t>(deg), Rational(0));
    while (static_cast<int>(r.size()) < deg) r.emplace_back(0);
    return r;
}

QuotientRing::KElem QuotientRing::k_from_poly(const MultiPoly& p) const {
    auto pv = p.present_vars();
    if (pv.size() > 1 || (pv.size() == 1 && pv[0] != "mu"))
        throw CertifyError("k_from_poly: expected a univariate polynomial in mu");
    std::vector<Rational> raw(p.degree("mu") + 1, Rational(0));
    for (const auto& [e, c] : p.terms()) raw[e.empty() ? 0 : e[0]] = c;
    return k_reduce(raw);
}

QuotientRing::KElem QuotientRing::k_add(const KElem& a, const KElem& b) const {
    KElem r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

QuotientRing::KElem QuotientRing::k_sub(const KElem& a, const KElem& b) const {
    KElem r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

QuotientRing::KElem QuotientRing::k_mul(const KElem& a, const KElem& b) const {
    const size_t n = a.size();
    std::vector<Rational> raw(2 * n - 1, Rational(0));
    for (size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < n; ++j) {
            if (b[j] == 0) continue;
            raw[i + j] += a[i] * b[j];
        }
    }
    return k_reduce(raw);
}

namespace {

bool k_is_zero(const QuotientRing::KElem& a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& q) { return q == 0; });
}

}  // namespace

QuotientRing::KElem QuotientRing::k_inverse(const KElem& a) const {
    if (k_is_zero(a)) throw CertifyError("k_inverse: division by zero");
    // extended euclid over Q[x] against the (irreducible) modulus
    std::vector<Rational> r0, r1 = a;
    for (const Integer& c : minpoly_.coeffs()) r0.emplace_back(c);
    auto trim = [](std::vector<Rational>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(r1);
    std::vector<Rational> s0{Rational(0)}, s1{Rational(1)};
    while (true) {
        if (r1.empty()) throw CertifyError("k_inverse: element shares a factor with the modulus");
        if (r1.size() == 1) {
            KElem out = k_zero();
            for (size_t i = 0; i < s1.size() && i < out.size(); ++i) out[i] = s1[i] / r1[0];
            return out;
        }
        // r0 = q*r1 + rem
        std::vector<Rational> rem = r0, q(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 1,
                                          Rational(0));
        while (rem.size() >= r1.size() && !rem.empty()) {
            Rational c = rem.back() / r1.back();
            size_t shift = rem.size() - r1.size();
            q[shift] = c;
            for (size_t i = 0; i < r1.size(); ++i) rem[i + shift] -= c * r1[i];
            trim(rem);
        }
        // s_new = s0 - q*s1
        std::vector<Rational> qs(q.size() + s1.size() - 1, Rational(0));
        for (size_t i = 0; i < q.size(); ++i) {
            if (q[i] == 0) continue;
            for (size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
        }
        std::vector<Rational> snew = s0;
        if (snew.size() < qs.size()) snew.resize(qs.size(), Rational(0));
        for (size_t i = 0; i < qs.size(); ++i) snew[i] -= qs[i];
        trim(snew);
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(snew);
    }
}

RingElem QuotientRing::x() const {
    RingElem e = zero();
    if (degree() < 2) throw CertifyError("ring: modulus degree too small for x");
    e.c0[1] = 1;
    return e;
}

RingElem QuotientRing::y() const {
    if (y_in_k_) return {*y_in_k_, k_zero()};
    RingElem e = zero();
    e.c1[0] = 1;
    return e;
}

void QuotientRing::adopt_y_in_base(KElem y_in_k) {
    if (!(k_mul(y_in_k, y_in_k) == rho_))
        throw CertifyError("adopt_y_in_base: candidate square root does not square to rho");
    y_in_k_ = std::move(y_in_k);
}

RingElem QuotientRing::add(const RingElem& a, const RingElem& b) const {
    return {k_add(a.c0, b.c0), k_add(a.c1, b.c1)};
}

RingElem QuotientRing::sub(const RingElem& a, const RingElem& b) const {
    return {k_sub(a.c0, b.c0), k_sub(a.c1, b.c1)};
}

RingElem QuotientRing::neg(const RingElem& a) const {
    RingElem r = a;
    for (Rational& q : r.c0) q = -q;
    for (Rational& q : r.c1) q = -q;
    return r;
}

RingElem QuotientRing::mul(const RingElem& a, const RingElem& b) const {
    // (a0 + a1 y)(b0 + b1 y) = a0 b0 + a1 b1 rho + (a0 b1 + a1 b0) y
    KElem t00 = k_mul(a.c0, b.c0);
    KElem t11 = k_mul(a.c1, b.c1);
    KElem c0 = k_add(t00, k_mul(t11, rho_));
    KElem c1 = k_add(k_mul(a.c0, b.c1), k_mul(a.c1, b.c0));
    return {std::move(c0), std::move(c1)};
}

RingElem QuotientRing::inverse(const RingElem& a) const {
    // conjugate norm: (c0 + c1 y)(c0 - c1 y) = c0^2 - c1^2 rho in K
    KElem norm = k_sub(k_mul(a.c0, a.c0), k_mul(k_mul(a.c1, a.c1), rho_));
    if (k_is_zero(norm)) throw CertifyError("ring inverse: zero divisor");
    KElem ninv = k_inverse(norm);
    RingElem conj{a.c0, a.c1};
    for (Rational& q : conj.c1) q = -q;
    return {k_mul(conj.c0, ninv), k_mul(conj.c1, ninv)};
}

RingElem QuotientRing::from_expr(const RationalExpr& e, const ConstraintStore& store) const {
    RingForm form = ring_normal_form(e, store);
    KElem den = k_from_poly(form.den);
    KElem dinv = k_inverse(den);
    RingElem odd = mul(y(), {k_mul(k_from_poly(form.c1), dinv), k_zero()});
    return add({k_mul(k_from_poly(form.c0), dinv), k_zero()}, odd);
}

RatInterval QuotientRing::x_box(unsigned digits) const {
    x_root_.refine_to(pow10_inv(digits));
    return RatInterval(x_root_.lo(), x_root_.hi());
}

RatInterval QuotientRing::y_box(unsigned digits) const {
    RatInterval xb = x_box(digits);
    // rho enclosure on the x box, then a signed square root
    Box box{{"mu", xb}};
    MultiPoly rho_poly;
    MultiPoly v = MultiPoly::variable("mu");
    for (size_t k = 0; k < rho_.size(); ++k)
        if (rho_[k] != 0) rho_poly += v.pow(static_cast<unsigned>(k)).scaled(rho_[k]);
    RatInterval renc = eval_poly_box(rho_poly, box);
    if (!(renc.lo > 0)) throw CertifyError("y_box: rho enclosure is not positive");
    RatInterval root = sqrt_interval(renc, digits);
    return y_sign_ < 0 ? -root : root;
}

RatInterval QuotientRing::embed(const RingElem& e, unsigned digits) const {
    RatInterval xb = x_box(digits);
    Box box{{"mu", xb}};
    auto poly_of = [](const KElem& k) {
        MultiPoly p;
        MultiPoly v = MultiPoly::variable("mu");
        for (size_t i = 0; i < k.size(); ++i)
            if (k[i] != 0) p += v.pow(static_cast<unsigned>(i)).scaled(k[i]);
        return p;
    };
    RatInterval part0 = eval_poly_box(poly_of(e.c0), box);
    if (k_is_zero(e.c1)) return part0;
    RatInterval part1 = eval_poly_box(poly_of(e.c1), box);
    return part0 + part1 * y_box(digits);
}

namespace {

// If rho is a square in the base field, express y there: the norm resultant
// T(t) = Res_mu(minpoly, t^2 - rho) factors over the integers, the factor
// owning the embedded root reduces to A + B*t modulo t^2 = rho, and the root
// is -A/B. Quietly keeps the formal extension when no square root exists.
void try_express_y_in_base(QuotientRing& ring) {
    MultiPoly p = ring.minpoly().to_multipoly("mu");
    MultiPoly rho_poly;
    {
        MultiPoly v = MultiPoly::variable("mu");
        for (size_t k = 0; k < ring.rho().size(); ++k)
            if (ring.rho()[k] != 0) rho_poly += v.pow(static_cast<unsigned>(k)).scaled(ring.rho()[k]);
    }
    MultiPoly t = MultiPoly::variable("t");
    MultiPoly norm_res;
    try {
        norm_res = resultant(p, t * t - rho_poly, "mu");
    } catch (const std::exception&) {
        return;
    }
    if (norm_res.degree("t") < 2) return;
    UniPoly tu;
    try {
        tu = UniPoly::from_multipoly(squarefree_part(norm_res, "t"), "t");
    } catch (const std::exception&) {
        return;
    }
    Factorization fac = factor_over_integers(tu);

    RatInterval yb = ring.y_box(20);
    for (const auto& [factor, mult] : fac.factors) {
        if (factor.degree() < 1) continue;
        int sl = factor.sign_at(yb.lo), sh = factor.sign_at(yb.hi);
        if (sl != 0 && sh != 0 && sl == sh) continue;  // embedded root not inside
        // reduce the factor modulo t^2 = rho over K
        QuotientRing::KElem A = ring.k_zero(), B = ring.k_zero();
        QuotientRing::KElem rpow = ring.k_one();
        for (int k = 0; k <= factor.degree(); ++k) {
            if (k >= 2 && k % 2 == 0) rpow = ring.k_mul(rpow, ring.rho());
            Rational c(factor.coeffs()[static_cast<size_t>(k)]);
            if (c == 0) continue;
            QuotientRing::KElem term = rpow;
            for (Rational& q : term) q *= c;
            if (k % 2 == 0)
                A = ring.k_add(A, term);
            else
                B = ring.k_add(B, term);
        }
        bool b_zero = std::all_of(B.begin(), B.end(), [](const Rational& q) { return q == 0; });
        if (b_zero) continue;
        QuotientRing::KElem s;
        try {
            QuotientRing::KElem negA = A;
            for (Rational& q : negA) q = -q;
            s = ring.k_mul(negA, ring.k_inverse(B));
        } catch (const CertifyError&) {
            continue;
        }
        if (!(ring.k_mul(s, s) == ring.rho())) continue;
        // orient toward the chosen embedding
        MultiPoly spoly;
        {
            MultiPoly v = MultiPoly::variable("mu");
            for (size_t k = 0; k < s.size(); ++k)
                if (s[k] != 0) spoly += v.pow(static_cast<unsigned>(k)).scaled(s[k]);
        }
        for (unsigned digits = 20; digits <= 80; digits += 20) {
            RatInterval enc = eval_poly_box(spoly, Box{{"mu", ring.x_box(digits)}});
            if (!enc.excludes_zero()) continue;
            bool s_negative = enc.hi < 0;
            if ((ring.y_sign() < 0) != s_negative)
                for (Rational& q : s) q = -q;
            ring.adopt_y_in_base(std::move(s));
            return;
        }
    }
}

}  // namespace

QuotientRing build_ring(const UniPoly& minpoly, const ConstraintStore& store,
                        const AlgebraicNumber& mu_root) {
    auto it = store.square_rhs.find("a8");
    if (it == store.square_rhs.end())
        throw CertifyError("build_ring: store lacks the square relation for a8");
    auto sg = store.sign_facts.find("a8");
    if (sg == store.sign_facts.end())
        throw CertifyError("build_ring: store lacks the sign fact for a8");

    // rho = num * den^-1 in K
    AlgebraicNumber root = mu_root;
    QuotientRing probe(minpoly, QuotientRing::KElem(static_cast<size_t>(minpoly.degree()), Rational(0)),
                       sg->second, root);
    QuotientRing::KElem num = probe.k_from_poly(it->second.num());
    QuotientRing::KElem den = probe.k_from_poly(it->second.den());
    QuotientRing::KElem rho = probe.k_mul(num, probe.k_inverse(den));

    QuotientRing ring(minpoly, rho, sg->second, root);
    // refine until rho is certifiably positive so a real y exists, and the
    // original denominator keeps away from zero
    MultiPoly den_poly = it->second.den();
    for (unsigned digits = 12;; digits += 12) {
        if (digits > 120) throw CertifyError("build_ring: rho enclosure does not settle");
        RatInterval xb = ring.x_box(digits);
        RatInterval denenc = eval_poly_box(den_poly, Box{{"mu", xb}});
        if (!denenc.excludes_zero()) continue;
        try {
            ring.y_box(digits);
            break;
        } catch (const CertifyError&) {
            continue;
        }
    }
    try_express_y_in_base(ring);
    return ring;
}

// ---------------------------------------------------------------------------

namespace {

RingElem det3_ring(const QuotientRing& ring, const std::array<std::array<RingElem, 3>, 3>& m) {
    RingElem acc = ring.zero();
    acc = ring.add(acc, ring.mul(m[0][0], ring.sub(ring.mul(m[1][1], m[2][2]), ring.mul(m[1][2], m[2][1]))));
    acc = ring.sub(acc, ring.mul(m[0][1], ring.sub(ring.mul(m[1][0], m[2][2]), ring.mul(m[1][2], m[2][0]))));
    acc = ring.add(acc, ring.mul(m[0][2], ring.sub(ring.mul(m[1][0], m[2][1]), ring.mul(m[1][1], m[2][0]))));
    return acc;
}

// 4x4 determinant of ring elements by cofactor expansion (division-free)
RingElem det4_ring(const QuotientRing& ring, const std::array<std::array<RingElem, 4>, 4>& m) {
    RingElem acc = ring.zero();
    for (int j = 0; j < 4; ++j) {
        std::array<std::array<RingElem, 3>, 3> sub;
        int t = 0;
        for (int c = 0; c < 4; ++c) {
            if (c == j) continue;
            for (int r = 1; r < 4; ++r)
                sub[static_cast<size_t>(r - 1)][static_cast<size_t>(t)] =
                    m[static_cast<size_t>(r)][static_cast<size_t>(c)];
            ++t;
        }
        RingElem term = ring.mul(m[0][static_cast<size_t>(j)], det3_ring(ring, sub));
        acc = (j % 2 == 0) ? ring.add(acc, term) : ring.sub(acc, term);
    }
    return acc;
}

// every 2x2 minor, memoized, so 4x4 determinants reduce to six products
// (Laplace along the first two rows)
class MinorSweeper {
public:
    MinorSweeper(const ExactGram& g, const QuotientRing& ring, int threads)
        : ring_(ring), n_(g.n) {
        std::vector<std::pair<int, int>> plist;
        for (int a = 0; a < n_; ++a)
            for (int b = a + 1; b < n_; ++b) plist.emplace_back(a, b);
        const size_t pairs = plist.size();
        det2_.assign(pairs, std::vector<RingElem>(pairs, ring.zero()));
        auto work = [&](size_t begin, size_t end) {
            for (size_t t = begin; t < end; ++t) {
                auto [r0, r1] = plist[t];
                for (auto [c0, c1] : plist) {
                    det2_[t][static_cast<size_t>(pair_index(c0, c1))] =
                        ring_.sub(ring_.mul(g.at(r0, c0), g.at(r1, c1)),
                                  ring_.mul(g.at(r0, c1), g.at(r1, c0)));
                }
            }
        };
        if (threads <= 1) {
            work(0, pairs);
        } else {
            std::vector<std::thread> pool;
            size_t chunk = (pairs + static_cast<size_t>(threads) - 1) / static_cast<size_t>(threads);
            for (int t = 0; t < threads; ++t) {
                size_t b = static_cast<size_t>(t) * chunk, e = std::min(pairs, b + chunk);
                if (b < e) pool.emplace_back(work, b, e);
            }
            for (auto& th : pool) th.join();
        }
    }

    // rows and cols 0-based, strictly increasing
    RingElem det4(const std::array<int, 4>& r, const std::array<int, 4>& c) const {
        static const int combos[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        static const int comp[6][2] = {{2, 3}, {1, 3}, {1, 2}, {0, 3}, {0, 2}, {0, 1}};
        RingElem acc = ring_.zero();
        int top = pair_index(r[0], r[1]);
        int bottom = pair_index(r[2], r[3]);
        for (int k = 0; k < 6; ++k) {
            int ca = combos[k][0], cb = combos[k][1];
            int da = comp[k][0], db = comp[k][1];
            RingElem term = ring_.mul(
                det2_[static_cast<size_t>(top)]
                     [static_cast<size_t>(pair_index(c[static_cast<size_t>(ca)], c[static_cast<size_t>(cb)]))],
                det2_[static_cast<size_t>(bottom)]
                     [static_cast<size_t>(pair_index(c[static_cast<size_t>(da)], c[static_cast<size_t>(db)]))]);
            acc = ((ca + cb) % 2 == 1) ? ring_.add(acc, term) : ring_.sub(acc, term);
        }
        return acc;
    }

private:
    int pair_index(int a, int b) const { return a * (2 * n_ - a - 1) / 2 + (b - a - 1); }

    const QuotientRing& ring_;
    int n_;
    std::vector<std::vector<RingElem>> det2_;
};

}  // namespace

ExactGram complete_tail_entries(const QuotientRing& ring, const ConstraintStore& store,
                                const SymbolicPattern& pattern, const WitnessValues& witness) {
    const int n = pattern.n;
    ExactGram g;
    g.n = n;
    g.entries.assign(static_cast<size_t>(n), std::vector<RingElem>(static_cast<size_t>(n), ring.zero()));

    std::vector<std::pair<int, int>> tails;  // unsolved free cells, i<j
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            RingElem e = ring.zero();
            switch (pattern.cell(i, j)) {
                case Cell::diagonal: e = ring.one(); break;
                case Cell::plus_mu: e = ring.x(); break;
                case Cell::minus_mu: e = ring.neg(ring.x()); break;
                case Cell::free_var: {
                    std::string v = pattern.free_name(i, j);
                    if (const RationalExpr* b = store.binding(v)) {
                        e = ring.from_expr(*b, store);
                    } else if (store.square_rhs.count(v)) {
                        e = ring.y();
                    } else {
                        if (i < j) tails.emplace_back(i, j);
                        e = ring.zero();  // placeholder
                    }
                    break;
                }
            }
            g.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
        }
    }

    std::set<std::pair<int, int>> tail_cells;
    for (auto [i, j] : tails) {
        tail_cells.insert({i, j});
        tail_cells.insert({j, i});
    }

    auto known = [&](int i, int j) { return !tail_cells.count({i, j}); };

    // each remaining entry comes from a bordered 4x4 minor that contains the
    // unknown exactly once, solved by one ring division
    for (auto [ti, tj] : tails) {
        bool done = false;
        std::vector<int> rpool, cpool;
        for (int r = 0; r < n; ++r)
            if (r != ti && r != tj && known(r, tj)) rpool.push_back(r);
        for (int c = 0; c < n; ++c)
            if (c != ti && c != tj && known(ti, c)) cpool.push_back(c);

        auto try_combo = [&](const std::array<int, 3>& rs, const std::array<int, 3>& cs) -> bool {
            for (int r : rs)
                for (int c : cs)
                    if (!known(r, c)) return false;
            // rows {ti, rs}, cols {tj, cs}; cell (ti, tj) is the unknown
            std::array<std::array<RingElem, 4>, 4> m0, m1;
            std::array<int, 4> rows{ti, rs[0], rs[1], rs[2]};
            std::array<int, 4> cols{tj, cs[0], cs[1], cs[2]};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    if (a == 0 && b == 0) continue;
                    RingElem e = g.at(rows[static_cast<size_t>(a)], cols[static_cast<size_t>(b)]);
                    m0[static_cast<size_t>(a)][static_cast<size_t>(b)] = e;
                    m1[static_cast<size_t>(a)][static_cast<size_t>(b)] = e;
                }
            m0[0][0] = ring.zero();
            m1[0][0] = ring.one();
            RingElem d0 = det4_ring(ring, m0);
            RingElem d1 = det4_ring(ring, m1);
            RingElem cof = ring.sub(d1, d0);  // determinant is linear in the unknown
            RingElem value;
            try {
                value = ring.mul(ring.neg(d0), ring.inverse(cof));
            } catch (const CertifyError&) {
                return false;  // cofactor not invertible; try another border
            }
            // witness check
            auto it = witness.find(pattern.free_name(ti, tj));
            if (it != witness.end()) {
                RatInterval enc = ring.embed(value, 30);
                Rational mid = enc.mid();
                if (rational_abs(mid - it->second) > pow10_inv(4)) return false;
            }
            g.entries[static_cast<size_t>(ti)][static_cast<size_t>(tj)] = value;
            g.entries[static_cast<size_t>(tj)][static_cast<size_t>(ti)] = value;
            return true;
        };

        for (size_t a = 0; a < rpool.size() && !done; ++a)
            for (size_t b = a + 1; b < rpool.size() && !done; ++b)
                for (size_t c = b + 1; c < rpool.size() && !done; ++c)
                    for (size_t d = 0; d < cpool.size() && !done; ++d)
                        for (size_t e2 = d + 1; e2 < cpool.size() && !done; ++e2)
                            for (size_t f = e2 + 1; f < cpool.size() && !done; ++f)
                                done = try_combo({rpool[a], rpool[b], rpool[c]},
                                                 {cpool[d], cpool[e2], cpool[f]});
        if (!done)
            throw CertifyError("complete_tail_entries: no bordered minor determines " +
                               pattern.free_name(ti, tj));
        tail_cells.erase({ti, tj});
        tail_cells.erase({tj, ti});
    }

    // every determining principal minor containing a recovered entry must
    // vanish in the ring
    for (auto [ti, tj] : tails) {
        for (int k = 0; k < n && k >= 0; ++k) {
            for (int l = k + 1; l < n; ++l) {
                if (k == ti || k == tj || l == ti || l == tj) continue;
                std::array<int, 4> idx{ti, tj, k, l};
                std::sort(idx.begin(), idx.end());
                std::array<std::array<RingElem, 4>, 4> m;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        m[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                            g.at(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
                if (!det4_ring(ring, m).is_zero())
                    throw CertifyError("complete_tail_entries: determining minor is not zero for " +
                                       pattern.free_name(ti, tj));
            }
        }
    }
    return g;
}

RankEvidence verify_rank3(const ExactGram& g, const QuotientRing& ring, int threads) {
    const int n = g.n;
    std::vector<std::array<int, 4>> subsets;
    {
        std::array<int, 4> pick{};
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == 4) {
                subsets.push_back(pick);
                return;
            }
            for (int v = start; v < n; ++v) {
                pick[static_cast<size_t>(depth)] = v;
                rec(v + 1, depth + 1);
            }
        };
        rec(0, 0);
    }

    RankEvidence ev;
    ev.vanishing.reserve(subsets.size() * subsets.size());

    MinorSweeper sweeper(g, ring, threads);

    std::vector<std::string> errors;
    std::mutex mtx;
    auto sweep = [&](size_t begin, size_t end) {
        for (size_t a = begin; a < end; ++a) {
            for (size_t b = 0; b < subsets.size(); ++b) {
                RingElem d = sweeper.det4(subsets[a], subsets[b]);
                if (!d.is_zero()) {
                    std::lock_guard<std::mutex> lock(mtx);
                    errors.push_back("minor rows {" + std::to_string(subsets[a][0] + 1) + ",..} cols {" +
                                     std::to_string(subsets[b][0] + 1) + ",..} is nonzero");
                    return;
                }
            }
        }
    };
    if (threads <= 1) {
        sweep(0, subsets.size());
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (subsets.size() + static_cast<size_t>(threads) - 1) / static_cast<size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            size_t b = static_cast<size_t>(t) * chunk, e = std::min(subsets.size(), b + chunk);
            if (b < e) pool.emplace_back(sweep, b, e);
        }
        for (auto& th : pool) th.join();
    }
    if (!errors.empty()) throw CertifyError("verify_rank3: " + errors.front());

    for (const auto& R : subsets)
        for (const auto& C : subsets) {
            Minor4Ref ref;
            for (int k = 0; k < 4; ++k) {
                ref.rows[static_cast<size_t>(k)] = R[static_cast<size_t>(k)] + 1;
                ref.cols[static_cast<size_t>(k)] = C[static_cast<size_t>(k)] + 1;
            }
            ev.vanishing.push_back(ref);
        }

    // one 3x3 minor with certified nonzero sign; principal triples first
    for (int i = 0; i < n && ev.nonzero_sign == 0; ++i)
        for (int j = i + 1; j < n && ev.nonzero_sign == 0; ++j)
            for (int k = j + 1; k < n && ev.nonzero_sign == 0; ++k) {
                std::array<std::array<RingElem, 3>, 3> m;
                std::array<int, 3> idx{i, j, k};
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        m[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                            g.at(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
                RingElem d = det3_ring(ring, m);
                for (unsigned digits = 20; digits <= 120; digits += 40) {
                    RatInterval enc = ring.embed(d, digits);
                    if (enc.excludes_zero()) {
                        ev.nonzero_rows = idx;
                        ev.nonzero_cols = idx;
                        for (auto& v : ev.nonzero_rows) ++v;
                        for (auto& v : ev.nonzero_cols) ++v;
                        ev.nonzero_sign = enc.lo > 0 ? 1 : -1;
                        break;
                    }
                }
            }
    if (ev.nonzero_sign == 0)
        throw CertifyError("verify_rank3: no 3x3 minor could be certified nonzero");
    return ev;
}

PsdEvidence verify_psd(const ExactGram& g, const QuotientRing& ring,
                       const SymbolicPattern& pattern, unsigned digits, const Rational& floor,
                       int threads) {
    (void)threads;
    const int n = g.n;
    PsdEvidence ev;
    ev.digits = digits;
    ev.floor = floor;

    // 1x1 minors: unit diagonal, exact
    for (int i = 0; i < n; ++i)
        if (!(g.at(i, i) == ring.one()))
            throw CertifyError("verify_psd: diagonal entry is not exactly one");

    // 2x2 principal minors must be strictly positive
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            RingElem d = ring.sub(ring.mul(g.at(i, i), g.at(j, j)), ring.mul(g.at(i, j), g.at(j, i)));
            RatInterval enc = ring.embed(d, digits);
            if (!(enc.lo > 0))
                throw CertifyError("verify_psd: 2x2 principal minor not certainly positive at {" +
                                   std::to_string(i + 1) + "," + std::to_string(j + 1) + "}");
            ev.principal2.push_back({{i + 1, j + 1}, enc.lo});
        }

    // 3x3 principal minors bounded below by the floor
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                std::array<std::array<RingElem, 3>, 3> m;
                std::array<int, 3> idx{i, j, k};
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        m[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                            g.at(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
                RingElem d = det3_ring(ring, m);
                RatInterval enc = ring.embed(d, digits);
                if (!(enc.lo >= floor))
                    throw CertifyError("verify_psd: 3x3 principal minor under the floor at {" +
                                       std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                       std::to_string(k + 1) + "}");
                ev.principal3.push_back({{i + 1, j + 1, k + 1}, enc.lo});
            }

    // |a_j| < mu strictly, via enclosures
    RatInterval xb = ring.x_box(digits);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (pattern.cell(i, j) != Cell::free_var) continue;
            RatInterval enc = ring.embed(g.at(i, j), digits);
            Rational mag = std::max(rational_abs(enc.lo), rational_abs(enc.hi));
            Rational gap = xb.lo - mag;
            if (!(gap > 0))
                throw CertifyError("verify_psd: entry bound |a| < mu failed at (" +
                                   std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            ev.entry_gaps.push_back({{i + 1, j + 1}, gap});
        }
    return ev;
}

// ---------------------------------------------------------------------------
// certificate serialization

namespace {

using nlohmann::json;

json kelem_to_json(const QuotientRing::KElem& k) {
    json arr = json::array();
    for (const Rational& q : k) arr.push_back(rational_to_string(q));
    return arr;
}

QuotientRing::KElem kelem_from_json(const json& arr) {
    QuotientRing::KElem k;
    for (const auto& s : arr) k.push_back(rational_from_string(s.get<std::string>()));
    return k;
}

std::string cell_name(const SymbolicPattern& pattern, int i, int j) {
    switch (pattern.cell(i, j)) {
        case Cell::diagonal: return "1";
        case Cell::plus_mu: return "+mu";
        case Cell::minus_mu: return "-mu";
        case Cell::free_var: return pattern.free_name(i, j);
    }
    return "?";
}

}  // namespace

Certificate build_certificate(const QuotientRing& ring, const ExactGram& gram,
                              const SymbolicPattern& pattern, const RankEvidence& rank,
                              const PsdEvidence& psd, const NumericGram& numeric) {
    Certificate c;
    c.minpoly = ring.minpoly();
    c.rho = ring.rho();
    c.y_sign = ring.y_sign();
    RatInterval xb = const_cast<QuotientRing&>(ring).x_box(40);
    c.x_lo = xb.lo;
    c.x_hi = xb.hi;
    c.n = gram.n;
    c.entries = gram.entries;
    c.pattern_cells.assign(static_cast<size_t>(pattern.n),
                           std::vector<std::string>(static_cast<size_t>(pattern.n)));
    for (int i = 0; i < pattern.n; ++i)
        for (int j = 0; j < pattern.n; ++j)
            c.pattern_cells[static_cast<size_t>(i)][static_cast<size_t>(j)] = cell_name(pattern, i, j);
    c.rank = rank;
    c.psd = psd;
    c.numeric = numeric.entries;

    Rational worst(0);
    for (int i = 0; i < gram.n; ++i)
        for (int j = 0; j < gram.n; ++j) {
            RatInterval enc = ring.embed(gram.at(i, j), 30);
            Rational diff = rational_abs(enc.mid() - Rational(numeric.at(i, j)));
            if (diff > worst) worst = diff;
        }
    c.numeric_residual = worst;
    return c;
}

std::string certificate_to_json(const Certificate& c) {
    json doc;
    doc["format"] = "exactpack-certificate-v1";
    json ring;
    json mp = json::array();
    for (const Integer& x : c.minpoly.coeffs()) mp.push_back(x.get_str());
    ring["minpoly"] = mp;
    ring["rho"] = kelem_to_json(c.rho);
    ring["y_sign"] = c.y_sign;
    ring["x_interval"] = {rational_to_string(c.x_lo), rational_to_string(c.x_hi)};
    doc["ring"] = ring;
    doc["n"] = c.n;
    json entries = json::array();
    for (const auto& row : c.entries)
        for (const auto& e : row) {
            json je;
            je["c0"] = kelem_to_json(e.c0);
            je["c1"] = kelem_to_json(e.c1);
            entries.push_back(je);
        }
    doc["entries"] = entries;
    doc["pattern"] = c.pattern_cells;

    json rank;
    json vanishing = json::array();
    for (const auto& m : c.rank.vanishing) {
        json jm = json::array();
        for (int r : m.rows) jm.push_back(r);
        for (int col : m.cols) jm.push_back(col);
        vanishing.push_back(jm);
    }
    rank["vanishing_minors"] = vanishing;
    rank["nonzero_minor"] = {{"rows", c.rank.nonzero_rows},
                             {"cols", c.rank.nonzero_cols},
                             {"sign", c.rank.nonzero_sign}};
    doc["rank_evidence"] = rank;

    json psd;
    psd["digits"] = c.psd.digits;
    psd["floor"] = rational_to_string(c.psd.floor);
    json p3 = json::array();
    for (const auto& [idx, lower] : c.psd.principal3)
        p3.push_back({{"idx", idx}, {"lower", rational_to_string(lower)}});
    psd["principal3"] = p3;
    json p2 = json::array();
    for (const auto& [idx, lower] : c.psd.principal2)
        p2.push_back({{"idx", idx}, {"lower", rational_to_string(lower)}});
    psd["principal2"] = p2;
    json gaps = json::array();
    for (const auto& [cell, gap] : c.psd.entry_gaps)
        gaps.push_back({{"cell", {cell.first, cell.second}}, {"gap", rational_to_string(gap)}});
    psd["entry_gaps"] = gaps;
    doc["psd_evidence"] = psd;

    json num = json::array();
    for (const auto& row : c.numeric)
        for (double v : row) num.push_back(rational_to_string(Rational(v)));  // exact dyadic
    doc["numeric_gram"] = num;
    doc["numeric_residual"] = rational_to_string(c.numeric_residual);
    return doc.dump(1) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("format") || doc["format"] != "exactpack-certificate-v1")
        throw CertifyError("certificate: unknown format");
    Certificate c;
    std::vector<Integer> mp;
    for (const auto& s : doc.at("ring").at("minpoly")) mp.emplace_back(s.get<std::string>(), 10);
    c.minpoly = UniPoly::from_coeffs(std::move(mp));
    c.rho = kelem_from_json(doc.at("ring").at("rho"));
    c.y_sign = doc.at("ring").at("y_sign").get<int>();
    c.x_lo = rational_from_string(doc.at("ring").at("x_interval")[0].get<std::string>());
    c.x_hi = rational_from_string(doc.at("ring").at("x_interval")[1].get<std::string>());
    c.n = doc.at("n").get<int>();
    const auto& entries = doc.at("entries");
    if (static_cast<int>(entries.size()) != c.n * c.n)
        throw CertifyError("certificate: wrong entry count");
    const size_t deg = static_cast<size_t>(c.minpoly.degree());
    if (c.rho.size() != deg) throw CertifyError("certificate: rho has the wrong length");
    c.entries.assign(static_cast<size_t>(c.n), std::vector<RingElem>(static_cast<size_t>(c.n)));
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j) {
            const auto& je = entries[static_cast<size_t>(i * c.n + j)];
            RingElem e{kelem_from_json(je.at("c0")), kelem_from_json(je.at("c1"))};
            if (e.c0.size() != deg || e.c1.size() != deg)
                throw CertifyError("certificate: entry coefficient vector has the wrong length");
            c.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::move(e);
        }
    c.pattern_cells = doc.at("pattern").get<std::vector<std::vector<std::string>>>();

    for (const auto& jm : doc.at("rank_evidence").at("vanishing_minors")) {
        Minor4Ref ref;
        for (int k = 0; k < 4; ++k) ref.rows[static_cast<size_t>(k)] = jm[static_cast<size_t>(k)].get<int>();
        for (int k = 0; k < 4; ++k)
            ref.cols[static_cast<size_t>(k)] = jm[static_cast<size_t>(k + 4)].get<int>();
        c.rank.vanishing.push_back(ref);
    }
    const auto& nz = doc.at("rank_evidence").at("nonzero_minor");
    for (int k = 0; k < 3; ++k) {
        c.rank.nonzero_rows[static_cast<size_t>(k)] = nz.at("rows")[static_cast<size_t>(k)].get<int>();
        c.rank.nonzero_cols[static_cast<size_t>(k)] = nz.at("cols")[static_cast<size_t>(k)].get<int>();
    }
    c.rank.nonzero_sign = nz.at("sign").get<int>();

    const auto& psd = doc.at("psd_evidence");
    c.psd.digits = psd.at("digits").get<unsigned>();
    c.psd.floor = rational_from_string(psd.at("floor").get<std::string>());
    for (const auto& e : psd.at("principal3")) {
        std::array<int, 3> idx{};
        for (int k = 0; k < 3; ++k) idx[static_cast<size_t>(k)] = e.at("idx")[static_cast<size_t>(k)].get<int>();
        c.psd.principal3.push_back({idx, rational_from_string(e.at("lower").get<std::string>())});
    }
    for (const auto& e : psd.at("principal2")) {
        std::array<int, 2> idx{};
        for (int k = 0; k < 2; ++k) idx[static_cast<size_t>(k)] = e.at("idx")[static_cast<size_t>(k)].get<int>();
        c.psd.principal2.push_back({idx, rational_from_string(e.at("lower").get<std::string>())});
    }
    for (const auto& e : psd.at("entry_gaps")) {
        c.psd.entry_gaps.push_back({{e.at("cell")[0].get<int>(), e.at("cell")[1].get<int>()},
                                    rational_from_string(e.at("gap").get<std::string>())});
    }

    const auto& num = doc.at("numeric_gram");
    if (static_cast<int>(num.size()) != c.n * c.n)
        throw CertifyError("certificate: wrong numeric entry count");
    c.numeric.assign(static_cast<size_t>(c.n), std::vector<double>(static_cast<size_t>(c.n)));
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j)
            c.numeric[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                to_double(rational_from_string(num[static_cast<size_t>(i * c.n + j)].get<std::string>()));
    c.numeric_residual = rational_from_string(doc.at("numeric_residual").get<std::string>());
    return c;
}

std::string emit_certificate(const Certificate& c) {
    std::string text = certificate_to_json(c);
    Certificate back = certificate_from_json(text);
    if (!(back.minpoly == c.minpoly) || back.entries != c.entries ||
        back.rank.vanishing.size() != c.rank.vanishing.size() ||
        rational_to_string(back.numeric_residual) != rational_to_string(c.numeric_residual))
        throw CertifyError("emit_certificate: serialization round trip mismatch");
    return text;
}

RecheckReport recheck_certificate(const std::string& json_text) {
    RecheckReport report;
    Certificate c;
    try {
        c = certificate_from_json(json_text);
    } catch (const std::exception& e) {
        report.failures.push_back(std::string("parse: ") + e.what());
        return report;
    }
    auto fail = [&](const std::string& what) { report.failures.push_back(what); };

    try {
        // ring sanity: irreducible modulus, isolating interval, positive rho
        Factorization fac = factor_over_integers(c.minpoly);
        if (fac.factors.size() != 1 || fac.factors[0].second != 1)
            fail("ring: modulus is not irreducible");
        if (sturm_count(c.minpoly, c.x_lo, c.x_hi) != 1)
            fail("ring: x interval does not isolate exactly one root");
        AlgebraicNumber root(c.minpoly, c.x_lo, c.x_hi);
        QuotientRing ring(c.minpoly, c.rho, c.y_sign, root);
        ring.y_box(20);  // throws when rho is not certified positive

        if (static_cast<int>(c.pattern_cells.size()) != c.n) fail("pattern: wrong size");

        // entries: symmetry, diagonal, contacts exactly +/-x
        for (int i = 0; i < c.n; ++i) {
            for (int j = 0; j < c.n; ++j) {
                const RingElem& e = c.entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (!(e == c.entries[static_cast<size_t>(j)][static_cast<size_t>(i)])) {
                    fail("entries: asymmetry at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
                    continue;
                }
                const std::string& kind = c.pattern_cells[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (kind == "1" && !(e == ring.one())) fail("entries: diagonal entry not one");
                if (kind == "+mu" && !(e == ring.x())) fail("entries: contact entry differs from +x");
                if (kind == "-mu" && !(e == ring.neg(ring.x()))) fail("entries: contact entry differs from -x");
            }
        }

        ExactGram g;
        g.n = c.n;
        g.entries = c.entries;

        // every listed 4x4 minor re-evaluates to ring zero, and the listing is
        // the complete enumeration
        MinorSweeper sweeper(g, ring, 1);
        std::set<std::array<int, 8>> seen;
        for (const auto& m : c.rank.vanishing) {
            bool shaped = true;
            for (int k = 0; k < 4; ++k) {
                if (m.rows[static_cast<size_t>(k)] < 1 || m.rows[static_cast<size_t>(k)] > c.n ||
                    m.cols[static_cast<size_t>(k)] < 1 || m.cols[static_cast<size_t>(k)] > c.n)
                    shaped = false;
                if (k > 0 && (m.rows[static_cast<size_t>(k)] <= m.rows[static_cast<size_t>(k - 1)] ||
                              m.cols[static_cast<size_t>(k)] <= m.cols[static_cast<size_t>(k - 1)]))
                    shaped = false;
            }
            if (!shaped) {
                fail("rank: malformed minor reference");
                break;
            }
            std::array<int, 4> rows{}, cols{};
            for (int k = 0; k < 4; ++k) {
                rows[static_cast<size_t>(k)] = m.rows[static_cast<size_t>(k)] - 1;
                cols[static_cast<size_t>(k)] = m.cols[static_cast<size_t>(k)] - 1;
            }
            if (!sweeper.det4(rows, cols).is_zero()) {
                fail("rank: minor is not zero");
                break;
            }
            std::array<int, 8> key{};
            for (int k = 0; k < 4; ++k) key[static_cast<size_t>(k)] = m.rows[static_cast<size_t>(k)];
            for (int k = 0; k < 4; ++k) key[static_cast<size_t>(k + 4)] = m.cols[static_cast<size_t>(k)];
            seen.insert(key);
        }
        size_t expected = 0;
        {
            size_t c4 = 1;
            for (int k = 0; k < 4; ++k) c4 = c4 * static_cast<size_t>(c.n - k) / static_cast<size_t>(k + 1);
            expected = c4 * c4;
        }
        if (seen.size() != expected)
            fail("rank: evidence is incomplete (" + std::to_string(seen.size()) + " of " +
                 std::to_string(expected) + " minors)");

        // the certified nonzero 3x3 minor
        {
            std::array<std::array<RingElem, 3>, 3> mm;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    mm[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                        g.at(c.rank.nonzero_rows[static_cast<size_t>(a)] - 1,
                             c.rank.nonzero_cols[static_cast<size_t>(b)] - 1);
            RingElem d = det3_ring(ring, mm);
            bool certified = false;
            for (unsigned digits = 20; digits <= 120; digits += 40) {
                RatInterval enc = ring.embed(d, digits);
                if (enc.excludes_zero()) {
                    int s = enc.lo > 0 ? 1 : -1;
                    if (s != c.rank.nonzero_sign)
                        fail("rank: 3x3 minor sign mismatch");
                    certified = true;
                    break;
                }
            }
            if (!certified) fail("rank: could not certify the 3x3 minor sign");
        }

        // PSD floors re-derived at the stated precision
        if (static_cast<int>(c.psd.principal3.size()) != c.n * (c.n - 1) * (c.n - 2) / 6)
            fail("psd: missing 3x3 principal minors");
        for (const auto& [idx, lower] : c.psd.principal3) {
            std::array<std::array<RingElem, 3>, 3> mm;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    mm[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                        g.at(idx[static_cast<size_t>(a)] - 1, idx[static_cast<size_t>(b)] - 1);
            RatInterval enc = ring.embed(det3_ring(ring, mm), c.psd.digits);
            if (!(enc.lo >= c.psd.floor)) {
                fail("psd: 3x3 principal minor fails the floor");
                break;
            }
        }
        for (const auto& [idx, lower] : c.psd.principal2) {
            RingElem d = ring.sub(ring.mul(g.at(idx[0] - 1, idx[0] - 1), g.at(idx[1] - 1, idx[1] - 1)),
                                  ring.mul(g.at(idx[0] - 1, idx[1] - 1), g.at(idx[1] - 1, idx[0] - 1)));
            RatInterval enc = ring.embed(d, c.psd.digits);
            if (!(enc.lo > 0)) {
                fail("psd: 2x2 principal minor not positive");
                break;
            }
        }
        // strict |a| < mu for free cells
        RatInterval xb = ring.x_box(c.psd.digits);
        for (int i = 0; i < c.n; ++i)
            for (int j = i + 1; j < c.n; ++j) {
                const std::string& kind = c.pattern_cells[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (kind == "1" || kind == "+mu" || kind == "-mu") continue;
                RatInterval enc = ring.embed(g.at(i, j), c.psd.digits);
                Rational mag = std::max(rational_abs(enc.lo), rational_abs(enc.hi));
                if (!(mag < xb.lo)) {
                    fail("bounds: |" + kind + "| < mu not certified");
                }
            }

        // numeric agreement
        Rational worst(0);
        for (int i = 0; i < c.n; ++i)
            for (int j = 0; j < c.n; ++j) {
                RatInterval enc = ring.embed(g.at(i, j), 30);
                Rational diff = rational_abs(enc.mid() - Rational(c.numeric[static_cast<size_t>(i)][static_cast<size_t>(j)]));
                if (diff > worst) worst = diff;
            }
        if (worst > c.numeric_residual + pow10_inv(9))
            fail("numeric: residual exceeds the recorded value");
    } catch (const std::exception& e) {
        fail(std::string("recheck: ") + e.what());
    }

    report.accepted = report.failures.empty();
    return report;
}

}  // namespace exactpack

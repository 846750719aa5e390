#include "exactpack/unipoly.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace exactpack {

UniPoly UniPoly::from_coeffs(std::vector<Integer> ascending) {
    while (!ascending.empty() && ascending.back() == 0) ascending.pop_back();
    UniPoly p;
    if (ascending.empty()) return p;
    Integer content(0);
    for (const Integer& c : ascending) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
    for (Integer& c : ascending) c /= content;
    p.c_ = std::move(ascending);
    return p;
}

UniPoly UniPoly::from_multipoly(const MultiPoly& f, const std::string& var) {
    MultiPoly g = f.compact();
    auto pv = g.present_vars();
    if (pv.size() > 1 || (pv.size() == 1 && pv[0] != var))
        throw std::invalid_argument("UniPoly::from_multipoly: not univariate in " + var);
    MultiPoly prim = g.is_zero() ? g : g.primitive_part();
    unsigned d = prim.degree(var);
    std::vector<Integer> c(g.is_zero() ? 0 : d + 1, Integer(0));
    for (const auto& [e, coeff] : prim.terms()) {
        unsigned k = e.empty() ? 0 : e[0];
        if (coeff.get_den() != 1)
            throw std::logic_error("UniPoly::from_multipoly: primitive part not integral");
        c[k] = coeff.get_num();
    }
    return from_coeffs(std::move(c));
}

Rational UniPoly::eval(const Rational& x) const {
    Rational acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + Rational(*it);
    return acc;
}

Integer UniPoly::eval_int(const Integer& x) const {
    Integer acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

int UniPoly::sign_at(const Rational& x) const {
    Rational v = eval(x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

UniPoly UniPoly::derivative() const {
    if (c_.size() <= 1) return UniPoly();
    std::vector<Integer> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * Integer(static_cast<long>(k));
    return from_coeffs(std::move(d));
}

UniPoly UniPoly::negate_variable() const {
    std::vector<Integer> d = c_;
    for (size_t k = 1; k < d.size(); k += 2) d[k] = -d[k];
    return from_coeffs(std::move(d));
}

MultiPoly UniPoly::to_multipoly(const std::string& var) const {
    MultiPoly r;
    MultiPoly v = MultiPoly::variable(var);
    for (size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0) continue;
        r += v.pow(static_cast<unsigned>(k)).scaled(Rational(c_[k]));
    }
    return r;
}

std::string UniPoly::to_string(const std::string& var) const {
    return to_multipoly(var).to_string();
}

// --- raw integer-vector helpers ---------------------------------------------

namespace {

using IVec = std::vector<Integer>;

void trim(IVec& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

IVec to_vec(const UniPoly& p) { return p.coeffs(); }

IVec ivec_pseudo_rem(IVec f, const IVec& g) {
    // lc(g)^(deg f - deg g + 1) * f mod g
    long df = static_cast<long>(f.size()) - 1, dg = static_cast<long>(g.size()) - 1;
    if (dg < 0) throw std::invalid_argument("pseudo_rem by zero");
    if (df < dg) return f;
    const Integer& lg = g.back();
    long mults = df - dg + 1;
    while (static_cast<long>(f.size()) - 1 >= dg && !f.empty()) {
        long dr = static_cast<long>(f.size()) - 1;
        Integer lf = f.back();
        for (Integer& coeff : f) coeff *= lg;
        for (long i = 0; i <= dg; ++i)
            f[static_cast<size_t>(i + dr - dg)] -= lf * g[static_cast<size_t>(i)];
        trim(f);
        --mults;
    }
    if (mults > 0) {
        Integer s;
        mpz_pow_ui(s.get_mpz_t(), lg.get_mpz_t(), static_cast<unsigned long>(mults));
        for (Integer& c : f) c *= s;
    }
    return f;
}

}  // namespace

namespace {

// modular gcd (Brown): gcd images modulo word-sized primes, recombined by CRT
// against the leading-coefficient gcd; keeps large-degree chains cheap
UniPoly modular_gcd(const UniPoly& a, const UniPoly& b) {
    auto mod_image = [](const UniPoly& p, long q) {
        std::vector<long> out(p.coeffs().size());
        for (size_t i = 0; i < out.size(); ++i) {
            Integer t = p.coeffs()[i] % q;
            long v = t.get_si();
            out[i] = ((v % q) + q) % q;
        }
        while (!out.empty() && out.back() == 0) out.pop_back();
        return out;
    };
    auto pinv = [](long x, long q) {
        long t = 0, nt = 1, r = q, nr = x % q;
        while (nr != 0) {
            long k = r / nr;
            std::swap(t -= k * nt, nt);
            std::swap(r -= k * nr, nr);
        }
        return ((t % q) + q) % q;
    };
    auto pgcd_mod = [&](std::vector<long> f, std::vector<long> g, long q) {
        while (!g.empty()) {
            // f mod g
            long inv = pinv(g.back(), q);
            while (f.size() >= g.size() && !f.empty()) {
                long c = static_cast<long>(static_cast<__int128>(f.back()) * inv % q);
                size_t shift = f.size() - g.size();
                for (size_t i = 0; i < g.size(); ++i) {
                    __int128 t = static_cast<__int128>(c) * g[i];
                    long v = static_cast<long>(((f[i + shift] - static_cast<long>(t % q)) % q + q) % q);
                    f[i + shift] = v;
                }
                while (!f.empty() && f.back() == 0) f.pop_back();
            }
            std::swap(f, g);
        }
        if (!f.empty()) {
            long inv = pinv(f.back(), q);
            for (long& c : f) c = static_cast<long>(static_cast<__int128>(c) * inv % q);
        }
        return f;
    };

    Integer lcg;
    mpz_gcd(lcg.get_mpz_t(), a.lead().get_mpz_t(), b.lead().get_mpz_t());

    Integer prime(1);
    mpz_ui_pow_ui(prime.get_mpz_t(), 2, 30);
    std::vector<Integer> acc;   // CRT accumulation of lcg * monic image
    Integer modulus(1);
    int agreed = -1;
    for (int rounds = 0; rounds < 512; ++rounds) {
        mpz_nextprime(prime.get_mpz_t(), prime.get_mpz_t());
        long q = prime.get_si();
        if (a.lead() % q == 0 || b.lead() % q == 0) continue;
        auto gq = pgcd_mod(mod_image(a, q), mod_image(b, q), q);
        if (gq.size() <= 1) return UniPoly::from_coeffs({Integer(1)});
        int deg = static_cast<int>(gq.size()) - 1;
        if (agreed < 0 || deg < agreed) {
            agreed = deg;
            modulus = 1;
            acc.assign(gq.size(), Integer(0));
        } else if (deg > agreed) {
            continue;  // unlucky prime
        }
        long lcq = 0;
        {
            Integer t = lcg % q;
            lcq = ((t.get_si() % q) + q) % q;
        }
        // CRT combine coefficient-wise with target lcg * gq
        Integer new_modulus = modulus * q;
        for (size_t i = 0; i < acc.size(); ++i) {
            long target = static_cast<long>(static_cast<__int128>(gq[i]) * lcq % q);
            Integer cur = acc[i] % q;
            long curq = ((cur.get_si() % q) + q) % q;
            long delta = ((target - curq) % q + q) % q;
            // acc += modulus * (delta * modulus^-1 mod q)
            Integer minv_i = modulus % q;
            long minv = pinv(((minv_i.get_si() % q) + q) % q, q);
            long corr = static_cast<long>(static_cast<__int128>(delta) * minv % q);
            acc[i] += modulus * corr;
        }
        modulus = new_modulus;
        // symmetric lift and divisibility test
        IVec cand(acc.size());
        for (size_t i = 0; i < acc.size(); ++i) {
            Integer t;
            mpz_mod(t.get_mpz_t(), acc[i].get_mpz_t(), modulus.get_mpz_t());
            if (t * 2 > modulus) t -= modulus;
            cand[i] = t;
        }
        UniPoly candidate = UniPoly::from_coeffs(std::move(cand));
        if (candidate.is_zero()) continue;
        if (candidate.lead() < 0) {
            IVec neg = candidate.coeffs();
            for (Integer& c : neg) c = -c;
            candidate = UniPoly::from_coeffs(std::move(neg));
        }
        if (unipoly_divides(candidate, a) && unipoly_divides(candidate, b)) return candidate;
    }
    throw std::runtime_error("modular_gcd: did not stabilize");
}

}  // namespace

UniPoly unipoly_gcd(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() && b.is_zero()) return UniPoly();
    if (a.is_zero() || b.is_zero()) {
        UniPoly d = a.is_zero() ? b : a;
        if (d.lead() < 0) {
            IVec neg = d.coeffs();
            for (Integer& c : neg) c = -c;
            d = UniPoly::from_coeffs(std::move(neg));
        }
        return d;
    }
    if (std::min(a.degree(), b.degree()) > 8) return modular_gcd(a, b);
    IVec f = to_vec(a), g = to_vec(b);
    if (f.size() < g.size()) std::swap(f, g);
    while (!g.empty()) {
        IVec r = ivec_pseudo_rem(f, g);
        f = std::move(g);
        g = std::move(r);
        if (!g.empty()) g = UniPoly::from_coeffs(std::move(g)).coeffs();  // keep primitive
    }
    UniPoly d = UniPoly::from_coeffs(std::move(f));
    if (d.lead() < 0) {
        IVec neg = d.coeffs();
        for (Integer& c : neg) c = -c;
        d = UniPoly::from_coeffs(std::move(neg));
    }
    return d;
}

bool unipoly_divides(const UniPoly& d, const UniPoly& p) {
    if (d.is_zero()) return p.is_zero();
    if (p.is_zero()) return true;
    if (p.degree() < d.degree()) return false;
    IVec r = to_vec(p);
    const IVec& g = d.coeffs();
    long dg = d.degree();
    while (static_cast<long>(r.size()) - 1 >= dg) {
        Integer q = r.back() / g.back();
        if (q * g.back() != r.back()) return false;
        long shift = static_cast<long>(r.size()) - 1 - dg;
        for (long i = 0; i <= dg; ++i) r[i + shift] -= q * g[i];
        trim(r);
        if (r.empty()) return true;
    }
    return r.empty();
}

UniPoly unipoly_squarefree_part(const UniPoly& p) {
    if (p.is_zero() || p.degree() <= 0) return p;
    UniPoly g = unipoly_gcd(p, p.derivative());
    if (g.degree() == 0) return p;
    // exact division p / g
    IVec r = to_vec(p), q(p.degree() - g.degree() + 1, Integer(0));
    const IVec& d = g.coeffs();
    long dg = g.degree();
    while (static_cast<long>(r.size()) - 1 >= dg) {
        long shift = static_cast<long>(r.size()) - 1 - dg;
        Integer qc = r.back() / d.back();
        q[shift] = qc;
        for (long i = 0; i <= dg; ++i) r[i + shift] -= qc * d[i];
        trim(r);
    }
    return UniPoly::from_coeffs(std::move(q));
}

Rational cauchy_root_bound(const UniPoly& p) {
    if (p.degree() < 1) return Rational(1);
    Rational m(0);
    Integer lead = p.lead();
    if (lead < 0) lead = -lead;
    for (int k = 0; k < p.degree(); ++k) {
        Integer a = p.coeffs()[static_cast<size_t>(k)];
        if (a < 0) a = -a;
        Rational r = make_rational(a, lead);
        if (r > m) m = r;
    }
    return m + 1;
}

SturmChain::SturmChain(const UniPoly& p) {
    if (p.is_zero()) throw std::invalid_argument("SturmChain: zero polynomial");
    std::vector<Rational> s0;
    for (const Integer& c : p.coeffs()) s0.emplace_back(c);
    chain_.push_back(s0);
    if (p.degree() >= 1) {
        std::vector<Rational> s1(p.degree());
        for (int k = 1; k <= p.degree(); ++k)
            s1[static_cast<size_t>(k - 1)] = Rational(p.coeffs()[static_cast<size_t>(k)]) * k;
        chain_.push_back(std::move(s1));
        while (chain_.back().size() > 0) {
            const auto& f = chain_[chain_.size() - 2];
            const auto& g = chain_.back();
            if (g.size() == 1) break;  // nonzero constant terminates the chain
            // r = -(f mod g)
            std::vector<Rational> r = f;
            while (r.size() >= g.size()) {
                Rational q = r.back() / g.back();
                size_t shift = r.size() - g.size();
                for (size_t i = 0; i < g.size(); ++i) r[i + shift] -= q * g[i];
                while (!r.empty() && r.back() == 0) r.pop_back();
            }
            for (Rational& c : r) c = -c;
            if (r.empty()) break;  // gcd reached (p not squarefree); chain ends
            chain_.push_back(std::move(r));
        }
    }
}

int SturmChain::sign_changes_at(const Rational& x) const {
    int changes = 0, prev = 0;
    for (const auto& poly : chain_) {
        Rational acc(0);
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
        int s = acc > 0 ? 1 : (acc < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

int SturmChain::count(const Rational& lo, const Rational& hi) const {
    return sign_changes_at(lo) - sign_changes_at(hi);
}

int sturm_count(const UniPoly& p, const Rational& lo, const Rational& hi) {
    if (!(lo < hi)) throw std::invalid_argument("sturm_count: need lo < hi");
    if (p.sign_at(lo) == 0 || p.sign_at(hi) == 0)
        throw std::domain_error("sturm_count: polynomial vanishes at an endpoint");
    SturmChain chain(p);
    return chain.count(lo, hi);
}

std::vector<std::pair<Rational, Rational>> isolate_real_roots(const UniPoly& p) {
    std::vector<std::pair<Rational, Rational>> out;
    if (p.degree() < 1) return out;
    SturmChain chain(p);
    Rational bound = cauchy_root_bound(p);

    struct Task {
        Rational lo, hi;
        int count;
    };
    std::deque<Task> queue;
    queue.push_back({-bound, bound, chain.count(-bound, bound)});
    while (!queue.empty()) {
        Task t = queue.front();
        queue.pop_front();
        if (t.count == 0) continue;
        if (t.count == 1) {
            out.emplace_back(t.lo, t.hi);
            continue;
        }
        Rational mid = (t.lo + t.hi) / 2;
        if (p.sign_at(mid) == 0) {
            // rational root exactly at the midpoint: carve out an isolating
            // interval around it, shrinking by halves on endpoint hits
            Rational delta = (t.hi - t.lo) / 4;
            while (true) {
                Rational a = mid - delta, b = mid + delta;
                if (p.sign_at(a) != 0 && p.sign_at(b) != 0 && chain.count(a, b) == 1) {
                    out.emplace_back(a, b);
                    queue.push_back({t.lo, a, chain.count(t.lo, a)});
                    queue.push_back({b, t.hi, chain.count(b, t.hi)});
                    break;
                }
                delta = delta / 2;
            }
            continue;
        }
        int left = chain.count(t.lo, mid);
        queue.push_back({t.lo, mid, left});
        queue.push_back({mid, t.hi, t.count - left});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

AlgebraicNumber::AlgebraicNumber(UniPoly minpoly, Rational lo, Rational hi)
    : p_(std::move(minpoly)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (!(lo_ < hi_)) throw std::invalid_argument("AlgebraicNumber: need lo < hi");
    int sl = p_.sign_at(lo_), sh = p_.sign_at(hi_);
    if (sl == 0 || sh == 0 || sl == sh)
        throw std::invalid_argument("AlgebraicNumber: endpoints must have opposite signs");
}

void AlgebraicNumber::refine_to(const Rational& width) {
    int sl = p_.sign_at(lo_);
    while (hi_ - lo_ > width) {
        Rational mid = (lo_ + hi_) / 2;
        int sm = p_.sign_at(mid);
        if (sm == 0) {
            // rational root: tighten symmetrically, keeping the sign change
            Rational a = (lo_ + mid) / 2, b = (mid + hi_) / 2;
            lo_ = a;
            hi_ = b;
            sl = p_.sign_at(lo_);
            continue;
        }
        if (sm == sl)
            lo_ = mid;
        else
            hi_ = mid;
    }
}

std::vector<AlgebraicNumber> AlgebraicNumber::real_roots(const UniPoly& p) {
    std::vector<AlgebraicNumber> out;
    for (auto& [lo, hi] : isolate_real_roots(p)) out.emplace_back(p, lo, hi);
    return out;
}

AlgebraicNumber AlgebraicNumber::largest_real_root(const UniPoly& p) {
    auto roots = real_roots(p);
    if (roots.empty()) throw std::domain_error("largest_real_root: no real roots");
    return roots.back();  // isolation output is sorted; intervals are disjoint
}

AlgebraicNumber refine_root(const AlgebraicNumber& a, const Rational& width) {
    AlgebraicNumber r = a;
    r.refine_to(width);
    return r;
}

}  // namespace exactpack

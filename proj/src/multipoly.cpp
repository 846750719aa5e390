#include "exactpack/multipoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace exactpack {

bool var_precedes(const std::string& a, const std::string& b) {
    auto rank = [](const std::string& v) -> std::pair<int, long> {
        if (v == "mu") return {0, 0};
        if (v.size() >= 2 && v[0] == 'a' &&
            std::all_of(v.begin() + 1, v.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return {1, std::stol(v.substr(1))};
        return {2, 0};
    };
    auto ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

MultiPoly::MultiPoly(const Rational& c) {
    if (c != 0) terms_.emplace(ExpVec{}, c);
}

MultiPoly MultiPoly::variable(const std::string& name) {
    MultiPoly p;
    p.vars_ = {name};
    p.terms_.emplace(ExpVec{1}, Rational(1));
    return p;
}

MultiPoly MultiPoly::monomial(const Rational& coeff, const std::vector<std::string>& vars,
                              const std::vector<unsigned>& exps) {
    if (vars.size() != exps.size()) throw std::invalid_argument("monomial: size mismatch");
    MultiPoly p(coeff);
    for (size_t i = 0; i < vars.size(); ++i) {
        if (exps[i] == 0) continue;
        MultiPoly v = MultiPoly::variable(vars[i]);
        for (unsigned k = 0; k < exps[i]; ++k) p = p * v;
    }
    return p;
}

bool MultiPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](unsigned x) { return x == 0; });
}

Rational MultiPoly::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::logic_error("constant_value on non-constant polynomial");
    return terms_.begin()->second;
}

unsigned MultiPoly::degree(const std::string& var) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end()) return 0;
    size_t idx = static_cast<size_t>(it - vars_.begin());
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[idx]);
    return d;
}

unsigned MultiPoly::total_degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
        unsigned t = 0;
        for (unsigned x : e) t += x;
        d = std::max(d, t);
    }
    return d;
}

std::vector<std::string> MultiPoly::present_vars() const {
    std::vector<std::string> out;
    for (size_t i = 0; i < vars_.size(); ++i) {
        for (const auto& [e, c] : terms_) {
            if (e[i] > 0) {
                out.push_back(vars_[i]);
                break;
            }
        }
    }
    return out;
}

MultiPoly MultiPoly::compact() const {
    std::vector<size_t> keep;
    for (size_t i = 0; i < vars_.size(); ++i) {
        for (const auto& [e, c] : terms_) {
            if (e[i] > 0) {
                keep.push_back(i);
                break;
            }
        }
    }
    if (keep.size() == vars_.size()) return *this;
    MultiPoly r;
    for (size_t i : keep) r.vars_.push_back(vars_[i]);
    for (const auto& [e, c] : terms_) {
        ExpVec ne(keep.size());
        for (size_t k = 0; k < keep.size(); ++k) ne[k] = e[keep[k]];
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

void MultiPoly::insert_term(const ExpVec& e, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

std::vector<std::string> MultiPoly::merge_vars(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b) {
    std::vector<std::string> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            out.push_back(a[i]);
            ++i, ++j;
        } else if (var_precedes(a[i], b[j])) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

MultiPoly MultiPoly::with_vars(const std::vector<std::string>& newvars) const {
    if (newvars == vars_) return *this;
    std::vector<size_t> pos(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(newvars.begin(), newvars.end(), vars_[i]);
        if (it == newvars.end()) throw std::logic_error("with_vars: not a superset");
        pos[i] = static_cast<size_t>(it - newvars.begin());
    }
    MultiPoly r;
    r.vars_ = newvars;
    for (const auto& [e, c] : terms_) {
        ExpVec ne(newvars.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) ne[pos[i]] = e[i];
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

void MultiPoly::align(MultiPoly& a, MultiPoly& b) {
    if (a.vars_ == b.vars_) return;
    auto merged = merge_vars(a.vars_, b.vars_);
    a = a.with_vars(merged);
    b = b.with_vars(merged);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(*this);
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (vars_ == o.vars_) {
        for (const auto& [e, c] : o.terms_) insert_term(e, c);
        return *this;
    }
    MultiPoly b = o;
    align(*this, b);
    for (const auto& [e, c] : b.terms_) insert_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero() || b.is_zero()) return MultiPoly();
    MultiPoly x = a, y = b;
    MultiPoly::align(x, y);
    MultiPoly r;
    r.vars_ = x.vars_;
    const size_t n = x.vars_.size();
    MultiPoly::ExpVec e(n);
    for (const auto& [ea, ca] : x.terms_) {
        for (const auto& [eb, cb] : y.terms_) {
            for (size_t i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
            r.insert_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly MultiPoly::scaled(const Rational& c) const {
    if (c == 0) return MultiPoly();
    MultiPoly r(*this);
    for (auto& [e, v] : r.terms_) v *= c;
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly r(Rational(1));
    MultiPoly base(*this);
    while (e) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    MultiPoly a = compact(), b = o.compact();
    if (a.vars_ != b.vars_) return false;
    return a.terms_ == b.terms_;
}

MultiPoly MultiPoly::coeff_of(const std::string& var, unsigned k) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end()) {
        if (k == 0) return *this;
        return MultiPoly();
    }
    size_t idx = static_cast<size_t>(it - vars_.begin());
    MultiPoly r;
    r.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
        if (e[idx] != k) continue;
        ExpVec ne = e;
        ne[idx] = 0;
        r.insert_term(ne, c);
    }
    return r.compact();
}

Rational MultiPoly::eval(const std::map<std::string, Rational>& point) const {
    std::vector<Rational> vals(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = point.find(vars_[i]);
        bool used = false;
        for (const auto& [e, c] : terms_)
            if (e[i] > 0) used = true;
        if (it == point.end()) {
            if (used) throw std::invalid_argument("eval: unbound variable " + vars_[i]);
            vals[i] = 0;
        } else {
            vals[i] = it->second;
        }
    }
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) t *= rational_pow(vals[i], e[i]);
        acc += t;
    }
    return acc;
}

MultiPoly MultiPoly::eval_partial(const std::map<std::string, Rational>& point) const {
    MultiPoly r;
    r.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        ExpVec ne = e;
        for (size_t i = 0; i < vars_.size(); ++i) {
            auto it = point.find(vars_[i]);
            if (it != point.end() && e[i] > 0) {
                t *= rational_pow(it->second, e[i]);
                ne[i] = 0;
            }
        }
        r.insert_term(ne, t);
    }
    return r.compact();
}

MultiPoly MultiPoly::derivative(const std::string& var) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end()) return MultiPoly();
    size_t idx = static_cast<size_t>(it - vars_.begin());
    MultiPoly r;
    r.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
        if (e[idx] == 0) continue;
        ExpVec ne = e;
        ne[idx] -= 1;
        r.insert_term(ne, c * Rational(static_cast<long>(e[idx])));
    }
    return r.compact();
}

namespace {
// graded-lex: higher total degree first, ties broken lexicographically
bool grlex_less(const MultiPoly::ExpVec& a, const MultiPoly::ExpVec& b) {
    unsigned ta = 0, tb = 0;
    for (unsigned x : a) ta += x;
    for (unsigned x : b) tb += x;
    if (ta != tb) return ta < tb;
    return a < b;
}
}  // namespace

std::pair<MultiPoly::ExpVec, Rational> MultiPoly::leading_term_grlex() const {
    if (terms_.empty()) throw std::logic_error("leading_term_grlex on zero polynomial");
    auto best = terms_.begin();
    for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
        if (grlex_less(best->first, it->first)) best = it;
    return {best->first, best->second};
}

Rational MultiPoly::rational_content() const {
    if (terms_.empty()) return Rational(0);
    Integer gnum(0), lden(1);
    for (const auto& [e, c] : terms_) {
        Integer num = c.get_num();
        mpz_gcd(gnum.get_mpz_t(), gnum.get_mpz_t(), num.get_mpz_t());
        Integer den = c.get_den();
        mpz_lcm(lden.get_mpz_t(), lden.get_mpz_t(), den.get_mpz_t());
    }
    Rational content = make_rational(gnum, lden);
    if (leading_term_grlex().second < 0) content = -content;
    return content;
}

MultiPoly MultiPoly::primitive_part() const {
    if (terms_.empty()) return *this;
    Rational c = rational_content();
    return scaled(Rational(1) / c);
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<const TermMap::value_type*> sorted;
    sorted.reserve(terms_.size());
    for (const auto& t : terms_) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return grlex_less(b->first, a->first); });
    std::ostringstream os;
    bool first = true;
    for (auto* t : sorted) {
        const Rational& c = t->second;
        Rational ac = rational_abs(c);
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        std::string mono;
        for (size_t i = 0; i < vars_.size(); ++i) {
            unsigned e = t->first[i];
            if (e == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += vars_[i];
            if (e > 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) {
            os << rational_to_string(ac);
        } else {
            if (ac != 1) os << rational_to_string(ac) << "*";
            os << mono;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

RationalExpr::RationalExpr(MultiPoly n) : num_(std::move(n)), den_(Rational(1)) { normalize(); }

RationalExpr::RationalExpr(MultiPoly n, MultiPoly d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw std::invalid_argument("RationalExpr: zero denominator");
    normalize();
}

void RationalExpr::normalize() {
    if (num_.is_zero()) {
        den_ = MultiPoly(Rational(1));
        return;
    }
    Rational cn = num_.rational_content();
    Rational cd = den_.rational_content();
    num_ = num_.primitive_part();
    den_ = den_.primitive_part();
    Rational s = cn / cd;  // fold scalar ratio into integer scalars on both sides
    num_ = num_.scaled(Rational(s.get_num()));
    den_ = den_.scaled(Rational(s.get_den()));
    num_ = num_.compact();
    den_ = den_.compact();
}

RationalExpr RationalExpr::operator-() const {
    RationalExpr r(*this);
    r.num_ = -r.num_;
    return r;
}

RationalExpr operator+(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalExpr operator-(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalExpr operator*(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.num_, a.den_ * b.den_);
}

RationalExpr operator/(const RationalExpr& a, const RationalExpr& b) {
    if (b.num_.is_zero()) throw std::invalid_argument("RationalExpr: division by zero");
    return RationalExpr(a.num_ * b.den_, a.den_ * b.num_);
}

bool RationalExpr::same_function(const RationalExpr& o) const {
    return (num_ * o.den_ - o.num_ * den_).is_zero();
}

Rational RationalExpr::eval(const std::map<std::string, Rational>& point) const {
    Rational d = den_.eval(point);
    if (d == 0) throw std::domain_error("RationalExpr::eval: denominator vanishes");
    return num_.eval(point) / d;
}

std::string RationalExpr::to_string() const {
    if (den_.is_constant() && den_.constant_value() == 1) return num_.to_string();
    return "(" + num_.to_string() + ") / (" + den_.to_string() + ")";
}

}  // namespace exactpack

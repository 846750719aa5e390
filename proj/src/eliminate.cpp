#include "exactpack/eliminate.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <set>

namespace exactpack {

bool ConstraintStore::is_solved(const std::string& var) const {
    return binding(var) != nullptr;
}

const RationalExpr* ConstraintStore::binding(const std::string& var) const {
    for (const auto& [v, e] : solved)
        if (v == var) return &e;
    return nullptr;
}

namespace {

constexpr const char* kMuUpper = "0.64759";
constexpr const char* kMuLower = "0.6";

Rational default_tol() { return pow10_inv(3); }

void for_each_4subset(const std::vector<int>& pool,
                      const std::function<void(const std::vector<int>&)>& fn) {
    const size_t n = pool.size();
    if (n < 4) return;
    std::vector<size_t> idx{0, 1, 2, 3};
    while (true) {
        fn({pool[idx[0]], pool[idx[1]], pool[idx[2]], pool[idx[3]]});
        long i = 3;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - 4 + static_cast<size_t>(i)) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (size_t j = static_cast<size_t>(i) + 1; j < 4; ++j) idx[j] = idx[j - 1] + 1;
    }
}

Rational abs_eval(const MultiPoly& f, const WitnessValues& w) {
    return rational_abs(f.eval(w));
}

}  // namespace

std::vector<MultiPoly> symbolic_minors(const SymbolicPattern& pattern,
                                       const std::vector<int>& rows,
                                       const std::vector<int>& cols) {
    for (int r : rows)
        if (r < 1 || r > pattern.n) throw std::invalid_argument("symbolic_minors: row out of range");
    for (int c : cols)
        if (c < 1 || c > pattern.n) throw std::invalid_argument("symbolic_minors: col out of range");
    if (rows.size() < 4 || cols.size() < 4)
        throw std::invalid_argument("symbolic_minors: need at least 4 rows and 4 columns");
    auto g = pattern_to_symbolic(pattern);
    std::vector<MultiPoly> out;
    for_each_4subset(rows, [&](const std::vector<int>& r4) {
        for_each_4subset(cols, [&](const std::vector<int>& c4) {
            std::vector<std::vector<MultiPoly>> m(4, std::vector<MultiPoly>(4));
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        g[static_cast<size_t>(r4[static_cast<size_t>(i)] - 1)]
                         [static_cast<size_t>(c4[static_cast<size_t>(j)] - 1)];
            out.push_back(det_fraction_free(m));
        });
    });
    return out;
}

MultiPoly reduce_with_store(const MultiPoly& f, const ConstraintStore& store,
                            const WitnessValues* witness) {
    MultiPoly cur = f;
    // substitute solved bindings to a fixed point
    while (true) {
        std::map<std::string, RationalExpr> live;
        for (const auto& [var, expr] : store.solved)
            if (cur.contains(var)) live.emplace(var, expr);
        if (live.empty()) break;
        RationalExpr sub = substitute(cur, live);
        if (witness) {
            Rational dv = abs_eval(sub.den(), *witness);
            if (dv < pow10_inv(9))
                throw std::domain_error("reduce_with_store: cleared denominator vanishes at the witness: " +
                                        sub.den().to_string());
        }
        cur = sub.num();
    }
    // reduce powers through square relations
    for (const auto& [var, rhs] : store.square_rhs) {
        while (cur.degree(var) >= 2) {
            unsigned d = cur.degree(var);
            MultiPoly hi, lo;
            MultiPoly v = MultiPoly::variable(var);
            for (unsigned k = 0; k <= d; ++k) {
                MultiPoly ck = cur.coeff_of(var, k);
                if (ck.is_zero()) continue;
                if (k >= 2)
                    hi += ck * v.pow(k - 2);
                else
                    lo += ck * v.pow(k);
            }
            cur = hi * rhs.num() + lo * rhs.den();
        }
    }
    if (cur.is_zero()) return cur;
    return cur.primitive_part().compact();
}

Rational witness_residual(const MultiPoly& f, const WitnessValues& w) {
    if (f.is_zero()) return Rational(0);
    Rational num(0), mag(0);
    const auto& vars = f.vars();
    std::vector<Rational> vals(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
        auto it = w.find(vars[i]);
        vals[i] = (it == w.end()) ? Rational(0) : it->second;
    }
    for (const auto& [e, c] : f.terms()) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t *= rational_pow(vals[i], e[i]);
        num += t;
        mag += rational_abs(t);
    }
    if (mag < 1) mag = 1;
    return rational_abs(num) / mag;
}

namespace {

// witness-centered certification boxes: mu spans its feasible interval, the
// other variables sit in small boxes around the witness; refinement shrinks
// everything toward the witness down to a 1e-4 half-width floor
Box certification_box(const std::vector<std::string>& vars, const WitnessValues& w,
                      const RatInterval& mu_interval) {
    Box box;
    Rational delta = pow10_inv(3);
    for (const auto& v : vars) {
        if (v == "mu") {
            box.emplace(v, mu_interval);
        } else {
            auto it = w.find(v);
            if (it == w.end()) throw std::invalid_argument("certification box: unbound " + v);
            box.emplace(v, RatInterval(it->second - delta, it->second + delta));
        }
    }
    return box;
}

std::function<Box(const Box&)> witness_refiner(const WitnessValues& w) {
    Rational floor = pow10_inv(4);
    return [w, floor](const Box& b) {
        Box next;
        for (const auto& [var, iv] : b) {
            auto it = w.find(var);
            if (it == w.end() || iv.width() <= floor * 2) {
                next.emplace(var, iv);
                continue;
            }
            Rational half = iv.width() / 4;
            if (half < floor) half = floor;
            Rational center = it->second;
            Rational lo = center - half, hi = center + half;
            if (lo < iv.lo) lo = iv.lo;
            if (hi > iv.hi) hi = iv.hi;
            if (!(lo < hi)) {
                next.emplace(var, iv);
                continue;
            }
            next.emplace(var, RatInterval(lo, hi));
        }
        return next;
    };
}

}  // namespace

RationalExpr solve_linear(const MultiPoly& f, const std::string& var,
                          const WitnessValues& witness, const RatInterval& mu_interval) {
    if (f.degree(var) != 1)
        throw std::invalid_argument("solve_linear: degree in " + var + " is not 1");
    MultiPoly coeff = f.coeff_of(var, 1);
    MultiPoly rest = f.coeff_of(var, 0);
    Box box = certification_box(coeff.present_vars(), witness, mu_interval);
    Sign s = certified_sign(coeff, box, witness_refiner(witness), 200);
    if (s == Sign::zero_unresolved)
        throw std::domain_error("solve_linear: coefficient sign unresolved for " + var + ": " +
                                coeff.to_string());
    RationalExpr expr(-rest, coeff);
    auto it = witness.find(var);
    if (it != witness.end()) {
        Rational predicted = expr.eval(witness);
        if (rational_abs(predicted - it->second) > default_tol())
            throw std::domain_error("solve_linear: binding for " + var +
                                    " disagrees with the witness");
    }
    return expr;
}

namespace {

std::optional<Box> theorem_region_box(const MultiPoly& f) {
    Box box;
    Rational up = rational_from_decimal(kMuUpper);
    Rational low = rational_from_decimal(kMuLower);
    for (const auto& v : f.present_vars()) {
        if (v == "mu")
            box.emplace(v, RatInterval(low, up));
        else if (v.size() >= 2 && v[0] == 'a' &&
                 std::all_of(v.begin() + 1, v.end(), [](char c) { return c >= '0' && c <= '9'; }))
            box.emplace(v, RatInterval(-up, up));
        else
            return std::nullopt;  // no region knowledge for foreign variables
    }
    return box;
}

std::vector<MultiPoly> factor_candidates(const MultiPoly& f0, const ConstraintStore* store) {
    MultiPoly f = f0.primitive_part().compact();
    std::vector<MultiPoly> work{f}, leaves;
    std::set<std::string> seen_work;
    seen_work.insert(f.to_string());
    while (!work.empty()) {
        MultiPoly g = work.back().primitive_part().compact();
        work.pop_back();
        if (g.is_constant()) continue;
        auto push_work = [&](const MultiPoly& h) {
            MultiPoly hh = h.primitive_part().compact();
            if (hh.is_constant()) return;
            if (seen_work.insert(hh.to_string()).second) work.push_back(hh);
        };

        // trial division by stored relations
        if (store) {
            bool split = false;
            for (const MultiPoly& rel : store->algebraic) {
                if (rel.total_degree() > g.total_degree()) continue;
                if (auto q = exact_divide(g, rel)) {
                    push_work(rel);
                    push_work(*q);
                    split = true;
                    break;
                }
            }
            if (split) continue;
        }

        auto pv = g.present_vars();

        // monomial content
        {
            bool split = false;
            for (const auto& v : pv) {
                unsigned minexp = ~0u;
                size_t vi = static_cast<size_t>(
                    std::find(g.vars().begin(), g.vars().end(), v) - g.vars().begin());
                for (const auto& [e, c] : g.terms()) minexp = std::min(minexp, e[vi]);
                if (minexp > 0) {
                    MultiPoly mono = MultiPoly::variable(v).pow(minexp);
                    push_work(MultiPoly::variable(v));
                    push_work(*exact_divide(g, mono));
                    split = true;
                    break;
                }
            }
            if (split) continue;
        }

        // univariate: integer factorization settles it
        if (pv.size() == 1) {
            UniPoly u = UniPoly::from_multipoly(g, pv[0]);
            Factorization fac = factor_over_integers(u);
            for (const auto& [factor, mult] : fac.factors)
                leaves.push_back(factor.to_multipoly(pv[0]));
            continue;
        }

        // content with respect to each variable
        {
            bool split = false;
            for (const auto& v : pv) {
                MultiPoly c = content_wrt(g, v);
                if (!c.is_constant()) {
                    push_work(c);
                    push_work(*exact_divide(g, c));
                    split = true;
                    break;
                }
            }
            if (split) continue;
        }

        // lowest-degree variable: linear is a leaf, quadratic may split over
        // a perfect-square discriminant
        std::string best;
        unsigned bestdeg = ~0u;
        for (const auto& v : pv) {
            unsigned d = g.degree(v);
            if (d > 0 && d < bestdeg) {
                bestdeg = d;
                best = v;
            }
        }
        if (bestdeg == 1) {
            leaves.push_back(g);
            continue;
        }
        if (bestdeg == 2) {
            MultiPoly a = g.coeff_of(best, 2), b = g.coeff_of(best, 1), cc = g.coeff_of(best, 0);
            MultiPoly disc = b * b - (a * cc).scaled(Rational(4));
            if (auto s = poly_sqrt(disc)) {
                MultiPoly v = MultiPoly::variable(best);
                MultiPoly lead2 = a.scaled(Rational(2));
                push_work(lead2 * v + b - *s);
                push_work(lead2 * v + b + *s);
                continue;
            }
        }
        leaves.push_back(g);
    }

    // keep only true divisors of f, deduped, canonical sign
    std::vector<MultiPoly> out;
    std::set<std::string> seen;
    for (const MultiPoly& leaf : leaves) {
        MultiPoly cand = leaf.primitive_part().compact();
        if (cand.is_constant()) continue;
        if (!exact_divide(f, cand)) continue;
        if (seen.insert(cand.to_string()).second) out.push_back(cand);
    }
    if (out.empty()) out.push_back(f);
    return out;
}

}  // namespace

MultiPoly select_vanishing_factor(const MultiPoly& f, const WitnessValues& witness,
                                  const Rational& tol, const ConstraintStore* store) {
    if (f.is_zero()) throw std::invalid_argument("select_vanishing_factor: zero polynomial");
    std::vector<MultiPoly> cands = factor_candidates(f, store);

    // drop factors that certifiably cannot vanish on the feasible region;
    // only meaningful when the witness itself lies inside that region
    std::vector<MultiPoly> viable;
    for (const MultiPoly& c : cands) {
        if (auto box = theorem_region_box(c)) {
            bool witness_inside = true;
            for (const auto& [var, iv] : *box) {
                auto it = witness.find(var);
                if (it == witness.end() || !iv.contains(it->second)) witness_inside = false;
            }
            if (witness_inside) {
                RatInterval enc = eval_poly_box(c, *box);
                if (enc.excludes_zero()) continue;
            }
        }
        viable.push_back(c);
    }

    std::vector<const MultiPoly*> vanishing;
    for (const MultiPoly& c : viable) {
        Rational val = abs_eval(c, witness);
        if (val <= tol) {
            vanishing.push_back(&c);
        } else if (val <= tol * 10) {
            throw std::domain_error(
                "select_vanishing_factor: factor in the ambiguity band, refine the witness: " +
                c.to_string());
        }
    }
    if (vanishing.size() != 1) {
        std::string msg = vanishing.empty()
                              ? "select_vanishing_factor: no factor vanishes at the witness"
                              : "select_vanishing_factor: multiple factors vanish at the witness";
        for (auto* c : vanishing) msg += " | " + c->to_string();
        throw std::domain_error(msg);
    }
    return *vanishing.front();
}

std::vector<MultiPoly> eliminate_var_resultant(const std::vector<MultiPoly>& polys,
                                               const std::string& var,
                                               const WitnessValues& witness) {
    std::vector<MultiPoly> active;
    for (const MultiPoly& p : polys)
        if (p.degree(var) >= 1) active.push_back(p);
    if (active.size() < 2)
        throw std::invalid_argument("eliminate_var_resultant: need two polynomials containing " +
                                    var);
    std::vector<MultiPoly> out;
    std::set<std::string> seen;
    bool any_nonzero = false;
    for (size_t i = 0; i < active.size(); ++i) {
        for (size_t j = i + 1; j < active.size(); ++j) {
            MultiPoly r = resultant(active[i], active[j], var);
            if (r.is_zero()) continue;
            any_nonzero = true;
            r = r.primitive_part().compact();
            auto pv = r.present_vars();
            if (pv.size() == 1) r = squarefree_part(r, pv[0]);
            if (r.is_constant()) continue;
            if (witness_residual(r, witness) > default_tol())
                throw std::domain_error("eliminate_var_resultant: resultant fails the witness: " +
                                        r.to_string());
            if (seen.insert(r.to_string()).second) out.push_back(r);
        }
    }
    if (!any_nonzero)
        throw std::domain_error(
            "eliminate_var_resultant: all resultants vanish identically (common factor)");
    return out;
}

// ---------------------------------------------------------------------------
// scripted execution

namespace {

struct StepContext {
    int step;
    std::vector<MultiPoly> raw_minors;
    std::vector<MultiPoly> reduced;  // nonzero, deduped, enumeration order

    void rebuild(const ConstraintStore& store, const WitnessValues& witness) {
        reduced.clear();
        std::set<std::string> seen;
        for (const MultiPoly& m : raw_minors) {
            MultiPoly r = reduce_with_store(m, store, &witness);
            if (r.is_zero()) continue;
            if (seen.insert(r.to_string()).second) reduced.push_back(r);
        }
        // deterministic scan order, simplest first; actions stop at the first
        // usable minor, so the cheap ones get tried before the monsters
        std::stable_sort(reduced.begin(), reduced.end(),
                         [](const MultiPoly& a, const MultiPoly& b) {
                             if (a.term_count() != b.term_count())
                                 return a.term_count() < b.term_count();
                             return a.to_string() < b.to_string();
                         });
    }
};

void check_store_invariants(int step, const ConstraintStore& store, const WitnessValues& witness) {
    for (const auto& [var, expr] : store.solved) {
        auto it = witness.find(var);
        if (it == witness.end()) continue;
        if (rational_abs(expr.eval(witness) - it->second) > default_tol())
            throw EliminationError(step, "binding for " + var + " drifted from the witness",
                                   expr.to_string());
    }
    for (const MultiPoly& rel : store.algebraic) {
        if (witness_residual(rel, witness) > default_tol())
            throw EliminationError(step, "algebraic relation fails at the witness",
                                   rel.to_string());
    }
}

void action_solve_linear(int step, const StepAction& act, StepContext& ctx,
                         ConstraintStore& store, const WitnessValues& witness) {
    const Rational tol = default_tol();
    size_t begin = act.minor_index >= 0 ? static_cast<size_t>(act.minor_index) : 0;
    size_t end = act.minor_index >= 0 ? begin + 1 : ctx.reduced.size();
    if (begin >= ctx.reduced.size())
        throw EliminationError(step, "pinned minor index out of range for " + act.target);
    std::string last_error = "no minor is linear in " + act.target;

    // minors are pre-sorted simplest-first; the first usable factor wins
    std::optional<RationalExpr> best;
    size_t best_terms = ~size_t(0);
    std::vector<MultiPoly> selected;
    std::set<std::string> seen;
    auto consider = [&](const MultiPoly& g) {
        if (g.degree(act.target) != 1 || g.term_count() >= best_terms) return;
        RationalExpr expr = solve_linear(g, act.target, witness, store.mu_bounds);
        best = expr;
        best_terms = g.term_count();
    };
    for (size_t k = begin; k < end && k < ctx.reduced.size(); ++k) {
        if (best) break;
        const MultiPoly& m = ctx.reduced[k];
        if (!m.contains(act.target)) continue;
        try {
            MultiPoly g = select_vanishing_factor(m, witness, tol, &store);
            if (g.contains(act.target) && seen.insert(g.to_string()).second)
                selected.push_back(g);
            consider(g);
        } catch (const std::domain_error& e) {
            last_error = e.what();
            continue;
        }
    }

    if (!best) {
        // no single factor is linear in the target; combine pairs of the
        // vanishing factors through pseudo-remainders to drop the degree
        std::sort(selected.begin(), selected.end(), [](const MultiPoly& a, const MultiPoly& b) {
            if (a.term_count() != b.term_count()) return a.term_count() < b.term_count();
            return a.to_string() < b.to_string();
        });
        if (selected.size() > 10) selected.resize(10);
        for (size_t i = 0; i < selected.size() && !best; ++i) {
            for (size_t j = i + 1; j < selected.size() && !best; ++j) {
                const MultiPoly& f = selected[i];
                const MultiPoly& g = selected[j];
                MultiPoly r = f.degree(act.target) >= g.degree(act.target)
                                  ? pseudo_rem(f, g, act.target)
                                  : pseudo_rem(g, f, act.target);
                r = reduce_with_store(r, store, &witness);
                if (r.is_zero() || !r.contains(act.target)) continue;
                try {
                    MultiPoly h = select_vanishing_factor(r, witness, tol, &store);
                    consider(h);
                } catch (const std::domain_error& e) {
                    last_error = e.what();
                }
            }
        }
        // quadratics can also split over the quotient ring: test candidate
        // linear divisors target -> +/- v by substitute-and-reduce, which is
        // exact divisibility for a monic-in-target linear divisor
        auto tw = witness.find(act.target);
        for (const MultiPoly& q : selected) {
            if (best || q.degree(act.target) != 2) continue;
            std::vector<std::string> others{"mu"};
            for (const auto& v : q.present_vars())
                if (v != act.target && v != "mu") others.push_back(v);
            for (const std::string& v : others) {
                for (int s : {1, -1}) {
                    MultiPoly root = MultiPoly::variable(v).scaled(Rational(s));
                    std::map<std::string, RationalExpr> sub{
                        {act.target, RationalExpr(root)}};
                    MultiPoly rem = substitute(q, sub).num();
                    if (!reduce_with_store(rem, store, &witness).is_zero()) continue;
                    // candidate branch: target = s*v; check the witness picks
                    // it and the conjugate branch stays far away
                    if (tw == witness.end()) continue;
                    auto vw = witness.find(v);
                    if (vw == witness.end()) continue;
                    Rational branch = vw->second * s;
                    if (rational_abs(branch - tw->second) > tol) continue;
                    // other root from the coefficient sum: A t^2 + B t + C =
                    // A (t - r1)(t - r2) -> r2 = -B/A - r1
                    MultiPoly a = q.coeff_of(act.target, 2), b = q.coeff_of(act.target, 1);
                    Rational aw = a.eval(witness);
                    if (aw == 0) continue;
                    Rational other = -b.eval(witness) / aw - branch;
                    if (rational_abs(other - tw->second) <= tol * 10) continue;
                    best = RationalExpr(root);
                    break;
                }
                if (best) break;
            }
        }
    }

    if (!best)
        throw EliminationError(step, "solve_linear(" + act.target + ") found no usable minor: " +
                                         last_error);
    store.solved.emplace_back(act.target, *best);
    ctx.rebuild(store, witness);
}

void record_square_relation(const StepAction& act, StepContext& ctx, ConstraintStore& store,
                            const WitnessValues& witness, const MultiPoly& quad) {
    const Rational tol = default_tol();
    MultiPoly a = quad.coeff_of(act.target, 2);
    MultiPoly c = quad.coeff_of(act.target, 0);
    Box box = certification_box(a.present_vars(), witness, store.mu_bounds);
    if (certified_sign(a, box, witness_refiner(witness), 200) == Sign::zero_unresolved)
        throw std::domain_error("square coefficient sign unresolved");
    RationalExpr rhs(-c, a);
    auto itw = witness.find(act.target);
    if (itw != witness.end()) {
        Rational predicted = rhs.eval(witness);
        if (rational_abs(predicted - itw->second * itw->second) > tol)
            throw std::domain_error("square relation disagrees with the witness");
    }
    store.square_rhs.emplace(act.target, rhs);
    store.algebraic.push_back(quad.primitive_part());
    ctx.rebuild(store, witness);
}

void action_solve_square(int step, const StepAction& act, StepContext& ctx,
                         ConstraintStore& store, const WitnessValues& witness) {
    const Rational tol = default_tol();
    std::string last_error = "no minor yields a pure square relation in " + act.target;
    for (const MultiPoly& m : ctx.reduced) {
        if (m.degree(act.target) < 2) continue;
        try {
            MultiPoly g = select_vanishing_factor(m, witness, tol, &store);
            if (g.degree(act.target) != 2) continue;
            if (!g.coeff_of(act.target, 1).is_zero()) continue;
            record_square_relation(act, ctx, store, witness, g);
            return;
        } catch (const std::domain_error& e) {
            last_error = e.what();
            continue;
        }
    }
    // the +/- branches may have factored apart; look for a conjugate pair of
    // linear factors and record their product as the square relation
    for (const MultiPoly& m : ctx.reduced) {
        if (m.degree(act.target) < 2) continue;
        std::vector<MultiPoly> cands = factor_candidates(m, &store);
        for (size_t i = 0; i < cands.size(); ++i) {
            if (cands[i].degree(act.target) != 1) continue;
            MultiPoly a1 = cands[i].coeff_of(act.target, 1);
            MultiPoly b1 = cands[i].coeff_of(act.target, 0);
            for (size_t j = 0; j < cands.size(); ++j) {
                if (j == i || cands[j].degree(act.target) != 1) continue;
                MultiPoly a2 = cands[j].coeff_of(act.target, 1);
                MultiPoly b2 = cands[j].coeff_of(act.target, 0);
                if (!(a1 * b2 + a2 * b1).is_zero()) continue;  // not sign-conjugate
                MultiPoly quad = (cands[i] * cands[j]).primitive_part();
                try {
                    record_square_relation(act, ctx, store, witness, quad);
                    return;
                } catch (const std::domain_error& e) {
                    last_error = e.what();
                }
            }
        }
    }
    throw EliminationError(step, "solve_square(" + act.target + ") found no usable minor: " +
                                     last_error);
}

void action_sign_from_witness(int step, const StepAction& act, ConstraintStore& store,
                              const WitnessValues& witness) {
    auto it = witness.find(act.target);
    if (it == witness.end())
        throw EliminationError(step, "sign_from_witness: no witness value for " + act.target);
    Rational margin = default_tol() * 10;
    if (rational_abs(it->second) <= margin)
        throw EliminationError(step, "sign_from_witness: witness value of " + act.target +
                                         " is too close to zero to pick a branch");
    store.sign_facts[act.target] = it->second > 0 ? 1 : -1;
}

// sign-safe reduction of even powers of `var` through var^2 = num/den:
// multiplies the rest by den (positive on the feasible region), never
// renormalizes, so the sign of the value is preserved there
MultiPoly square_reduce_signed(MultiPoly f, const std::string& var, const MultiPoly& num,
                               const MultiPoly& den) {
    while (f.degree(var) >= 2) {
        unsigned d = f.degree(var);
        MultiPoly v = MultiPoly::variable(var);
        MultiPoly hi, lo;
        for (unsigned k = 0; k <= d; ++k) {
            MultiPoly ck = f.coeff_of(var, k);
            if (ck.is_zero()) continue;
            if (k >= 2)
                hi += ck * v.pow(k - 2);
            else
                lo += ck * v.pow(k);
        }
        f = hi * num + lo * den;
    }
    return f;
}

// Records the mu lower bound as the largest projection-boundary point below
// the witness: the target quadratic's discriminant, pushed through the square
// relation, yields the branch-product polynomial whose roots are the only
// places a solution branch can appear or vanish. The root is stored exactly
// (its irreducible factor) plus a certified rational just below it. Deciding
// infeasibility of whole cells below the boundary is full CAD territory and
// deliberately out of scope; the witness side is checked instead.
void action_mu_lower_bound(int step, const StepAction& act, StepContext& ctx,
                           ConstraintStore& store, const WitnessValues& witness) {
    const Rational tol = default_tol();
    Rational wmu = witness.at("mu");
    std::string last_error = "no quadratic in " + act.target + " yields a usable discriminant";

    if (store.square_rhs.empty())
        throw EliminationError(step, "mu_lower_bound needs a square relation in the store");
    const auto& [yvar, yrhs] = *store.square_rhs.begin();

    for (const MultiPoly& m : ctx.reduced) {
        if (m.degree(act.target) < 2) continue;
        try {
            MultiPoly g = select_vanishing_factor(m, witness, tol, &store);
            if (g.degree(act.target) != 2) continue;
            MultiPoly a = g.coeff_of(act.target, 2), b = g.coeff_of(act.target, 1),
                      c = g.coeff_of(act.target, 0);
            // discriminant of the quadratic over the branch variable
            MultiPoly disc = b * b - (a * c).scaled(Rational(4));
            for (const auto& v : disc.present_vars())
                if (v != "mu" && v != yvar) throw std::domain_error("discriminant keeps " + v);
            disc = square_reduce_signed(disc, yvar, yrhs.num(), yrhs.den());
            if (disc.eval(witness) < 0) continue;  // witness must sit on the feasible side
            MultiPoly d0 = disc.coeff_of(yvar, 0), d1 = disc.coeff_of(yvar, 1);
            // branch product d0^2 - (num/den) d1^2 vanishes exactly where one
            // of the two disc branches does
            MultiPoly boundary = d0 * d0 * yrhs.den() - d1 * d1 * yrhs.num();
            auto pv = boundary.present_vars();
            if (pv.size() != 1 || pv[0] != "mu") continue;
            UniPoly bpoly = UniPoly::from_multipoly(squarefree_part(boundary, "mu"), "mu");
            std::optional<AlgebraicNumber> bound;
            for (auto& r : AlgebraicNumber::real_roots(bpoly)) {
                AlgebraicNumber rr = refine_root(r, pow10_inv(9));
                if (rr.hi() < wmu && rr.lo() > store.mu_bounds.lo &&
                    (!bound || rr.lo() > bound->lo()))
                    bound = rr;
            }
            if (!bound) continue;
            store.mu_bounds = RatInterval(bound->lo(), store.mu_bounds.hi);
            // record the exact algebraic location of the boundary root
            Factorization fac = factor_over_integers(bpoly);
            for (const auto& [factor, mult] : fac.factors) {
                if (factor.degree() < 1) continue;
                int sl = factor.sign_at(bound->lo()), sh = factor.sign_at(bound->hi());
                if (sl == 0 || sh == 0 || sl != sh) store.mu_bound_poly = factor;
            }
            return;
        } catch (const std::domain_error& e) {
            last_error = e.what();
            continue;
        }
    }
    throw EliminationError(step, "mu_lower_bound failed: " + last_error);
}

struct MuConstraint {
    UniPoly minpoly;
    AlgebraicNumber root;
};

MuConstraint select_mu_constraint(int step, const std::vector<MultiPoly>& univariate,
                                  const WitnessValues& witness) {
    const Rational tol = default_tol();
    Rational wmu = witness.at("mu");
    std::optional<UniPoly> chosen;
    for (const MultiPoly& p : univariate) {
        WitnessValues muw{{"mu", wmu}};
        MultiPoly g = select_vanishing_factor(p, muw, tol, nullptr);
        UniPoly u = UniPoly::from_multipoly(g, "mu");
        if (u.lead() < 0) {
            std::vector<Integer> neg = u.coeffs();
            for (Integer& x : neg) x = -x;
            u = UniPoly::from_coeffs(std::move(neg));
        }
        if (chosen && !(*chosen == u))
            throw EliminationError(step, "conflicting mu constraints: " + chosen->to_string() +
                                             " vs " + u.to_string());
        chosen = u;
    }
    if (!chosen) throw EliminationError(step, "no univariate mu constraint produced");
    // the witness-selected factor is irreducible by construction (it came out
    // of factor_over_integers); take its largest real root
    AlgebraicNumber root = AlgebraicNumber::largest_real_root(*chosen);
    AlgebraicNumber fine = refine_root(root, pow10_inv(7));
    if (!(fine.lo() - pow10_inv(4) <= wmu && wmu <= fine.hi() + pow10_inv(4)))
        throw EliminationError(step, "largest root of the mu constraint misses the witness",
                               chosen->to_string());
    return {*chosen, fine};
}

MuConstraint action_eliminate_to_mu(int step, const StepAction& act, StepContext& ctx,
                                    ConstraintStore& store, const WitnessValues& witness) {
    // current pool: reduced minors plus the square relations (already reduced)
    std::vector<MultiPoly> pool = ctx.reduced;
    for (const MultiPoly& rel : store.algebraic) pool.push_back(rel);

    auto is_univariate_mu = [](const MultiPoly& p) {
        auto pv = p.present_vars();
        return pv.size() == 1 && pv[0] == "mu";
    };

    for (const std::string& var : act.eliminate) {
        // carry polynomials free of var, eliminate var from the rest
        std::vector<MultiPoly> next, with_var;
        for (const MultiPoly& p : pool) {
            if (p.degree(var) >= 1)
                with_var.push_back(p);
            else
                next.push_back(p);
        }
        if (with_var.size() >= 2) {
            // keep the pairing budget modest: simplest polynomials first
            std::sort(with_var.begin(), with_var.end(), [](const MultiPoly& a, const MultiPoly& b) {
                if (a.term_count() != b.term_count()) return a.term_count() < b.term_count();
                return a.to_string() < b.to_string();
            });
            if (with_var.size() > 6) with_var.resize(6);
            auto res = eliminate_var_resultant(with_var, var, witness);
            for (MultiPoly& r : res) next.push_back(std::move(r));
        }
        std::set<std::string> seen;
        pool.clear();
        for (const MultiPoly& p : next) {
            if (p.is_constant()) continue;
            if (seen.insert(p.to_string()).second) pool.push_back(p);
        }
    }

    std::vector<MultiPoly> univariate;
    for (const MultiPoly& p : pool)
        if (is_univariate_mu(p)) univariate.push_back(p);
    if (univariate.empty())
        throw EliminationError(step, "elimination finished without a univariate mu constraint");
    return select_mu_constraint(step, univariate, witness);
}

}  // namespace

namespace {
bool debug_enabled() {
    static bool on = std::getenv("EXACTPACK_DEBUG") != nullptr;
    return on;
}
void debug_log(const std::string& msg) {
    if (debug_enabled()) std::fprintf(stderr, "[eliminate] %s\n", msg.c_str());
}
}  // namespace

ScriptResult run_script(const std::vector<StepSpec>& script, const SymbolicPattern& pattern,
                        const WitnessValues& witness) {
    // witness must bind mu and every pattern variable, with mu in the window
    if (!witness.count("mu")) throw std::invalid_argument("run_script: witness lacks mu");
    for (int k = 1; k <= pattern.free_count; ++k)
        if (!witness.count("a" + std::to_string(k)))
            throw std::invalid_argument("run_script: witness lacks a" + std::to_string(k));
    Rational wmu = witness.at("mu");
    Rational lo = rational_from_decimal(kMuLower), hi = rational_from_decimal(kMuUpper);
    if (wmu < lo - default_tol() || wmu > hi + default_tol())
        throw std::invalid_argument("run_script: witness mu outside the feasible window");

    ConstraintStore store;
    store.mu_bounds = RatInterval(lo, hi);
    std::optional<MuConstraint> mu;

    for (const StepSpec& spec : script) {
        for (const std::string& v : spec.var_order)
            if (v != "mu" && !witness.count(v))
                throw EliminationError(spec.step, "script references unknown variable " + v);
        try {
            auto t0 = std::chrono::steady_clock::now();
            auto since = [&t0]() {
                auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
                return std::to_string(ms) + "ms";
            };
            debug_log("step " + std::to_string(spec.step) + " begin");
            StepContext ctx;
            ctx.step = spec.step;
            ctx.raw_minors = symbolic_minors(pattern, spec.rows, spec.cols);
            ctx.rebuild(store, witness);
            debug_log("step " + std::to_string(spec.step) + ": " +
                      std::to_string(ctx.reduced.size()) + " reduced minors @" + since());
            for (const StepAction& act : spec.actions) {
                debug_log("  action " + act.target + (act.eliminate.empty() ? "" : " eliminate") +
                          " @" + since());
                switch (act.kind) {
                    case StepAction::Kind::solve_linear:
                        action_solve_linear(spec.step, act, ctx, store, witness);
                        break;
                    case StepAction::Kind::solve_square:
                        action_solve_square(spec.step, act, ctx, store, witness);
                        break;
                    case StepAction::Kind::sign_from_witness:
                        action_sign_from_witness(spec.step, act, store, witness);
                        break;
                    case StepAction::Kind::mu_lower_bound:
                        action_mu_lower_bound(spec.step, act, ctx, store, witness);
                        break;
                    case StepAction::Kind::eliminate_to_mu:
                        mu = action_eliminate_to_mu(spec.step, act, ctx, store, witness);
                        break;
                }
            }
            debug_log("step " + std::to_string(spec.step) + " done @" + since());
        } catch (const EliminationError&) {
            throw;
        } catch (const std::exception& e) {
            throw EliminationError(spec.step, e.what());
        }
        check_store_invariants(spec.step, store, witness);
    }
    if (!mu) throw EliminationError(script.empty() ? 0 : script.back().step,
                                    "script finished without deriving mu");
    return {std::move(store), mu->minpoly, mu->root};
}

RingForm ring_normal_form(const RationalExpr& e, const ConstraintStore& store) {
    // substitute solved bindings to a fixed point, value-preserving
    RationalExpr cur = e;
    while (true) {
        std::map<std::string, RationalExpr> live;
        for (const auto& [var, expr] : store.solved)
            if (cur.num().contains(var) || cur.den().contains(var)) live.emplace(var, expr);
        if (live.empty()) break;
        RationalExpr ns = substitute(cur.num(), live);
        RationalExpr ds = substitute(cur.den(), live);
        cur = ns / ds;
    }

    // pick the square variable actually present (at most one supported)
    std::string yvar;
    for (const auto& [var, rhs] : store.square_rhs)
        if (cur.num().contains(var) || cur.den().contains(var)) {
            if (!yvar.empty())
                throw std::logic_error("ring_normal_form: several square variables present");
            yvar = var;
        }

    RingForm out;
    if (yvar.empty()) {
        out.c0 = cur.num();
        out.c1 = MultiPoly();
        out.den = cur.den();
        return out;
    }
    const RationalExpr& rhs = store.square_rhs.at(yvar);

    // split a polynomial into even/odd parts of yvar, replacing y^2 by rhs
    auto split = [&](const MultiPoly& p) {
        RationalExpr even{MultiPoly()}, odd{MultiPoly()};
        unsigned d = p.degree(yvar);
        RationalExpr rpow(MultiPoly(Rational(1)));
        std::vector<RationalExpr> rpows{rpow};
        for (unsigned k = 1; k <= d / 2; ++k) rpows.push_back(rpows.back() * rhs);
        for (unsigned k = 0; k <= d; ++k) {
            MultiPoly ck = p.coeff_of(yvar, k);
            if (ck.is_zero()) continue;
            if (k % 2 == 0)
                even = even + RationalExpr(ck) * rpows[k / 2];
            else
                odd = odd + RationalExpr(ck) * rpows[(k - 1) / 2];
        }
        return std::make_pair(even, odd);
    };
    auto [a0, a1] = split(cur.num());
    auto [b0, b1] = split(cur.den());

    // (a0 + a1 y)/(b0 + b1 y) * (b0 - b1 y)/(b0 - b1 y)
    RationalExpr norm = b0 * b0 - b1 * b1 * rhs;
    if (norm.is_zero())
        throw std::logic_error("ring_normal_form: denominator is a zero divisor");
    RationalExpr c0 = a0 * b0 - a1 * b1 * rhs;
    RationalExpr c1 = a1 * b0 - a0 * b1;

    // clear the rational-function denominators into one polynomial denominator
    out.c0 = c0.num() * c1.den() * norm.den();
    out.c1 = c1.num() * c0.den() * norm.den();
    out.den = norm.num() * c0.den() * c1.den();
    out.yvar = yvar;

    // strip shared univariate content for a small canonical-ish form
    MultiPoly g = poly_gcd(poly_gcd(out.c0, out.c1), out.den);
    if (!g.is_constant()) {
        out.c0 = *exact_divide(out.c0, g);
        out.c1 = *exact_divide(out.c1, g);
        out.den = *exact_divide(out.den, g);
    }
    return out;
}

bool same_mod_store(const RationalExpr& a, const RationalExpr& b, const ConstraintStore& store) {
    MultiPoly diff = a.num() * b.den() - b.num() * a.den();
    if (diff.is_zero()) return true;
    RingForm fa = ring_normal_form(a, store);
    RingForm fb = ring_normal_form(b, store);
    return (fa.c0 * fb.den - fb.c0 * fa.den).is_zero() &&
           (fa.c1 * fb.den - fb.c1 * fa.den).is_zero();
}

// ---------------------------------------------------------------------------
// greedy automatic pipeline

std::variant<ScriptResult, AutoFailure> auto_pipeline(const SymbolicPattern& pattern,
                                                      const WitnessValues& witness, int budget) {
    ConstraintStore store;
    Rational lo = rational_from_decimal(kMuLower), hi = rational_from_decimal(kMuUpper);
    Rational wmu = witness.count("mu") ? witness.at("mu") : Rational(0);
    if (wmu <= 0 || wmu > 1)
        return AutoFailure{store, "witness mu outside (0,1]"};
    // generic patterns may live outside the 8-line window; keep bounds sane
    store.mu_bounds = (wmu >= lo && wmu <= hi) ? RatInterval(lo, hi)
                                               : RatInterval(Rational(0), Rational(1));

    const int n = pattern.n;
    if (n < 4) return AutoFailure{store, "pattern too small for 4x4 minors"};

    // candidate principal subsystems of sizes 4..6, ordered by how many
    // distinct free variables they touch, then by size
    struct Cand {
        std::vector<int> idx;
        int live;
    };
    std::vector<std::vector<int>> subsets;
    for (int size = 4; size <= std::min(n, 6); ++size) {
        std::vector<int> pick(static_cast<size_t>(size));
        std::iota(pick.begin(), pick.end(), 1);
        while (true) {
            subsets.push_back(pick);
            int i = size - 1;
            while (i >= 0 && pick[static_cast<size_t>(i)] == n - size + i + 1) --i;
            if (i < 0) break;
            ++pick[static_cast<size_t>(i)];
            for (int j = i + 1; j < size; ++j)
                pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
        }
    }

    auto live_vars_in = [&](const std::vector<int>& s) {
        std::set<std::string> vars;
        for (int i : s)
            for (int j : s)
                if (i < j && pattern.cell(i - 1, j - 1) == Cell::free_var) {
                    std::string v = pattern.free_name(i - 1, j - 1);
                    if (!store.is_solved(v) && !store.square_rhs.count(v)) vars.insert(v);
                }
        return vars;
    };

    int used = 0;
    std::set<std::string> tried;  // (subset, store-version) pairs
    auto store_version = [&]() {
        return std::to_string(store.solved.size()) + ":" + std::to_string(store.algebraic.size());
    };
    std::optional<MuConstraint> mu_found;

    const Rational tol = default_tol();
    while (used < budget && !mu_found) {
        // order candidates by current live-variable count then size
        std::vector<Cand> order;
        for (auto& s : subsets) {
            std::string key = store_version();
            for (int i : s) key += "," + std::to_string(i);
            if (tried.count(key)) continue;
            order.push_back({s, static_cast<int>(live_vars_in(s).size())});
        }
        if (order.empty()) return AutoFailure{store, "candidate subsystems exhausted"};
        std::stable_sort(order.begin(), order.end(), [](const Cand& a, const Cand& b) {
            if (a.live != b.live) return a.live < b.live;
            return a.idx.size() < b.idx.size();
        });

        bool progressed = false;
        for (const Cand& cand : order) {
            if (used >= budget) break;
            std::string key = store_version();
            for (int i : cand.idx) key += "," + std::to_string(i);
            tried.insert(key);
            ++used;

            StepContext ctx;
            ctx.step = -used;
            try {
                ctx.raw_minors = symbolic_minors(pattern, cand.idx, cand.idx);
            } catch (const std::exception&) {
                continue;
            }
            try {
                ctx.rebuild(store, witness);
            } catch (const std::exception&) {
                continue;
            }

            for (const MultiPoly& m : ctx.reduced) {
                // a univariate mu constraint settles the minimal polynomial;
                // keep going afterwards to bind as much of the store as the
                // budget allows, since later stages want explicit entries
                auto pv = m.present_vars();
                if (pv.size() == 1 && pv[0] == "mu") {
                    if (mu_found) continue;
                    try {
                        mu_found = select_mu_constraint(ctx.step, {m}, witness);
                        progressed = true;
                        break;
                    } catch (const std::exception&) {
                        continue;
                    }
                }
                // otherwise try to bind a variable
                MultiPoly g;
                try {
                    g = select_vanishing_factor(m, witness, tol, &store);
                } catch (const std::exception&) {
                    continue;
                }
                for (const std::string& v : pv) {
                    if (v == "mu" || store.is_solved(v) || store.square_rhs.count(v)) continue;
                    if (g.degree(v) == 1) {
                        try {
                            RationalExpr expr = solve_linear(g, v, witness, store.mu_bounds);
                            store.solved.emplace_back(v, expr);
                            progressed = true;
                        } catch (const std::exception&) {
                            continue;
                        }
                        break;
                    }
                    if (g.degree(v) == 2 && g.coeff_of(v, 1).is_zero()) {
                        MultiPoly a = g.coeff_of(v, 2), c = g.coeff_of(v, 0);
                        try {
                            Box box = certification_box(a.present_vars(), witness, store.mu_bounds);
                            if (certified_sign(a, box, witness_refiner(witness), 200) ==
                                Sign::zero_unresolved)
                                continue;
                            RationalExpr rhs(-c, a);
                            auto itw = witness.find(v);
                            if (itw != witness.end() &&
                                rational_abs(rhs.eval(witness) - itw->second * itw->second) > tol)
                                continue;
                            store.square_rhs.emplace(v, rhs);
                            store.algebraic.push_back(g.primitive_part());
                            if (itw != witness.end() && rational_abs(itw->second) > tol * 10)
                                store.sign_facts[v] = itw->second > 0 ? 1 : -1;
                            progressed = true;
                        } catch (const std::exception&) {
                            continue;
                        }
                        break;
                    }
                }
                if (progressed) break;
            }
            if (progressed) break;

            // last resort on this subsystem: eliminate the remaining non-mu
            // variables by resultants and hope for a univariate constraint
            if (!mu_found) {
                std::set<std::string> others;
                for (const MultiPoly& m : ctx.reduced)
                    for (const auto& v : m.present_vars())
                        if (v != "mu") others.insert(v);
                if (!others.empty() && others.size() <= 3) {
                    StepAction elim;
                    elim.kind = StepAction::Kind::eliminate_to_mu;
                    elim.eliminate.assign(others.rbegin(), others.rend());
                    try {
                        StepContext ctx2 = ctx;
                        ConstraintStore tmp = store;
                        mu_found = action_eliminate_to_mu(ctx.step, elim, ctx2, tmp, witness);
                        progressed = true;
                        break;
                    } catch (const std::exception&) {
                    }
                }
            }
        }
        if (!progressed) break;
    }
    if (mu_found) return ScriptResult{store, mu_found->minpoly, mu_found->root};
    return AutoFailure{store, used >= budget ? "budget exhausted" : "no further progress within budget"};
}

}  // namespace exactpack

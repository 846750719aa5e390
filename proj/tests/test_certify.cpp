#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <random>

#include "exactpack/pipeline.hpp"
#include "helpers.hpp"
#include "mutants.hpp"

using namespace exactpack;
using testhelp::data_dir;

namespace {

const ExactifyResult& run() {
    static ExactifyResult res = [] {
        RunConfig config;
        config.input_path = data_dir() + "/grass_3_8.txt";
        return run_exactify(config);
    }();
    return res;
}

QuotientRing toy_ring() {
    // Q[x]/(x^2 - 2), rho = 1, x isolated in (1, 2)
    UniPoly p = UniPoly::from_coeffs({Integer(-2), Integer(0), Integer(1)});
    QuotientRing::KElem rho{Rational(1), Rational(0)};
    return QuotientRing(p, rho, 1, AlgebraicNumber(p, Rational(1), Rational(2)));
}

RingElem random_elem(const QuotientRing& ring, std::mt19937& rng) {
    std::uniform_int_distribution<long> d(-9, 9);
    RingElem e = ring.zero();
    for (auto& q : e.c0) q = Rational(d(rng));
    for (auto& q : e.c1) q = Rational(d(rng));
    return e;
}

}  // namespace

TEST_CASE("ring axioms on random elements") {
    QuotientRing ring = toy_ring();
    std::mt19937 rng(555);
    for (int i = 0; i < 100; ++i) {
        RingElem a = random_elem(ring, rng);
        RingElem b = random_elem(ring, rng);
        RingElem c = random_elem(ring, rng);
        CHECK(ring.add(a, b) == ring.add(b, a));
        CHECK(ring.mul(a, b) == ring.mul(b, a));
        CHECK(ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c)));
        CHECK(ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c)));
        CHECK(ring.mul(a, ring.one()) == a);
        if (!a.is_zero()) {
            try {
                RingElem inv = ring.inverse(a);
                CHECK(ring.mul(a, inv) == ring.one());
            } catch (const CertifyError&) {
                // zero divisors exist in the toy ring (rho = 1 is a square)
            }
        }
    }
}

TEST_CASE("embedding encloses midpoint products") {
    QuotientRing ring = toy_ring();
    std::mt19937 rng(99);
    for (int i = 0; i < 50; ++i) {
        RingElem a = random_elem(ring, rng);
        RingElem b = random_elem(ring, rng);
        RatInterval ea = ring.embed(a, 20), eb = ring.embed(b, 20);
        RatInterval eab = ring.embed(ring.mul(a, b), 20);
        // interval product of enclosures must meet the product enclosure
        RatInterval prod = ea * eb;
        CHECK(prod.hi >= eab.lo);
        CHECK(eab.hi >= prod.lo);
    }
}

TEST_CASE("build_ring reproduces the embedded generators") {
    const auto& res = run();
    QuotientRing ring = build_ring(res.derivation.minpoly, res.derivation.store, res.derivation.mu);

    RatInterval xb = ring.x_box(12);
    CHECK(xb.contains(rational_from_decimal("0.64758897873417862734")));
    CHECK(rational_abs(xb.mid() - rational_from_decimal("0.6475889787")) <= pow10_inv(10));
    RatInterval yb = ring.y_box(12);
    CHECK(yb.hi < 0);
    CHECK(rational_abs(yb.mid() + rational_from_decimal("0.16026")) < pow10_inv(4));

    // y^2 enclosure contains 0.02568
    RingElem ysq = ring.mul(ring.y(), ring.y());
    RatInterval enc = ring.embed(ysq, 12);
    CHECK(enc.lo <= rational_from_decimal("0.02569"));
    CHECK(enc.hi >= rational_from_decimal("0.02568"));

    // the square relation variable lives in the degree-9 field here
    CHECK(ring.y_is_in_base());

    // a degenerate store without the square relation is rejected
    ConstraintStore empty;
    CHECK_THROWS_AS(build_ring(res.derivation.minpoly, empty, res.derivation.mu), CertifyError);
}

TEST_CASE("tail entries match the published values") {
    const auto& res = run();
    QuotientRing ring = build_ring(res.derivation.minpoly, res.derivation.store, res.derivation.mu);
    ExactGram g = complete_tail_entries(ring, res.derivation.store, res.detection.pattern,
                                        res.detection.witness);
    // a7 = (2,8), a10 = (3,8), a14 = (7,8)
    auto value = [&](int i, int j) { return ring.embed(g.at(i - 1, j - 1), 20).mid(); };
    CHECK(rational_abs(value(2, 8) - rational_from_decimal("0.39325")) < pow10_inv(4));
    CHECK(rational_abs(value(3, 8) - rational_from_decimal("0.10359")) < pow10_inv(4));
    CHECK(rational_abs(value(7, 8) - rational_from_decimal("0.12425")) < pow10_inv(4));

    // entry symmetry and contact cells exactly +/-x
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            CHECK(g.at(i, j) == g.at(j, i));
            if (res.detection.pattern.cell(i, j) == Cell::plus_mu) CHECK(g.at(i, j) == ring.x());
            if (res.detection.pattern.cell(i, j) == Cell::minus_mu)
                CHECK(g.at(i, j) == ring.neg(ring.x()));
        }
}

TEST_CASE("rank evidence and psd evidence") {
    const auto& res = run();
    const Certificate& cert = res.certificate;

    CHECK(cert.rank.vanishing.size() == 4900);
    CHECK(cert.rank.nonzero_sign != 0);
    CHECK(cert.psd.principal3.size() == 56);
    CHECK(cert.psd.principal2.size() == 28);
    for (const auto& [idx, lower] : cert.psd.principal3) CHECK(lower >= make_rational(1, 10000));
    for (const auto& [idx, lower] : cert.psd.principal2) CHECK(lower > 0);
    CHECK(cert.psd.entry_gaps.size() == 14);
    for (const auto& [cell, gap] : cert.psd.entry_gaps) CHECK(gap > 0);

    // a specific 2x2 principal minor: {1,3} is 1 - mu0^2 = 0.58063...
    bool found13 = false;
    for (const auto& [idx, lower] : cert.psd.principal2) {
        if (idx[0] == 1 && idx[1] == 3) {
            found13 = true;
            CHECK(rational_abs(lower - rational_from_decimal("0.580633")) < pow10_inv(4));
        }
    }
    CHECK(found13);

    CHECK(cert.numeric_residual < pow10_inv(4));
}

TEST_CASE("the leading principal 3x3 minor matches a numeric determinant oracle") {
    const auto& res = run();
    QuotientRing ring = build_ring(res.derivation.minpoly, res.derivation.store, res.derivation.mu);
    ExactGram g = complete_tail_entries(ring, res.derivation.store, res.detection.pattern,
                                        res.detection.witness);
    std::array<std::array<RingElem, 3>, 3> m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m[a][b] = g.at(a, b);
    RingElem d = ring.sub(
        ring.add(ring.mul(m[0][0], ring.sub(ring.mul(m[1][1], m[2][2]), ring.mul(m[1][2], m[2][1]))),
                 ring.mul(m[0][2], ring.sub(ring.mul(m[1][0], m[2][1]), ring.mul(m[1][1], m[2][0])))),
        ring.mul(m[0][1], ring.sub(ring.mul(m[1][0], m[2][2]), ring.mul(m[1][2], m[2][0]))));
    Rational exact_mid = ring.embed(d, 30).mid();

    // independent numeric oracle from the raw input entries
    const auto* e = run().certificate.numeric.data();
    double num = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                 e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                 e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
    CHECK(rational_abs(exact_mid - Rational(num)) < pow10_inv(10));
}

TEST_CASE("rank verification rejects a rank-2 toy") {
    QuotientRing ring = toy_ring();
    ExactGram g;
    g.n = 4;
    g.entries.assign(4, std::vector<RingElem>(4, ring.one()));
    // all-ones Gram: every 4x4 and 3x3 minor vanishes, so the single-minor
    // rank witness cannot be found
    CHECK_THROWS_AS(verify_rank3(g, ring), CertifyError);
}

TEST_CASE("certificate round trip") {
    const auto& res = run();
    Certificate back = certificate_from_json(res.certificate_json);
    CHECK(back.minpoly == res.certificate.minpoly);
    CHECK(back.entries == res.certificate.entries);
    CHECK(back.rank.vanishing.size() == res.certificate.rank.vanishing.size());
    CHECK(back.rank.nonzero_sign == res.certificate.rank.nonzero_sign);
    CHECK(back.psd.principal3.size() == res.certificate.psd.principal3.size());
    CHECK(rational_to_string(back.numeric_residual) ==
          rational_to_string(res.certificate.numeric_residual));
    // serializing the parse is identical text
    CHECK(certificate_to_json(back) == res.certificate_json);
}

TEST_CASE("rechecker accepts the emitted certificate") {
    const auto& res = run();
    RecheckReport report = recheck_certificate(res.certificate_json);
    for (const auto& f : report.failures) MESSAGE(f);
    CHECK(report.accepted);
}

TEST_CASE("rechecker rejects mutants") {
    const auto& res = run();
    using nlohmann::json;
    const json base = json::parse(res.certificate_json);

    auto mutations = testhelp::certificate_mutations();
    REQUIRE(mutations.size() >= 20);
    int rejected = 0;
    for (size_t k = 0; k < mutations.size(); ++k) {
        json doc = base;
        mutations[k](doc);
        RecheckReport report = recheck_certificate(doc.dump());
        if (!report.accepted) ++rejected;
        CHECK_MESSAGE(!report.accepted, "mutant ", k, " was not rejected");
    }
    CHECK(rejected == static_cast<int>(mutations.size()));
}

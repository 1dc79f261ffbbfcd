#include <doctest.h>

#include <cmath>
#include <random>

#include "apm/error.hpp"
#include "apm/saddle.hpp"
#include "apm/semilocal.hpp"
#include "support.hpp"

using namespace apm;

namespace {

// c x+ / y- = lambda^tau with lambda = 1/2, bc = -1.
ModelMap h31(double tau, std::optional<Chart> chart = std::nullopt) {
    return test::make_model(0.5, true, -1.0, 1.0, 1.0, std::pow(0.5, tau), 1.0, 0.0, 0.0, 0.0, {}, chart);
}

const Chart thin{0.05, 0.05};

ModelMap class2() { return test::make_model(0.5, true, 1.0, -1.0, 1.0, 1.0, 1.0); }
ModelMap class1() { return test::make_model(0.5, true, 1.0, -1.0, -1.0, 1.0, 1.0); }
ModelMap h331(std::optional<Chart> chart = std::nullopt) {
    return test::make_model(-0.5, false, -1.0 / 11.3, 11.3, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, {}, chart);
}

}  // namespace

TEST_CASE("tau and alpha") {
    const TangencyProfile p0 = compute_profile(test::make_model(0.5, true, -1.0 / 1.25, 1.25, 1.0, 0.8, 1.0));
    CHECK(std::abs(p0.tau) < 1e-15);
    CHECK(std::abs(p0.alpha) < 1e-15);
    CHECK(p0.alpha_tilde == doctest::Approx(2.0));

    const TangencyProfile p2 = compute_profile(test::make_model(0.5, true, -4.0, 0.25, 1.0, 1.0, 1.0));
    CHECK(p2.tau == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p2.class_tag == TangencyClass::H3_1);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.3, 2.0), l(0.25, 0.75), sg(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const double lam = sg(rng) < 0 ? -l(rng) : l(rng);
        const double c = (sg(rng) < 0 ? -1.0 : 1.0) * u(rng), d = (sg(rng) < 0 ? -1.0 : 1.0) * u(rng);
        const ModelMap m = test::make_model(lam, sg(rng) < 0, -1.0 / c, c, d, u(rng), u(rng));
        const TangencyProfile p = compute_profile(m);
        CHECK(std::abs(std::pow(std::abs(lam), p.tau) - std::abs(p.alpha + 1.0)) < 1e-12);
    }

    TangencyData bad;
    bad.c = 0.0;
    CHECK_THROWS_AS(tau_of(bad), Error);
}

TEST_CASE("class table") {
    auto tag = [](double lam, bool orient, double c, double d) {
        return compute_profile(test::make_model(lam, orient, -1.0 / c, c, d, 1.0, 1.0)).class_tag;
    };
    CHECK(tag(0.5, true, -1.0, -1.0) == TangencyClass::Class1);
    CHECK(tag(0.5, true, -1.0, 1.0) == TangencyClass::Class2);
    CHECK(tag(0.5, true, 2.0, 1.0) == TangencyClass::H3_1);
    CHECK(tag(-0.5, true, 2.0, 1.0) == TangencyClass::H3_4);
    CHECK(tag(-0.5, true, -2.0, 1.0) == TangencyClass::H3_5);
    CHECK(tag(-0.5, false, 2.0, -1.0) == TangencyClass::H3_2_1);
    CHECK(tag(-0.5, false, -2.0, -1.0) == TangencyClass::H3_2_2);
    CHECK(tag(-0.5, false, 2.0, 1.0) == TangencyClass::H3_3_1);
    CHECK(tag(-0.5, false, -2.0, 1.0) == TangencyClass::H3_3_2);

    const TangencyProfile neg = compute_profile(test::make_model(0.5, true, -0.5, 2.0, -1.0, 1.0, 1.0));
    CHECK(neg.class_tag == TangencyClass::H3_1);
    CHECK(neg.canonicalization == "inverse");
    CHECK(neg.canonical.d > 0.0);
    CHECK(neg.canonical_tau == doctest::Approx(-neg.tau));
}

TEST_CASE("inverse map dictionary") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.4, 2.5);
    for (int t = 0; t < 50; ++t) {
        const double c = u(rng), d = u(rng), xp = u(rng), ym = u(rng);
        for (double sc : {-1.0, 1.0})
            for (double sd : {-1.0, 1.0}) {
                const ModelMap m = test::make_model(0.5, true, -1.0 / (sc * c), sc * c, sd * d, xp, ym);
                const TangencyData raw = tangency_data(m);
                const TangencyData inv = inverse_data(raw);
                const TangencyData back = inverse_data(inv);
                CHECK(back.d == doctest::Approx(raw.d));
                CHECK(back.c == doctest::Approx(raw.c));
                CHECK(back.x_plus == raw.x_plus);
                CHECK(tau_of(inv) == doctest::Approx(-tau_of(raw)));
                const TangencyClass a = classify_signs(raw), b = classify_signs(inv);
                if (sc < 0) CHECK(a == b);  // Class1 and Class2 are self-dual
                if (sc > 0) {
                    // H3_1 with d < 0 is identified with H3_1 with d > 0.
                    CHECK((a == TangencyClass::H3_1) != (b == TangencyClass::H3_1));
                    CHECK(compute_profile(m).class_tag == TangencyClass::H3_1);
                }
                const ModelMap mi = test::make_model(inv.lambda, true, inv.b, inv.c, inv.d, inv.x_plus, inv.y_minus);
                CHECK(compute_profile(mi).class_tag == compute_profile(m).class_tag);
            }
    }
}

TEST_CASE("strip geometry") {
    const ModelMap m = test::make_model(0.5, true, -1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, {}, Chart{0.1, 0.1});
    const StripBoxes s3 = strip_geometry(m, 3);
    CHECK(s3.sigma0.cy - s3.sigma0.hy == doctest::Approx(0.1125).epsilon(1e-14));
    CHECK(s3.sigma0.cy + s3.sigma0.hy == doctest::Approx(0.1375).epsilon(1e-14));
    CHECK(s3.sigma1.cx - s3.sigma1.hx == doctest::Approx(0.1125).epsilon(1e-14));

    for (int k = 4; k < 12; ++k) {
        const StripBoxes a = strip_geometry(m, k), b = strip_geometry(m, k + 1);
        CHECK(b.sigma0.cy + b.sigma0.hy < a.sigma0.cy - a.sigma0.hy);
        CHECK(b.sigma1.cx + b.sigma1.hx < a.sigma1.cx - a.sigma1.hx);
    }
    CHECK_THROWS_AS(strip_geometry(m, 0), Error);

    // With Birkhoff terms the bands come from the exact cross form; iterate directly as oracle.
    const ModelMap mb = test::make_model(0.5, true, -1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, {0.4, -0.2}, Chart{0.1, 0.1});
    for (int k : {4, 7, 10}) {
        const StripBoxes s = strip_geometry(mb, k);
        for (int a = 0; a <= 4; ++a)
            for (double yk : {0.9, 1.0, 1.1}) {
                const double x0 = 0.9 + 0.05 * a;
                const ExactCross e = exact_cross_T0k(mb.saddle(), x0, yk, k);
                CHECK(std::abs(e.y0 - s.sigma0.cy) <= s.sigma0.hy + 1e-12 * s.sigma0.cy);
                const Point q = iterate_T0(mb.saddle(), {x0, e.y0}, k);
                CHECK(std::abs(q.y - yk) < 1e-12);
                CHECK(std::abs(q.x - s.sigma1.cx) <= s.sigma1.hx * (1.0 + 1e-12));
            }
        const ExactCross lo = exact_cross_T0k(mb.saddle(), 1.0, 0.9, k);
        const Point q = iterate_T0(mb.saddle(), {1.0, lo.y0}, k);
        CHECK(q.x == doctest::Approx(lo.xk).epsilon(1e-12));
        CHECK(q.y == doctest::Approx(0.9).epsilon(1e-12));
    }
}

TEST_CASE("lemma verdicts on model classes") {
    SUBCASE("second class: every pair regular") {
        const ModelMap m = class2();
        const int kb = default_k_bar(m);
        for (int i = kb; i <= kb + 8; ++i)
            for (int j = kb; j <= kb + 8; ++j) {
                CHECK(intersection_classify(m, i, j, 0.0, kb).verdict == Verdict::Regular);
                if ((i + j) % 3 == 0) CHECK(geometric_intersection(m, i, j).verdict == Verdict::Regular);
            }
    }
    SUBCASE("first class: every pair empty") {
        const ModelMap m = class1();
        const int kb = default_k_bar(m);
        for (int i = kb; i <= kb + 8; i += 2)
            for (int j = kb; j <= kb + 8; j += 3) {
                CHECK(intersection_classify(m, i, j, 0.0, kb).verdict == Verdict::Empty);
                CHECK(geometric_intersection(m, i, j).verdict == Verdict::Empty);
            }
    }
    SUBCASE("H3_1, tau = -0.7: horseshoes above their own strips") {
        const ModelMap m = h31(-0.7, thin);
        const int kb = default_k_bar(m);
        const double S1 = calibrate_S1(m, kb).S1;
        for (int i = kb; i <= kb + 10; ++i) {
            CHECK(intersection_classify(m, i, i, S1, kb).verdict == Verdict::Empty);
            CHECK(geometric_intersection(m, i, i).verdict == Verdict::Empty);
        }
    }
    SUBCASE("H3_1, tau = 0.5: own strips crossed regularly") {
        const ModelMap m = h31(0.5, thin);
        const int kb = default_k_bar(m);
        const double S1 = calibrate_S1(m, kb).S1;
        for (int i = kb; i <= kb + 10; ++i) {
            const StripPair sp = intersection_classify(m, i, i, S1, kb);
            CHECK(sp.verdict == Verdict::Regular);
            CHECK(sp.horseshoe_samples.size() == 65);
            const GeometricResult g = geometric_intersection(m, i, i);
            CHECK(g.verdict == Verdict::Regular);
            CHECK(g.components == 2);
            CHECK(g.min_expansion > 1.0);
        }
        CHECK_THROWS_AS(intersection_classify(m, kb - 1, kb, S1, kb), Error);
    }
    SUBCASE("tangent configuration") {
        const ModelMap m = h31(0.0, thin);
        const int kb = default_k_bar(m);
        for (int i : {kb, kb + 3}) {
            CHECK(std::abs(lemma_margin(m, i, i)) < 1e-15);
            CHECK(intersection_classify(m, i, i, 0.0, kb).verdict == Verdict::Borderline);
            CHECK(geometric_intersection(m, i, i).verdict == Verdict::Irregular);
        }
    }
}

TEST_CASE("S1 calibration and oracle agreement on random third-class models") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.5, 1.5), tau_d(-2.5, 2.5);
    int checked = 0;
    for (int t = 0; t < 12; ++t) {
        const double tau = tau_d(rng);
        if (std::abs(tau - std::round(tau)) < 0.15) continue;
        const double c = u(rng);
        const ModelMap m = test::make_model(0.5, true, -1.0 / c, c, u(rng), std::pow(0.5, tau) / c, 1.0, 0.0, 0.0,
                                            0.0, {}, thin);
        const int kb = default_k_bar(m);
        const Calibration cal = calibrate_S1(m, kb, 4);
        CHECK(cal.S1 == calibrate_S1(m, kb, 4, Exec::Serial).S1);
        for (int i = kb; i <= kb + 10; i += 2)
            for (int j = kb + 1; j <= kb + 10; j += 3) {
                const Verdict v = intersection_classify(m, i, j, cal.S1, kb).verdict;
                if (v == Verdict::Borderline) continue;
                const Verdict g = geometric_intersection(m, i, j).verdict;
                CHECK_FALSE((v == Verdict::Regular && g == Verdict::Empty));
                CHECK_FALSE((v == Verdict::Empty && g == Verdict::Regular));
                ++checked;
            }
    }
    CHECK(checked > 50);
}

TEST_CASE("symbol codes") {
    const SymbolCode a = parse_code("8,10");
    CHECK(a.blocks == std::vector<int>{8, 10});
    CHECK(a.markers.empty());
    CHECK(a.periodic);
    const SymbolCode b = parse_code("8:1, 10:2");
    CHECK(b.markers == std::vector<int>{1, 2});
    CHECK_THROWS_AS(parse_code(""), Error);
    CHECK_THROWS_AS(parse_code("8,x"), Error);
    CHECK_THROWS_AS(parse_code("8:1,10"), Error);
    CHECK_THROWS_AS(parse_code("8:3"), Error);
    CHECK(small_codes(8, 11).size() == 14);
}

TEST_CASE("admissibility rules") {
    SUBCASE("examples") {
        const TangencyProfile p = compute_profile(h31(0.5));
        CHECK(admissible_code(p, parse_code("10,10"), 9));
        CHECK_FALSE(admissible_code(p, parse_code("9,11"), 9));
        CHECK_THROWS_AS(admissible_code(p, parse_code("8,10"), 9), Error);

        const TangencyProfile q = compute_profile(h331());
        CHECK(admissible_code(q, parse_code("11,13"), 10));
        for (const auto& c : small_codes(10, 13)) {
            bool has_even = false;
            for (int k : c.blocks) has_even = has_even || k % 2 == 0;
            if (has_even) CHECK_FALSE(admissible_code(q, c, 10));
        }
        const TangencyProfile c2 = compute_profile(class2()), c1 = compute_profile(class1());
        for (const auto& c : small_codes(8, 12)) {
            CHECK(admissible_code(c2, c, 8));
            CHECK_FALSE(admissible_code(c1, c, 8));
        }
    }
    SUBCASE("unsupported profiles") {
        CHECK_THROWS_AS(admissible_code(compute_profile(h31(1.0)), parse_code("10"), 4), Error);
        const ModelMap neg = test::make_model(0.5, true, -0.5, 2.0, -1.0, 0.7, 1.0);
        CHECK_THROWS_AS(admissible_code(compute_profile(neg), parse_code("10"), 4), Error);
    }
    SUBCASE("transition rules agree with the sign of the lemma margin") {
        struct Case {
            double lam;
            bool orient;
            double c, d, xp;
        };
        const std::vector<Case> cases{
            {0.5, true, 1.0, 1.0, 0.3},   {0.5, true, 1.0, 1.0, 1.9},  {0.5, true, -1.0, 1.0, 1.0},
            {-0.5, true, 1.0, 1.0, 0.3},  {-0.5, true, 1.0, 1.0, 1.9}, {-0.5, true, -1.0, 1.0, 0.6},
            {-0.5, true, -1.0, 1.0, 1.4}, {-0.5, false, 1.0, -1.0, 0.3}, {-0.5, false, 1.0, -1.0, 2.9},
            {-0.5, false, -1.0, -1.0, 0.3}, {-0.5, false, -1.0, -1.0, 2.9}, {-0.5, false, 1.0, 1.0, 0.3},
            {-0.5, false, 1.0, 1.0, 2.9}, {-0.5, false, -1.0, 1.0, 0.3}, {-0.5, false, -1.0, 1.0, 2.9},
        };
        for (const auto& cs : cases) {
            const ModelMap m = test::make_model(cs.lam, cs.orient, -1.0 / cs.c, cs.c, cs.d, cs.xp, 1.0);
            const TangencyProfile p = compute_profile(m);
            REQUIRE(p.canonicalization.empty());
            const int kb = default_k_bar(m);
            for (int i = kb; i <= kb + 12; ++i)
                for (int j = kb; j <= kb + 12; ++j) {
                    INFO(to_string(p.class_tag), " tau=", p.tau, " j=", j, " i=", i);
                    CHECK(admissible_transition(p, j, i) == (lemma_margin(m, i, j) > 0.0));
                }
        }
    }
}

TEST_CASE("code-driven orbits") {
    SUBCASE("second class single block: two orbits") {
        const ModelMap m = class2();
        for (int marker : {1, 2}) {
            SymbolCode c = parse_code("8");
            c.markers = {marker};
            const CodeOrbit o = code_to_orbit(m, c);
            REQUIRE(o.status == OrbitStatus::Found);
            CHECK(o.residual < 1e-10);
            CHECK(o.markers == std::vector<int>{marker});
            REQUIRE(o.points.size() == 1);
            // Period check by direct iteration.
            const Point q = m.eval_T1(iterate_T0(m.saddle(), o.points[0], 8)).p;
            CHECK(std::abs(q.x - o.points[0].x) < 1e-9);
            CHECK(std::abs(q.y - o.points[0].y) * 256.0 < 1e-9);
        }
    }
    SUBCASE("inadmissible H3_1 code is certified absent") {
        const ModelMap m = h31(0.5);
        const CodeReport r = verify_code(m, compute_profile(m), parse_code("9,11"), 9);
        CHECK_FALSE(r.admissible);
        CHECK(r.found == 0);
        CHECK(r.inconclusive == 0);
        for (const auto& o : r.orbits) CHECK_FALSE(o.certificate.empty());
    }
    SUBCASE("first class: no orbits") {
        const ModelMap m = class1();
        for (const auto& c : small_codes(8, 10)) {
            const CodeReport r = verify_code(m, compute_profile(m), c, 8);
            CHECK(r.found == 0);
            CHECK(r.inconclusive == 0);
        }
    }
    SUBCASE("admissible codes match located orbits") {
        for (const ModelMap& m : {class2(), h31(0.5, thin), h331(thin)}) {
            const TangencyProfile p = compute_profile(m);
            const int kb = default_k_bar(m);
            for (const auto& c : small_codes(kb, kb + 3)) {
                const CodeReport r = verify_code(m, p, c, kb);
                CHECK(r.inconclusive == 0);
                CHECK(r.found == (r.admissible ? static_cast<int>(r.orbits.size()) : 0));
            }
        }
    }
    SUBCASE("preconditions") {
        const ModelMap m = class2();
        CHECK_THROWS_AS(code_to_orbit(m, parse_code("8")), Error);
        CHECK_THROWS_AS(code_to_orbit(m, parse_code("20:1,21:1")), Error);
        SymbolCode open = parse_code("8:1");
        open.periodic = false;
        CHECK_THROWS_AS(code_to_orbit(m, open), Error);
    }
}

TEST_CASE("oracle resolves preimage bands thinner than its sampling grid") {
    // c lambda^j x+ = lambda^(j - 2.2) sits far above lambda^i: two crossings of width ~1e-6 in y.
    const ModelMap m = test::make_model(0.5, true, -1.0, 1.0, -1.0, std::pow(0.5, -2.2), 1.0, 0.0, 0.0, 0.0, {}, thin);
    for (auto [i, j] : {std::pair{28, 26}, std::pair{30, 26}, std::pair{30, 28}}) {
        REQUIRE(lemma_margin(m, i, j) > 0.0);
        const GeometricResult g = geometric_intersection(m, i, j);
        CHECK(g.components == 2);
        CHECK(g.verdict == Verdict::Regular);
    }
}

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "apm/bif.hpp"
#include "apm/henon.hpp"
#include "apm/io.hpp"
#include "apm/jets.hpp"
#include "apm/rescale.hpp"
#include "apm/semilocal.hpp"
#include "support.hpp"

using namespace apm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Criterion 1
Outcome henon_oracle() {
    Outcome o;
    const auto exists_o = [](double M) { return elliptic_exists(true, M); };
    const auto exists_n = [](double M) { return elliptic_exists(false, M); };
    const double lo = bisect_predicate(exists_o, -1.5, 0.0), hi = bisect_predicate(exists_o, 0.0, 3.5);
    o.require(std::abs(lo + 1.0) < 1e-9 && std::abs(hi - 3.0) < 1e-9, fmt("orientable boundaries %.12g %.12g", lo, hi));
    const double nlo = bisect_predicate(exists_n, -0.5, 0.5), nhi = bisect_predicate(exists_n, 0.5, 1.5);
    o.require(std::abs(nlo) < 1e-9 && std::abs(nhi - 1.0) < 1e-9, fmt("non-orientable boundaries %.12g %.12g", nlo, nhi));

    double worst = 0.0, worst_n = 0.0;
    for (int s = 1; s <= 1000; ++s) {
        const double M = -1.0 + 4.0 * s / 1001.0;
        const auto h = analyze_orientable(M);
        for (const auto& f : h.fixed_points) {
            if (f.stability != Stability::EllipticGeneric && f.stability != Stability::EllipticResonant) continue;
            const double tr = henon_eval(f.points[0], M, 1).jac.trace();
            const double closed = std::acos(1.0 - std::sqrt(1.0 + M));
            worst = std::max({worst, std::abs(f.psi - closed), std::abs(std::acos(tr / 2.0) - closed)});
        }
        const double N = 1.0 * s / 1001.0;
        for (const auto& c : analyze_nonorientable(N).two_cycles) {
            const auto j = henon_eval(c.points[1], N, -1).jac * henon_eval(c.points[0], N, -1).jac;
            const double closed = std::acos(1.0 - 2.0 * N);
            worst_n = std::max({worst_n, std::abs(c.psi - closed), std::abs(std::acos(j.trace() / 2.0) - closed)});
        }
    }
    o.require(worst < 1e-12, fmt("orientable psi error %.3g", worst));
    o.require(worst_n < 1e-12, fmt("non-orientable psi error %.3g", worst_n));
    if (o.pass) o.detail = fmt("psi errors %.2g / %.2g", worst, worst_n);
    return o;
}

// Criterion 2
Outcome normal_form() {
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> mag(0.4, 0.7);
    double res = 0.0, trip = 0.0, odd = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double l = mag(rng);
        // lambda*gamma = 1 with lambda > 0, = -1, and = 1 with lambda < 0
        const double lambda = t % 3 == 0 ? l : -l;
        const double gamma = t % 3 == 1 ? 1.0 / l : 1.0 / lambda;
        const JetMap2 F = test::random_area_preserving_jet(rng, lambda, gamma, 9, 0.3);
        const NormalFormResult r = normal_form_reduce(F, 4);
        res = std::max(res, nonresonant_residual(r.reduced, 9));
        trip = std::max(trip, jet_distance(jet_compose(jet_inverse(r.change), jet_compose(r.reduced, r.change)), F));
        if (t % 3 == 1) odd = std::max({odd, std::abs(r.betas[0]), std::abs(r.betas[2])});
    }
    o.require(res < 1e-12, fmt("non-resonant residual %.3g", res));
    o.require(trip < 1e-10, fmt("round trip %.3g", trip));
    o.require(odd < 1e-12, fmt("odd betas at lambda*gamma = -1: %.3g", odd));
    if (o.pass) o.detail = fmt("residual %.2g, round trip %.2g", res, trip) + fmt(", odd betas %.2g", odd);
    return o;
}

// Criterion 3
Outcome rescaling() {
    Outcome o;
    const auto sweep = rescale_sweep(test::reference_model(1.0, 0.2), 6, 14, 2.0);
    const double c6 = sweep.front().residual_bound / (6 * std::pow(0.5, 6));
    double worst = 0.0;
    for (const auto& r : sweep) worst = std::max(worst, r.residual_bound / (r.k * std::pow(0.5, r.k)) / c6);
    o.require(worst <= 2.0, fmt("C_k / C_6 reaches %.3g", worst));

    const ModelMap cases[] = {
        test::reference_model(),
        test::make_model(-0.5, true, -1.0, 1.0, 1.0, 1.0, 1.0, 0.3),
        test::make_model(0.5, true, 1.0, 1.0, 1.0, 1.0, 1.0, 0.3),
        test::make_model(-0.5, false, -1.0, 1.0, 1.0, 1.0, 1.0, 0.3),
    };
    for (const ModelMap& m : cases) {
        const double bc = m.coeffs().b * m.coeffs().c, lg = m.lambda() * m.gamma();
        for (const auto& r : rescale_sweep(m, 6, 14, 2.0)) {
            const double lgk = std::pow(lg, r.k);
            const int want1 = -bc * lgk > 0 ? 1 : -1, want2 = lgk > 0 ? 1 : -1;
            o.require(r.nu1 == want1 && r.nu2 == want2, fmt("sign mismatch at k=%g, lambda=%g", r.k, m.lambda()));
        }
    }
    if (o.pass) o.detail = fmt("max C_k / C_6 = %.3g; signs match in 4 orientation cases", worst);
    return o;
}

// Criterion 4
Outcome cascades() {
    Outcome o;
    const auto scan = cascade_scan(test::reference_model(1.0, 0.2, 1.2), 6, 14);
    double cmin = 1e300, cmax = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const CascadeInterval& iv = scan[i];
        o.require(iv.complete, "incomplete interval at k=" + std::to_string(iv.k) + ": " + iv.message);
        if (!iv.complete) continue;
        const double b = iv.k * std::pow(0.5, 3 * iv.k);
        for (double e : {iv.mu_plus_detected - iv.mu_plus_formula, iv.mu_minus_detected - iv.mu_minus_formula}) {
            cmin = std::min(cmin, std::abs(e) / b);
            cmax = std::max(cmax, std::abs(e) / b);
        }
        for (const auto& r : iv.resonances)
            o.require(r.mu_detected > iv.lo() && r.mu_detected < iv.hi(), "resonance " + r.tag + " outside E_k");
        for (std::size_t j = 0; j < i; ++j)
            o.require(scan[j].hi() < iv.lo() || iv.hi() < scan[j].lo(), "overlapping intervals");
    }
    o.require(cmax <= 3.0 * cmin, fmt("fitted C ranges over [%.3g, %.3g]", cmin, cmax));
    if (o.pass) o.detail = fmt("C in [%.3g, %.3g]; disjoint; resonances interior", cmin, cmax);
    return o;
}

// Criterion 5
Outcome global_resonance() {
    Outcome o;
    const ResonanceReport symp = global_resonance_check(test::reference_model(1.0, 0.2), 8, 16);
    o.require(symp.ok, "symplectic: " + (symp.failures.empty() ? std::string() : symp.failures.front()));
    double c8 = 0.0, worst = 0.0;
    for (const auto& e : symp.entries) {
        o.require(e.found, "no elliptic fixed point at k=" + std::to_string(e.k));
        const double c = std::abs(e.trace - 2.0 * (1.0 - std::sqrt(2.0))) / (e.k * std::pow(0.5, e.k));
        if (e.k == 8) c8 = c;
        worst = std::max(worst, c / c8);
    }
    o.require(worst <= 2.0, fmt("trace constant grows to %.3g x its k=8 value", worst));

    const ResonanceReport glob = global_resonance_check(test::make_model(0.5, true, 1.0, 1.0, 1.0, 1.0, 1.0, 0.3), 8, 16);
    o.require(glob.ok, "globally non-orientable case");
    for (const auto& e : glob.entries) o.require(e.found, "no elliptic 2-cycle at k=" + std::to_string(e.k));

    const ResonanceReport even = global_resonance_check(test::make_model(-0.5, false, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0), 8, 16);
    const ResonanceReport odd = global_resonance_check(test::make_model(-0.5, false, 1.0, -1.0, 1.0, 1.0, 1.0, 0.4), 8, 16);
    o.require(even.ok && odd.ok, "lambda*gamma = -1 cases");
    for (const auto& e : even.entries) o.require(e.found == (e.k % 2 == 0), "even-k sub-case parity");
    for (const auto& e : odd.entries) o.require(e.found == (e.k % 2 == 1), "odd-k sub-case parity");
    if (o.pass) o.detail = fmt("trace constant within %.3g x; 2-cycles k=8..16; parity sub-cases hold", worst);
    return o;
}

// Criterion 6
Outcome s0_invariance() {
    Outcome o;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double same = 0.0, single = 0.0, twice = 0.0;
    for (int t = 0; t < 50; ++t) {
        GlobalMapCoeffs c;
        c.a = u(rng);
        c.c = 1.0 + 0.5 * u(rng);
        c.b = -1.0 / c.c;
        c.d = 1.0 + 0.5 * u(rng);
        c.f20 = u(rng);
        c.f11 = u(rng);
        c.y_minus = 1.0 + 0.3 * u(rng);
        c.x_plus = c.y_minus / c.c;  // tau = 0
        const double l = 0.4 + 0.2 * std::abs(u(rng));
        const SaddleNormalForm s(l, {u(rng)});
        for (PairShift v : {PairShift::Plus, PairShift::Minus}) {
            const PairInvariance p = s0_pair_invariance(c, s, v, 1);
            same = std::max(same, std::abs(p.s0_shifted - p.s0));
        }
        const SaddleNormalForm n(-l, {}, false);
        for (PairShift v : {PairShift::Plus, PairShift::Minus}) {
            const PairInvariance p = s0_pair_invariance(c, n, v, 1);
            single = std::max(single, std::abs(p.s0_shifted + p.s0));
        }
        for (PairShift v : {PairShift::PlusTwice, PairShift::MinusTwice, PairShift::Mixed}) {
            const PairInvariance p = s0_pair_invariance(c, n, v, 1);
            twice = std::max(twice, std::abs(p.s0_shifted - p.s0));
        }
    }
    o.require(same < 1e-10, fmt("pair change at tau = 0 moves s0 by %.3g", same));
    o.require(single < 1e-10, fmt("single step: max |s0' + s0| = %.3g", single));
    o.require(twice < 1e-10, fmt("double step moves s0 by %.3g", twice));
    o.detail = fmt("tau=0 change %.2g; single step |s0'+s0| %.3g", same, single) + fmt("; double step %.2g", twice) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

// Criterion 7
Outcome classifier() {
    Outcome o;
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> u(0.5, 1.5), tau_d(-2.5, 2.5), mag(0.4, 0.6);
    std::uniform_int_distribution<int> kind(0, 2), off(0, 16);
    std::bernoulli_distribution coin(0.5);
    const Chart thin{0.05, 0.05};
    int configs = 0, pairs = 0, contradictions = 0;
    while (configs < 500) {
        const int kd = kind(rng);  // lambda > 0 orientable, lambda < 0 orientable, lambda < 0 non-orientable
        const double lambda = kd == 0 ? mag(rng) : -mag(rng);
        const double tau = tau_d(rng);
        if (std::abs(tau - std::round(tau)) < 0.15) continue;
        const double c = u(rng) * (coin(rng) ? 1.0 : -1.0);
        const double b = (kd == 2 || coin(rng) ? -1.0 : 1.0) / c;
        const double d = u(rng) * (coin(rng) ? 1.0 : -1.0);
        const ModelMap m = test::make_model(lambda, kd != 2, b, c, d, std::pow(std::abs(lambda), tau) / std::abs(c), 1.0,
                                            0.0, 0.0, 0.0, {}, thin);
        const TangencyProfile p = compute_profile(m);
        if (to_string(p.class_tag).rfind("H3", 0) != 0) continue;
        ++configs;
        const int kb = default_k_bar(m);
        const double S1 = calibrate_S1(m, kb, 8).S1;
        for (int t = 0; t < 40; ++t) {
            const int i = kb + off(rng), j = kb + off(rng);
            const Verdict v = intersection_classify(m, i, j, S1, kb).verdict;
            if (v == Verdict::Borderline) continue;
            const Verdict g = geometric_intersection(m, i, j).verdict;
            ++pairs;
            if ((v == Verdict::Regular && g == Verdict::Empty) || (v == Verdict::Empty && g == Verdict::Regular))
                ++contradictions;
        }
    }
    o.require(contradictions == 0, std::to_string(contradictions) + " contradictions");

    const ModelMap class1 = test::make_model(0.5, true, 1.0, -1.0, -1.0, 1.0, 1.0);
    const ModelMap class2 = test::make_model(0.5, true, 1.0, -1.0, 1.0, 1.0, 1.0);
    for (const auto& [m, want] : {std::pair{class1, Verdict::Empty}, std::pair{class2, Verdict::Regular}}) {
        const int kb = default_k_bar(m);
        for (int i = kb; i <= kb + 8; ++i)
            for (int j = kb; j <= kb + 8; ++j) {
                o.require(intersection_classify(m, i, j, 0.0, kb).verdict == want, "lemma verdict in class " +
                                                                                      to_string(compute_profile(m).class_tag));
                o.require(geometric_intersection(m, i, j).verdict == want,
                          "oracle verdict in class " + to_string(compute_profile(m).class_tag));
            }
    }
    o.detail = std::to_string(configs) + " configs, " + std::to_string(pairs) + " pairs, " +
               std::to_string(contradictions) + " contradictions; Class1 empty, Class2 regular" +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

// Criterion 8
Outcome symbolic() {
    Outcome o;
    const Chart thin{0.05, 0.05};
    int codes = 0;
    {
        const ModelMap m = test::make_model(0.5, true, 1.0, -1.0, 1.0, 1.0, 1.0);
        const TangencyProfile p = compute_profile(m);
        const int kb = default_k_bar(m);
        for (const auto& c : small_codes(kb, kb + 3)) {
            const CodeReport r = verify_code(m, p, c, kb);
            ++codes;
            const int want = c.blocks.size() == 1 ? 2 : 4;
            o.require(r.found == want && static_cast<int>(r.orbits.size()) == want, "Class2 orbit count");
            for (const auto& orb : r.orbits) o.require(orb.residual < 1e-10, "Class2 residual");
        }
    }
    {
        const ModelMap m = test::make_model(0.5, true, -1.0, 1.0, 1.0, std::pow(0.5, 0.5), 1.0, 0.0, 0.0, 0.0, {}, thin);
        const TangencyProfile p = compute_profile(m);
        const int kb = default_k_bar(m);
        for (const auto& c : small_codes(kb, kb + 3)) {
            const CodeReport r = verify_code(m, p, c, kb);
            ++codes;
            o.require(r.inconclusive == 0, "H3_1 inconclusive search");
            o.require(r.admissible == (r.found > 0), "H3_1 verdict differs from orbit existence");
            for (const auto& orb : r.orbits)
                if (orb.status == OrbitStatus::Found) o.require(orb.residual < 1e-10, "H3_1 residual");
        }
    }
    {
        const ModelMap m =
            test::make_model(-0.5, false, -1.0 / 11.3, 11.3, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, {}, thin);
        const TangencyProfile p = compute_profile(m);
        const int kb = default_k_bar(m);
        for (const auto& c : small_codes(kb, kb + 3)) {
            bool even = false;
            for (int b : c.blocks) even = even || b % 2 == 0;
            if (!even) continue;
            const CodeReport r = verify_code(m, p, c, kb);
            ++codes;
            o.require(r.found == 0 && r.inconclusive == 0, "H3_3_1 even-block code not certified absent");
            for (const auto& orb : r.orbits) o.require(!orb.certificate.empty(), "missing certificate");
        }
    }
    if (o.pass) o.detail = std::to_string(codes) + " codes consistent";
    return o;
}

// Criterion 9
std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& tool) {
    Outcome o;
    if (tool.empty() || !fs::exists(tool)) {
        o.require(false, "CLI binary not given");
        return o;
    }
    const fs::path dir = fs::temp_directory_path() / ("apm_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const auto ref = put("ref.json", model_to_json(test::reference_model(1.0, 0.2)).dump());
    const auto casc = put("casc.json", model_to_json(test::reference_model(1.0, 0.2, 1.2)).dump());
    const auto c2 = put("c2.json", model_to_json(test::make_model(0.5, true, 1.0, -1.0, 1.0, 1.0, 1.0)).dump());
    std::mt19937_64 rng(9);
    const auto jet = put("jet.json", jet_to_json(test::random_area_preserving_jet(rng, 0.5, 2.0, 9, 0.3)).dump());

    const std::vector<std::string> runs = {
        "classify --model " + ref,
        "henon --orientable --m -1.5:3.5:0.01",
        "henon --non-orientable --m -0.5:1.5:0.01",
        "cascade --model " + casc + " --k 6:14",
        "rescale-check --model " + ref + " --k 6:14 --ball 2",
        "diagram --model " + casc + " --k 6:10 --alpha -0.2:0.2:0.05 --svg " + (dir / "d.svg").string(),
        "symbolic --model " + c2 + " --code 8,9 --verify",
        "nf-reduce --jet " + jet + " --n 4 --seed 3",
    };
    int n = 0;
    for (const auto& args : runs) {
        std::string outs[2], svgs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / ("out" + std::to_string(rep));
            const int rc = std::system((tool + " " + args + " > " + out.string() + " 2>&1").c_str());
            o.require(rc == 0, "non-zero exit: " + args);
            outs[rep] = slurp(out);
            svgs[rep] = slurp(dir / "d.svg");
        }
        o.require(!outs[0].empty() && outs[0] == outs[1], "outputs differ: " + args);
        o.require(svgs[0] == svgs[1], "svg differs: " + args);
        ++n;
    }
    fs::remove_all(dir);
    if (o.pass) o.detail = std::to_string(n) + " runs byte-identical";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string tool = argc > 1 ? argv[1] : "";
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 means no runtime budget
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "Henon oracle", 1.0, henon_oracle},
        {2, "normal-form reducer", 10.0, normal_form},
        {3, "rescaling convergence", 30.0, rescaling},
        {4, "cascade endpoints", 60.0, cascades},
        {5, "global resonance", 120.0, global_resonance},
        {6, "s0 invariance", 0.0, s0_invariance},
        {7, "intersection classifier", 0.0, classifier},
        {8, "symbolic dynamics", 0.0, symbolic},
        {9, "CLI determinism", 0.0, [&] { return determinism(tool); }},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += fmt(" [runtime %.2fs over %.0fs]", secs, c.limit_s);
        }
        std::printf("criterion %d %s: %s (%.2fs) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}

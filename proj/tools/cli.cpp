#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "apm/bif.hpp"
#include "apm/error.hpp"
#include "apm/henon.hpp"
#include "apm/io.hpp"
#include "apm/jets.hpp"
#include "apm/rescale.hpp"
#include "apm/semilocal.hpp"

namespace apm::cli {

namespace {

struct IntRange {
    int lo = 0, hi = 0;
};

struct Grid {
    double lo = 0.0, hi = 0.0, step = 1.0;
    std::vector<double> values() const {
        const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) v.push_back(lo + static_cast<double>(i) * step);
        return v;
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw validation_error("not a number: '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw validation_error("not an integer: '" + s + "'");
    return v;
}

IntRange parse_range(const std::string& s) {
    const auto p = split(s, ':');
    if (p.size() == 1) return {to_int(p[0]), to_int(p[0])};
    if (p.size() != 2) throw validation_error("range must be A:B, got '" + s + "'");
    IntRange r{to_int(p[0]), to_int(p[1])};
    if (r.lo < 1 || r.hi < r.lo) throw validation_error("empty or invalid range '" + s + "'");
    return r;
}

Grid parse_grid(const std::string& s) {
    const auto p = split(s, ':');
    if (p.size() != 3) throw validation_error("grid must be A:B:STEP, got '" + s + "'");
    Grid g{to_double(p[0]), to_double(p[1]), to_double(p[2])};
    if (!(g.step > 0.0) || g.hi < g.lo) throw validation_error("empty or invalid grid '" + s + "'");
    if ((g.hi - g.lo) / g.step > 1e6) throw validation_error("grid too large '" + s + "'");
    return g;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::string csv() const {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) s += ',';
                std::visit(
                    [&s](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) s += num(v);
                        else if constexpr (std::is_same_v<T, long long>) s += std::to_string(v);
                        else if constexpr (std::is_same_v<T, bool>) s += v ? "true" : "false";
                        else s += v;
                    },
                    r[i]);
            }
            s += '\n';
        }
        return s;
    }

    json to_json() const {
        json a = json::array();
        for (const auto& r : rows) {
            json o = json::object();
            for (std::size_t i = 0; i < r.size(); ++i)
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) o[header[i]] = std::isfinite(v) ? json(v) : json();
                        else o[header[i]] = v;
                    },
                    r[i]);
            a.push_back(o);
        }
        return a;
    }
};

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw validation_error("cannot write '" + path + "'");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Options {
    std::string model, out, svg, k, mu, alpha, m_grid, code, jet;
    double ball = 2.0, s1 = -1.0, budget = 1.0;
    int k_bar = 0, n = 4;
    long long seed = -1;
    bool as_json = false, verify = false, non_orientable = false, orientable = false, calibrate = false;
};

std::string emit_table(const Table& t, const Options& o) { return o.as_json ? dump(t.to_json()) : t.csv(); }

// classify

int cmd_classify(const Options& o, std::ostream& out) {
    const ModelMap m = load_model(o.model);
    const TangencyProfile p = compute_profile(m);
    const int kb = o.k_bar > 0 ? o.k_bar : default_k_bar(m);
    json j = {{"class", to_string(p.class_tag)},
              {"tau", p.tau + 0.0},  // no -0
              {"alpha", p.alpha},
              {"alpha_tilde", p.alpha_tilde},
              {"s0", p.s0},
              {"s0_nor", p.s0_nor},
              {"nu1", p.nu1},
              {"canonicalization", p.canonicalization},
              {"canonical_tau", p.canonical_tau + 0.0},
              {"k_bar", kb}};
    if (o.calibrate) {
        const Calibration c = calibrate_S1(m, kb);
        j["S1"] = c.S1;
        j["disagreements"] = c.disagreements;
    }
    write_text(dump(j), o.out, out);
    return kOk;
}

// henon

int cmd_henon(const Options& o, std::ostream& out) {
    if (o.orientable && o.non_orientable) throw validation_error("choose one of --orientable, --non-orientable");
    const bool orient = !o.non_orientable;
    const Grid g = parse_grid(o.m_grid);
    std::vector<double> Ms = g.values();
    for (const auto& b : henon_bifurcation_values(orient))
        if (b.M >= g.lo && b.M <= g.hi) Ms.push_back(b.M);
    std::sort(Ms.begin(), Ms.end());
    Ms.erase(std::unique(Ms.begin(), Ms.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), Ms.end());

    Table t{{"M", "orbit", "index", "x", "y", "trace", "stability", "psi", "tags"}, {}};
    for (double M : Ms) {
        // Grid points within rounding of a bifurcation value are reported at the exact value.
        for (const auto& b : henon_bifurcation_values(orient))
            if (std::abs(M - b.M) < 1e-12) M = b.M;
        const HenonAnalysis h = analyze_henon(orient, M);
        std::string tags;
        for (const auto& s : h.tags_at_M) tags += (tags.empty() ? "" : ";") + s;
        auto add = [&](const char* kind, const std::vector<HenonOrbit>& orbits) {
            long long idx = 0;
            for (const auto& orb : orbits)
                t.rows.push_back({M, std::string(kind), idx++, orb.points.front().x, orb.points.front().y, orb.trace,
                                  to_string(orb.stability), orb.psi, tags});
        };
        add("fixed", h.fixed_points);
        add("2cycle", h.two_cycles);
        if (h.fixed_points.empty() && h.two_cycles.empty())
            t.rows.push_back({M, std::string("none"), -1LL, std::nan(""), std::nan(""), std::nan(""), std::string(""),
                              std::nan(""), tags});
    }
    write_text(emit_table(t, o), o.out, out);
    return kOk;
}

// cascade

int cmd_cascade(const Options& o, std::ostream& out) {
    const ModelMap m = load_model(o.model);
    const IntRange r = parse_range(o.k);
    if (!(o.budget > 0.0)) throw validation_error("--budget must be > 0");
    const double la = std::abs(m.lambda());
    Table t{{"k", "kind", "mu_minus_det", "mu_plus_det", "mu_minus_formula", "mu_plus_formula", "res_pi2", "res_2pi3",
             "res_acos14", "pass"},
            {}};
    for (const auto& iv : cascade_scan(m, r.lo, r.hi)) {
        const double tol = o.budget * iv.k * std::pow(la, 3 * iv.k);
        bool pass = iv.complete && std::abs(iv.mu_plus_detected - iv.mu_plus_formula) <= tol &&
                    std::abs(iv.mu_minus_detected - iv.mu_minus_formula) <= tol;
        std::vector<double> res(3, std::nan(""));
        for (std::size_t i = 0; i < iv.resonances.size() && i < 3; ++i) {
            res[i] = iv.resonances[i].mu_detected;
            pass = pass && res[i] > iv.lo() && res[i] < iv.hi();
        }
        t.rows.push_back({static_cast<long long>(iv.k), to_string(iv.kind), iv.mu_minus_detected, iv.mu_plus_detected,
                          iv.mu_minus_formula, iv.mu_plus_formula, res[0], res[1], res[2], pass});
    }
    write_text(emit_table(t, o), o.out, out);
    return kOk;
}

// diagram

std::string render_svg(const std::vector<BifCurveSample>& s, int k_lo, int k_hi) {
    double mu0 = 1e300, mu1 = -1e300, a0 = 1e300, a1 = -1e300;
    for (const auto& p : s) {
        mu0 = std::min(mu0, p.mu);
        mu1 = std::max(mu1, p.mu);
        a0 = std::min(a0, p.alpha);
        a1 = std::max(a1, p.alpha);
    }
    if (mu1 <= mu0) mu1 = mu0 + 1.0;
    if (a1 <= a0) a1 = a0 + 1.0;
    const double W = 800, H = 600, pad = 40;
    auto X = [&](double mu) { return pad + (mu - mu0) / (mu1 - mu0) * (W - 2 * pad); };
    auto Y = [&](double a) { return H - pad - (a - a0) / (a1 - a0) * (H - 2 * pad); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    if (mu0 < 0 && mu1 > 0)
        os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << pad << "\" x2=\"" << num(X(0)) << "\" y2=\"" << H - pad
           << "\" stroke=\"#999\"/>\n";
    static const char* fills[] = {"#cfe3f7", "#f7dcc4"};
    for (int k = k_lo; k <= k_hi; ++k) {
        std::vector<const BifCurveSample*> plus, minus;
        for (const auto& p : s)
            if (p.k == k) (plus.empty() || plus.front()->tag == p.tag ? plus : minus).push_back(&p);
        std::string poly;
        for (const auto* p : plus) poly += num(X(p->mu)) + "," + num(Y(p->alpha)) + " ";
        for (auto it = minus.rbegin(); it != minus.rend(); ++it)
            poly += num(X((*it)->mu)) + "," + num(Y((*it)->alpha)) + " ";
        os << "<polygon points=\"" << poly << "\" fill=\"" << fills[k % 2] << "\" fill-opacity=\"0.7\" stroke=\"none\"/>\n";
        for (const auto* curve : {&plus, &minus}) {
            std::string line;
            for (const auto* p : *curve) line += num(X(p->mu)) + "," + num(Y(p->alpha)) + " ";
            os << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        }
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"14\" text-anchor=\"middle\">mu</text>\n";
    os << "<text x=\"12\" y=\"" << H / 2 << "\" font-size=\"14\">alpha</text>\n";
    os << "</svg>\n";
    return os.str();
}

int cmd_diagram(const Options& o, std::ostream& out) {
    const ModelMap m = load_model(o.model);
    const IntRange r = parse_range(o.k);
    const std::vector<BifCurveSample> s = bif_curves(m, r.lo, r.hi, parse_grid(o.alpha).values());
    Table t{{"k", "curve", "alpha", "alpha_tilde", "mu"}, {}};
    for (const auto& p : s) t.rows.push_back({static_cast<long long>(p.k), to_string(p.tag), p.alpha, p.alpha_tilde, p.mu});
    write_text(emit_table(t, o), o.out, out);
    if (!o.svg.empty()) write_text(render_svg(s, r.lo, r.hi), o.svg, out);
    return kOk;
}

// rescale-check

int cmd_rescale(const Options& o, std::ostream& out) {
    const ModelMap m = load_model(o.model);
    const IntRange r = parse_range(o.k);
    if (!(o.ball > 0.0)) throw validation_error("--ball must be > 0");
    const double la = std::abs(m.lambda());
    std::vector<double> mus{m.mu()};
    if (!o.mu.empty()) mus = parse_grid(o.mu).values();
    Table t{{"k", "mu", "nu1", "nu2", "M", "residual", "budget", "pass"}, {}};
    for (double mu : mus) {
        // Constant fitted at the first k of each sweep; later k may exceed it by at most 2x.
        double c_fit = -1.0;
        for (const auto& rm : rescale_sweep(m.with_mu(mu), r.lo, r.hi, o.ball)) {
            const double scale = rm.k * std::pow(la, rm.k);
            if (c_fit < 0.0) c_fit = rm.residual_bound / scale;
            const double budget = 2.0 * c_fit * scale;
            t.rows.push_back({static_cast<long long>(rm.k), mu, static_cast<long long>(rm.nu1),
                              static_cast<long long>(rm.nu2), rm.M, rm.residual_bound, budget,
                              rm.residual_bound <= budget});
        }
    }
    write_text(emit_table(t, o), o.out, out);
    return kOk;
}

// symbolic

int cmd_symbolic(const Options& o, std::ostream& out, std::ostream& err) {
    const ModelMap m = load_model(o.model);
    const SymbolCode code = parse_code(o.code);
    const TangencyProfile p = compute_profile(m);
    const int kb = o.k_bar > 0 ? o.k_bar : default_k_bar(m);
    json j = {{"blocks", code.blocks}, {"class", to_string(p.class_tag)}, {"k_bar", kb}};
    j["admissible"] = admissible_code(p, code, kb);
    if (o.s1 >= 0.0) {
        json pairs = json::array();
        const std::size_t n = code.blocks.size();
        for (std::size_t s = 0; s < n; ++s) {
            const int jj = code.blocks[s], ii = code.blocks[(s + 1) % n];
            const StripPair sp = intersection_classify(m, ii, jj, o.s1, kb);
            pairs.push_back({{"j", jj}, {"i", ii}, {"verdict", to_string(sp.verdict)}, {"margin", sp.lemma_margin},
                             {"threshold", sp.threshold}});
        }
        j["transitions"] = pairs;
    }
    int rc = kOk;
    if (o.verify) {
        const CodeReport rep = verify_code(m, p, code, kb);
        json orbits = json::array();
        for (const auto& orb : rep.orbits) {
            json pts = json::array();
            for (const auto& q : orb.points) pts.push_back({q.x, q.y});
            orbits.push_back({{"markers", orb.markers},
                              {"status", to_string(orb.status)},
                              {"residual", orb.residual},
                              {"certificate", orb.certificate},
                              {"points", pts}});
        }
        j["orbits"] = orbits;
        j["found"] = rep.found;
        j["inconclusive"] = rep.inconclusive;
        j["consistent"] = rep.inconclusive == 0 && rep.admissible == (rep.found == static_cast<int>(rep.orbits.size()));
        if (rep.inconclusive > 0) {
            err << "symbolic: " << rep.inconclusive << " marker sequence(s) inconclusive\n";
            rc = kNumerical;
        }
    }
    write_text(dump(j), o.out, out);
    return rc;
}

// nf-reduce

int cmd_nf(const Options& o, std::ostream& out) {
    const JetMap2 f = jet_from_json(read_json_file(o.jet));
    NormalFormOptions opts;
    if (o.seed >= 0) opts.kernel_seed = static_cast<std::uint64_t>(o.seed);
    const NormalFormResult r = normal_form_reduce(f, o.n, opts);
    json j = normal_form_to_json(r);
    j["nonresonant_residual"] = nonresonant_residual(r.reduced, r.reduced.order());
    write_text(dump(j), o.out, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bifurcation analysis of area-preserving maps with a quadratic homoclinic tangency", "apm"};
    app.require_subcommand(1);
    Options o;

    auto model_opt = [&](CLI::App* sc) { sc->add_option("--model", o.model, "model JSON")->required(); };
    auto common = [&](CLI::App* sc) {
        sc->add_option("--out", o.out, "output path (default stdout)");
        sc->add_flag("--json", o.as_json, "JSON instead of CSV");
    };

    auto* classify = app.add_subcommand("classify", "tangency profile as JSON");
    model_opt(classify);
    common(classify);
    classify->add_option("--k-bar", o.k_bar, "override k_bar");
    classify->add_flag("--calibrate", o.calibrate, "also fit S1 against the geometric oracle");

    auto* henon = app.add_subcommand("henon", "fixed points, 2-cycles and bifurcation tags of the limit map");
    henon->add_flag("--orientable", o.orientable, "orientable map (default)");
    henon->add_flag("--non-orientable", o.non_orientable, "non-orientable map");
    henon->add_option("--m", o.m_grid, "M grid A:B:STEP")->required();
    common(henon);

    auto* cascade = app.add_subcommand("cascade", "cascade endpoints of T_k");
    model_opt(cascade);
    cascade->add_option("--k", o.k, "k range A:B")->required();
    cascade->add_option("--budget", o.budget, "pass if |detected - formula| <= budget k |lambda|^3k");
    common(cascade);

    auto* diagram = app.add_subcommand("diagram", "bifurcation curves in the (mu, alpha) plane");
    model_opt(diagram);
    diagram->add_option("--k", o.k, "k range A:B")->required();
    diagram->add_option("--alpha", o.alpha, "alpha grid A:B:STEP")->required();
    diagram->add_option("--svg", o.svg, "SVG output path");
    common(diagram);

    auto* rescale = app.add_subcommand("rescale-check", "residual of the rescaled first-return map");
    model_opt(rescale);
    rescale->add_option("--k", o.k, "k range A:B")->required();
    rescale->add_option("--ball", o.ball, "ball radius");
    rescale->add_option("--mu", o.mu, "sweep mu over A:B:STEP instead of the model value");
    common(rescale);

    auto* symbolic = app.add_subcommand("symbolic", "admissibility and orbit search for a block code");
    model_opt(symbolic);
    symbolic->add_option("--code", o.code, "blocks, e.g. 8,10 or 8:1,10:2")->required();
    symbolic->add_flag("--verify", o.verify, "search orbits for every marker sequence");
    symbolic->add_option("--k-bar", o.k_bar, "override k_bar");
    symbolic->add_option("--s1", o.s1, "report lemma verdicts of the transitions with this S1");
    common(symbolic);

    auto* nf = app.add_subcommand("nf-reduce", "normal form of a saddle jet");
    nf->add_option("--jet", o.jet, "jet JSON")->required();
    nf->add_option("--n", o.n, "Birkhoff order");
    nf->add_option("--seed", o.seed, "fill resonant generator terms from this seed");
    common(nf);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (classify->parsed()) return cmd_classify(o, out);
        if (henon->parsed()) return cmd_henon(o, out);
        if (cascade->parsed()) return cmd_cascade(o, out);
        if (diagram->parsed()) return cmd_diagram(o, out);
        if (rescale->parsed()) return cmd_rescale(o, out);
        if (symbolic->parsed()) return cmd_symbolic(o, out, err);
        if (nf->parsed()) return cmd_nf(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Validation ? kValidation : kNumerical;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kValidation;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace apm::cli

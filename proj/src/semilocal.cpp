#include "apm/semilocal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <sstream>

#include "apm/error.hpp"
#include "apm/rescale.hpp"
#include "apm/saddle.hpp"

namespace apm {

std::string to_string(TangencyClass c) {
    switch (c) {
        case TangencyClass::Class1: return "Class1";
        case TangencyClass::Class2: return "Class2";
        case TangencyClass::H3_1: return "H3_1";
        case TangencyClass::H3_2_1: return "H3_2_1";
        case TangencyClass::H3_2_2: return "H3_2_2";
        case TangencyClass::H3_3_1: return "H3_3_1";
        case TangencyClass::H3_3_2: return "H3_3_2";
        case TangencyClass::H3_4: return "H3_4";
        case TangencyClass::H3_5: return "H3_5";
        case TangencyClass::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Regular: return "regular";
        case Verdict::Empty: return "empty";
        case Verdict::Borderline: return "borderline";
        case Verdict::Irregular: return "irregular";
    }
    return "borderline";
}

std::string to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::Found: return "found";
        case OrbitStatus::Absent: return "absent";
        case OrbitStatus::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

TangencyData tangency_data(const ModelMap& m) {
    const GlobalMapCoeffs c = m.coeffs();
    return {m.lambda(), m.gamma(), c.b, c.c, c.d, c.x_plus, c.y_minus};
}

TangencyData inverse_data(const TangencyData& t) {
    TangencyData r;
    r.lambda = 1.0 / t.gamma;
    r.gamma = 1.0 / t.lambda;
    r.b = 1.0 / t.b;
    r.c = 1.0 / t.c;
    r.d = -t.d / (t.c * t.b * t.b);
    r.x_plus = t.y_minus;
    r.y_minus = t.x_plus;
    return r;
}

double tau_of(const TangencyData& t) {
    if (t.c * t.x_plus == 0.0) throw validation_error("tau undefined: c x+ = 0");
    return std::log(std::abs(t.c * t.x_plus / t.y_minus)) / std::log(std::abs(t.lambda));
}

TangencyClass classify_signs(const TangencyData& t) {
    const bool lpos = t.lambda > 0.0, orient = t.lambda * t.gamma > 0.0;
    const bool cpos = t.c > 0.0, dpos = t.d > 0.0;
    if (t.c == 0.0 || t.d == 0.0) return TangencyClass::Unclassified;
    if (lpos && orient) {
        if (!cpos) return dpos ? TangencyClass::Class2 : TangencyClass::Class1;
        return dpos ? TangencyClass::H3_1 : TangencyClass::Unclassified;
    }
    if (!lpos && orient) {
        if (!dpos) return TangencyClass::Unclassified;
        return cpos ? TangencyClass::H3_4 : TangencyClass::H3_5;
    }
    if (!lpos && !orient) {
        if (!dpos) return cpos ? TangencyClass::H3_2_1 : TangencyClass::H3_2_2;
        return cpos ? TangencyClass::H3_3_1 : TangencyClass::H3_3_2;
    }
    return TangencyClass::Unclassified;
}

TangencyProfile compute_profile(const ModelMap& m) {
    const TangencyData t = tangency_data(m);
    const GlobalMapCoeffs co = m.coeffs();
    TangencyProfile p;
    p.tau = tau_of(t);
    p.alpha = t.c * t.x_plus / t.y_minus - 1.0;
    p.alpha_tilde = p.alpha + 2.0;
    p.nu1 = -t.b * t.c > 0.0 ? 1 : -1;
    p.s0 = compute_s0(co, p.nu1).value;
    p.s0_nor = compute_s0(co, -1).value;
    p.canonical = t;
    p.canonical_tau = p.tau;
    p.class_tag = classify_signs(t);
    if (p.class_tag != TangencyClass::Unclassified) return p;

    const bool orient = t.lambda * t.gamma > 0.0;
    if (t.lambda < 0.0 && orient && t.d < 0.0) {
        // Pair (T0 M+, M-) followed by x -> -x.
        TangencyData s = t;
        s.x_plus = -t.lambda * t.x_plus;
        s.b = -t.lambda * t.b;
        s.c = -t.gamma * t.c;
        s.d = t.gamma * t.d;
        p.canonical = s;
        p.canonical_tau = tau_of(s);
        p.canonicalization = "shift";
    } else if (t.c != 0.0 && t.d != 0.0) {
        p.canonical = inverse_data(t);
        p.canonical_tau = tau_of(p.canonical);
        p.canonicalization = "inverse";
    }
    p.class_tag = classify_signs(p.canonical);
    return p;
}

namespace {

int smallest_k(double lam_abs, double factor, double bound) {
    // Smallest k >= 1 with lam_abs^k * factor <= bound.
    if (factor <= bound) return 1;
    return static_cast<int>(std::ceil(std::log(bound / factor) / std::log(lam_abs) - 1e-12));
}

bool third_class(TangencyClass c) {
    return c != TangencyClass::Class1 && c != TangencyClass::Class2 && c != TangencyClass::Unclassified;
}

double frac_distance(double tau) { return std::abs(tau - std::round(tau)); }

Box box_from(double x0, double x1, double y0, double y1) {
    return {0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * std::abs(x1 - x0), 0.5 * std::abs(y1 - y0)};
}

}  // namespace

int default_k_bar(const ModelMap& m) {
    const TangencyData t = tangency_data(m);
    const Chart& ch = m.chart();
    const double la = std::abs(t.lambda);
    const double reach = std::min(ch.eps_y, ch.eps_x / std::abs(t.b));
    const double factor = (t.y_minus + ch.eps_y + std::abs(t.c) * (t.x_plus + ch.eps_x)) / std::abs(t.d);
    int kb = std::max(4, smallest_k(la, factor, 0.25 * reach * reach));
    const TangencyProfile p = compute_profile(m);
    const double dist = frac_distance(p.canonical_tau);
    if (third_class(p.class_tag) && dist > 1e-9) {
        // |lambda|^(k/2) < dist |ln|lambda|| / 4
        const double bound = dist * std::abs(std::log(la)) / 4.0;
        const int k = static_cast<int>(std::floor(2.0 * std::log(bound) / std::log(la))) + 1;
        kb = std::max(kb, k);
    }
    return kb;
}

StripBoxes strip_geometry(const ModelMap& m, int k) {
    if (k < 1) throw validation_error("strip index must be >= 1");
    const Chart& ch = m.chart();
    const double xp = m.x_plus(), ym = m.y_minus();
    double x1lo = 1e300, x1hi = -1e300, y0lo = 1e300, y0hi = -1e300;
    for (double x0 : {xp - ch.eps_x, xp, xp + ch.eps_x})
        for (double yk : {ym - ch.eps_y, ym + ch.eps_y}) {
            ExactCross e;
            try {
                e = exact_cross_T0k(m.saddle(), x0, yk, k);
            } catch (const Error&) {
                throw domain_error("chart too small for strip index " + std::to_string(k));
            }
            x1lo = std::min(x1lo, e.xk);
            x1hi = std::max(x1hi, e.xk);
            y0lo = std::min(y0lo, e.y0);
            y0hi = std::max(y0hi, e.y0);
        }
    StripBoxes s;
    s.sigma0 = box_from(xp - ch.eps_x, xp + ch.eps_x, y0lo, y0hi);
    s.sigma1 = box_from(x1lo, x1hi, ym - ch.eps_y, ym + ch.eps_y);
    return s;
}

double lemma_margin(const ModelMap& m, int i, int j) {
    const TangencyData t = tangency_data(m);
    return t.d * (std::pow(t.gamma, -i) * t.y_minus - t.c * std::pow(t.lambda, j) * t.x_plus);
}

StripPair intersection_classify(const ModelMap& m, int i, int j, double S1, int k_bar) {
    if (i < k_bar || j < k_bar) throw validation_error("strip indices must be >= k_bar");
    const double la = std::abs(m.lambda());
    StripPair sp;
    sp.i = i;
    sp.j = j;
    sp.lemma_margin = lemma_margin(m, i, j);
    sp.threshold = S1 * (std::pow(la, i) + std::pow(la, j)) * std::pow(la, 0.5 * k_bar);
    if (sp.lemma_margin > sp.threshold)
        sp.verdict = Verdict::Regular;
    else if (sp.lemma_margin < -sp.threshold)
        sp.verdict = Verdict::Empty;
    else
        sp.verdict = Verdict::Borderline;
    sp.strip_box = strip_geometry(m, i).sigma0;
    const Box s1 = strip_geometry(m, j).sigma1;
    for (int t = 0; t <= 64; ++t) {
        const double y = s1.cy - s1.hy + 2.0 * s1.hy * t / 64.0;
        sp.horseshoe_samples.push_back(m.eval_T1({s1.cx, y}).p);
    }
    return sp;
}

namespace {

struct Count {
    int components = 0;
    double min_expansion = 1e300;
};

// t-interval of [0, 1] on which a + t (b - a) lies in [lo, hi].
std::pair<double, double> linear_window(double a, double b, double lo, double hi) {
    if (a == b) return (a >= lo && a <= hi) ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
    double t0 = (lo - a) / (b - a), t1 = (hi - a) / (b - a);
    if (t0 > t1) std::swap(t0, t1);
    return {std::max(0.0, t0), std::min(1.0, t1)};
}

// The left and right edges of sigma1 are mapped by T1; across the thin strip each y-slice is treated as a
// segment, so the preimage of the target box meets every slice in one interval and components are runs of
// non-empty slices.
// Slices where an edge image crosses a side of the target, plus midpoints between consecutive ones. For
// large i the preimage bands are far thinner than any uniform grid.
std::vector<double> edge_crossings(const ModelMap& m, const Box& sigma1, const Box& target, double fold) {
    const double lo = sigma1.cy - sigma1.hy, hi = sigma1.cy + sigma1.hy;
    std::vector<double> cuts{lo, hi};
    if (fold > lo && fold < hi) cuts.insert(cuts.begin() + 1, fold);
    std::vector<double> roots;
    for (double x : {sigma1.cx - sigma1.hx, sigma1.cx + sigma1.hx})
        for (int comp = 0; comp < 2; ++comp) {
            const double c = comp == 0 ? target.cx : target.cy, h = comp == 0 ? target.hx : target.hy;
            for (double level : {c - h, c + h}) {
                auto g = [&](double y) {
                    const Point q = m.eval_T1({x, y}).p;
                    return (comp == 0 ? q.x : q.y) - level;
                };
                for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                    double a = cuts[s], b = cuts[s + 1], ga = g(a);
                    if (ga * g(b) > 0.0) continue;
                    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                        const double mid = 0.5 * (a + b), gm = g(mid);
                        if ((gm > 0.0) == (ga > 0.0)) {
                            a = mid;
                            ga = gm;
                        } else {
                            b = mid;
                        }
                    }
                    roots.push_back(a);
                    roots.push_back(b);
                }
            }
        }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out = roots;
    for (std::size_t s = 0; s + 1 < roots.size(); ++s) out.push_back(0.5 * (roots[s] + roots[s + 1]));
    return out;
}

Count count_components(const ModelMap& m, const Box& sigma1, const Box& target, double gk_abs, int n, double fold,
                       const std::vector<double>& extra) {
    const double lo = sigma1.cy - sigma1.hy, hi = sigma1.cy + sigma1.hy;
    std::vector<double> ys(n);
    for (int t = 0; t < n; ++t) ys[t] = lo + (hi - lo) * t / (n - 1);
    if (fold > lo && fold < hi) ys.push_back(fold);
    for (double y : extra)
        if (y >= lo && y <= hi) ys.push_back(y);
    std::sort(ys.begin(), ys.end());
    const double xa = sigma1.cx - sigma1.hx, xb = sigma1.cx + sigma1.hx;
    Count out;
    bool prev_in = false;
    for (double y : ys) {
        const Point pa = m.eval_T1({xa, y}).p, pb = m.eval_T1({xb, y}).p;
        const auto wy = linear_window(pa.y, pb.y, target.cy - target.hy, target.cy + target.hy);
        const auto wx = linear_window(pa.x, pb.x, target.cx - target.hx, target.cx + target.hx);
        const double t0 = std::max(wy.first, wx.first), t1 = std::min(wy.second, wx.second);
        const bool in = t0 <= t1;
        if (in) {
            if (!prev_in) ++out.components;
            const MapJet mid = m.eval_T1({xa + 0.5 * (t0 + t1) * (xb - xa), y});
            out.min_expansion = std::min(out.min_expansion, gk_abs * std::abs(mid.jac(1, 1)));
        }
        prev_in = in;
    }
    return out;
}

// Where d ybar / d y vanishes along the centre column of sigma1.
double fold_point(const ModelMap& m, const Box& sigma1) {
    double y = m.y_minus();
    for (int it = 0; it < 20; ++it) {
        const double h = 1e-6;
        const double g0 = m.eval_T1({sigma1.cx, y}).jac(1, 1);
        const double g1 = m.eval_T1({sigma1.cx, y + h}).jac(1, 1);
        const double dg = (g1 - g0) / h;
        if (dg == 0.0) break;
        const double step = g0 / dg;
        y -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return y;
}

}  // namespace

GeometricResult geometric_intersection(const ModelMap& m, int i, int j) {
    const Box target = strip_geometry(m, i).sigma0;
    const Box sigma1 = strip_geometry(m, j).sigma1;
    const double gk = std::pow(std::abs(m.gamma()), i);
    const double fold = fold_point(m, sigma1);
    const std::vector<double> extra = edge_crossings(m, sigma1, target, fold);
    GeometricResult r;
    int n = 2048;
    Count prev = count_components(m, sigma1, target, gk, n, fold, extra);
    int same = 0;
    while (n < 65536 && same < 2) {
        n *= 2;
        const Count next = count_components(m, sigma1, target, gk, n, fold, extra);
        same = next.components == prev.components ? same + 1 : 0;
        prev = next;
    }
    r.components = prev.components;
    r.stable = same >= 2;
    r.min_expansion = prev.components > 0 ? prev.min_expansion : 0.0;
    if (!r.stable)
        r.verdict = Verdict::Irregular;
    else if (r.components == 0)
        r.verdict = Verdict::Empty;
    else if (r.components == 2 && r.min_expansion > 1.0)
        r.verdict = Verdict::Regular;
    else
        r.verdict = Verdict::Irregular;
    return r;
}

Calibration calibrate_S1(const ModelMap& m, int k_bar, int window, Exec exec) {
    const int n = window + 1;
    const double la = std::abs(m.lambda());
    std::vector<double> need(static_cast<std::size_t>(n) * n, -1.0);
    auto work = [&](int idx) {
        const int i = k_bar + idx / n, j = k_bar + idx % n;
        const double mg = lemma_margin(m, i, j);
        const Verdict lemma = mg > 0.0 ? Verdict::Regular : (mg < 0.0 ? Verdict::Empty : Verdict::Borderline);
        if (geometric_intersection(m, i, j).verdict != lemma)
            need[idx] = std::abs(mg) / ((std::pow(la, i) + std::pow(la, j)) * std::pow(la, 0.5 * k_bar));
    };
    const int total = n * n;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (int idx = 0; idx < total; ++idx) work(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) work(idx);
    }
    Calibration c;
    for (double v : need)
        if (v >= 0.0) {
            ++c.disagreements;
            c.S1 = std::max(c.S1, v);
        }
    return c;
}

SymbolCode parse_code(const std::string& text) {
    SymbolCode code;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto colon = tok.find(':');
        try {
            std::size_t used = 0;
            const std::string head = tok.substr(0, colon);
            code.blocks.push_back(std::stoi(head, &used));
            if (used != head.size()) throw std::invalid_argument(tok);
            if (colon != std::string::npos) code.markers.push_back(std::stoi(tok.substr(colon + 1)));
        } catch (const std::exception&) {
            throw validation_error("malformed code token '" + tok + "'");
        }
    }
    if (code.blocks.empty()) throw validation_error("empty symbol code");
    if (!code.markers.empty() && code.markers.size() != code.blocks.size())
        throw validation_error("markers must be given for every block or none");
    for (int a : code.markers)
        if (a != 1 && a != 2) throw validation_error("markers must be 1 or 2");
    return code;
}

bool admissible_transition(const TangencyProfile& p, int j, int i) {
    // Sign of j - i + tau for non-integer tau.
    const double t = j - i + std::floor(p.canonical_tau) + 0.5;
    const bool je = j % 2 == 0, ie = i % 2 == 0;
    switch (p.class_tag) {
        case TangencyClass::Class1: return false;
        case TangencyClass::Class2: return true;
        case TangencyClass::H3_1: return t > 0.0;
        case TangencyClass::H3_2_1: return je && t < 0.0;
        case TangencyClass::H3_2_2: return !je && t < 0.0;
        case TangencyClass::H3_3_1: return !je || t > 0.0;
        case TangencyClass::H3_3_2: return je || t > 0.0;
        case TangencyClass::H3_4:
            if (je && ie) return t > 0.0;
            if (!je && !ie) return t < 0.0;
            return !je;
        case TangencyClass::H3_5:
            if (je && ie) return true;
            if (!je && !ie) return false;
            return je ? t < 0.0 : t > 0.0;
        case TangencyClass::Unclassified: break;
    }
    throw validation_error("no symbolic description for an unclassified tangency");
}

bool admissible_code(const TangencyProfile& p, const SymbolCode& code, int k_bar) {
    if (code.blocks.empty()) throw validation_error("empty symbol code");
    for (int k : code.blocks)
        if (k < k_bar) throw validation_error("block " + std::to_string(k) + " below k_bar");
    if (p.class_tag == TangencyClass::Unclassified)
        throw validation_error("unsupported: no symbolic description for an unclassified tangency");
    if (!p.canonicalization.empty())
        throw validation_error("unsupported: block indices refer to the canonical representative; supply it directly");
    if (third_class(p.class_tag)) {
        if (frac_distance(p.canonical_tau) < 1e-9) throw validation_error("unsupported: integer tau");
    }
    const std::size_t n = code.blocks.size();
    const std::size_t pairs = code.periodic ? n : n - 1;
    for (std::size_t s = 0; s < pairs; ++s)
        if (!admissible_transition(p, code.blocks[s], code.blocks[(s + 1) % n])) return false;
    return true;
}

namespace {

struct Shooting {
    const ModelMap& m;
    const std::vector<int>& blocks;

    // z = (x0_s, eta_s) per block; residual per block transition.
    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        const int n = static_cast<int>(blocks.size());
        Eigen::VectorXd r(2 * n);
        const double ym = m.y_minus();
        for (int s = 0; s < n; ++s) {
            const int nx = (s + 1) % n;
            const double x0 = z[2 * s], yk = ym + z[2 * s + 1];
            const ExactCross e = exact_cross_T0k(m.saddle(), x0, yk, blocks[s]);
            const Point img = m.eval_T1({e.xk, yk}).p;
            const double ynext = T0k(m.saddle(), img, blocks[nx]).p.y;
            r[2 * s] = img.x - z[2 * nx];
            r[2 * s + 1] = ynext - (ym + z[2 * nx + 1]);
        }
        return r;
    }

    bool inside(const Eigen::VectorXd& z) const {
        const Chart& ch = m.chart();
        for (Eigen::Index s = 0; s < z.size() / 2; ++s) {
            if (!(std::abs(z[2 * s] - m.x_plus()) <= ch.eps_x)) return false;
            if (!(std::abs(z[2 * s + 1]) <= ch.eps_y)) return false;
        }
        return true;
    }
};

enum class Outcome { Converged, Exited, Stalled };

Outcome newton(const Shooting& sh, Eigen::VectorXd& z, double& res) {
    const Eigen::Index n = z.size();
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd r;
        try {
            r = sh.residual(z);
        } catch (const Error&) {
            return Outcome::Exited;
        }
        res = r.cwiseAbs().maxCoeff();
        if (!std::isfinite(res)) return Outcome::Exited;
        if (res < 1e-13) return Outcome::Converged;
        Eigen::MatrixXd J(n, n);
        try {
            for (Eigen::Index c = 0; c < n; ++c) {
                const double h = 1e-7;
                Eigen::VectorXd zp = z, zm = z;
                zp[c] += h;
                zm[c] -= h;
                J.col(c) = (sh.residual(zp) - sh.residual(zm)) / (2 * h);
            }
        } catch (const Error&) {
            return Outcome::Exited;
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) return Outcome::Exited;
        z -= lu.solve(r);
        if (!sh.inside(z)) return Outcome::Exited;
    }
    try {
        res = sh.residual(z).cwiseAbs().maxCoeff();
    } catch (const Error&) {
        return Outcome::Exited;
    }
    return res < 1e-10 ? Outcome::Converged : Outcome::Stalled;
}

}  // namespace

CodeOrbit code_to_orbit(const ModelMap& m, const SymbolCode& code) {
    const int n = static_cast<int>(code.blocks.size());
    if (n == 0) throw validation_error("empty symbol code");
    if (!code.periodic) throw validation_error("orbit search needs a periodic code");
    if (static_cast<int>(code.markers.size()) != n) throw validation_error("orbit search needs a marker per block");
    if (std::accumulate(code.blocks.begin(), code.blocks.end(), 0) > 40)
        throw validation_error("code too long for orbit search (sum of blocks > 40)");
    for (int k : code.blocks)
        if (k < 1) throw validation_error("blocks must be >= 1");

    const Shooting sh{m, code.blocks};
    const Chart& ch = m.chart();
    const TangencyData t = tangency_data(m);
    // Per block: predicted branch of the parabola first, then a uniform grid on the marker's side.
    std::vector<std::vector<double>> etas(n);
    for (int s = 0; s < n; ++s) {
        const double sgn = code.markers[s] == 1 ? -1.0 : 1.0;
        const int nx = (s + 1) % n;
        const double pred = (std::pow(t.gamma, -code.blocks[nx]) * t.y_minus -
                             t.c * std::pow(t.lambda, code.blocks[s]) * t.x_plus) / t.d;
        if (pred > 0.0 && std::sqrt(pred) < ch.eps_y) etas[s].push_back(sgn * std::sqrt(pred));
        for (int g = 0; g < 16; ++g) etas[s].push_back(sgn * ch.eps_y * (g + 0.5) / 16.0);
    }

    CodeOrbit out;
    out.markers = code.markers;
    bool stalled = false;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        Eigen::VectorXd z(2 * n);
        for (int s = 0; s < n; ++s) z[2 * s + 1] = etas[s][idx[s]];
        for (int s = 0; s < n; ++s) {
            const int prev = (s + n - 1) % n;
            const double xk = std::pow(t.lambda, code.blocks[prev]) * t.x_plus;
            z[2 * s] = m.eval_T1({xk, t.y_minus + z[2 * prev + 1]}).p.x;
        }
        double res = 0.0;
        if (sh.inside(z)) {
            const Outcome o = newton(sh, z, res);
            if (o == Outcome::Converged) {
                bool match = true;
                for (int s = 0; s < n; ++s)
                    if ((z[2 * s + 1] < 0.0 ? 1 : 2) != code.markers[s]) match = false;
                if (match) {
                    out.status = OrbitStatus::Found;
                    out.residual = res;
                    for (int s = 0; s < n; ++s) {
                        const double yk = t.y_minus + z[2 * s + 1];
                        out.points.push_back({z[2 * s], exact_cross_T0k(m.saddle(), z[2 * s], yk, code.blocks[s]).y0});
                    }
                    return out;
                }
            } else if (o == Outcome::Stalled) {
                stalled = true;
            }
        }
        int s = 0;
        while (s < n && ++idx[s] == etas[s].size()) idx[s++] = 0;
        if (s == n) break;
    }
    for (int s = 0; s < n; ++s) {
        const int j = code.blocks[s], i = code.blocks[(s + 1) % n];
        if (geometric_intersection(m, i, j).verdict == Verdict::Empty) {
            out.status = OrbitStatus::Absent;
            out.certificate = "T1(sigma_" + std::to_string(j) + "^1) misses sigma_" + std::to_string(i) + "^0";
            return out;
        }
    }
    out.status = stalled ? OrbitStatus::Inconclusive : OrbitStatus::Absent;
    out.certificate = stalled ? "Newton stagnated inside U" : "every seed left U";
    return out;
}

CodeReport verify_code(const ModelMap& m, const TangencyProfile& p, const SymbolCode& code, int k_bar) {
    CodeReport rep;
    rep.code = code;
    rep.code.markers.clear();
    rep.admissible = admissible_code(p, rep.code, k_bar);
    const int n = static_cast<int>(code.blocks.size());
    const int total = 1 << n;
    rep.orbits.resize(total);
    for (int mask = 0; mask < total; ++mask) {
        SymbolCode c = rep.code;
        for (int s = 0; s < n; ++s) c.markers.push_back((mask >> s) & 1 ? 2 : 1);
        rep.orbits[mask] = code_to_orbit(m, c);
    }
    for (const auto& o : rep.orbits) {
        rep.found += o.status == OrbitStatus::Found;
        rep.inconclusive += o.status == OrbitStatus::Inconclusive;
    }
    return rep;
}

std::vector<SymbolCode> small_codes(int lo, int hi) {
    std::vector<SymbolCode> out;
    for (int k = lo; k <= hi; ++k) out.push_back({{k}, {}, true});
    for (int a = lo; a <= hi; ++a)
        for (int b = a; b <= hi; ++b) out.push_back({{a, b}, {}, true});
    return out;
}

}  // namespace apm

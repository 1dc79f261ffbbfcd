#include "apm/bif.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "apm/error.hpp"
#include "apm/henon.hpp"
#include "apm/rescale.hpp"
#include "apm/retmap.hpp"

namespace apm {

std::string to_string(CascadeKind k) {
    switch (k) {
        case CascadeKind::Ek: return "e_k";
        case CascadeKind::Ek2: return "e_k2";
        case CascadeKind::TildeEven: return "e~_2m";
        case CascadeKind::Tilde2Odd: return "e~2_2m+1";
    }
    return "?";
}

std::string to_string(CurveTag t) {
    switch (t) {
        case CurveTag::BkPlus: return "B_k+";
        case CurveTag::BkMinus: return "B_k-";
        case CurveTag::BkPM1: return "B_k+-1";
        case CurveTag::Bk2Minus: return "B_k2-";
        case CurveTag::TildePlus: return "B~_k+";
        case CurveTag::TildeMinus: return "B~_k-";
        case CurveTag::TildePM1: return "B~_k+-1";
        case CurveTag::Tilde2Minus: return "B~_k2-";
    }
    return "?";
}

std::string to_string(PairShift v) {
    switch (v) {
        case PairShift::Plus: return "plus";
        case PairShift::Minus: return "minus";
        case PairShift::PlusTwice: return "plus2";
        case PairShift::MinusTwice: return "minus2";
        case PairShift::Mixed: return "mixed";
    }
    return "?";
}

CascadeKind cascade_kind(const ModelMap& m, int k) {
    const bool two = nu1_of(m, k) < 0;
    if (m.saddle().orientable()) return two ? CascadeKind::Ek2 : CascadeKind::Ek;
    return two ? CascadeKind::Tilde2Odd : CascadeKind::TildeEven;
}

CascadeTargets cascade_targets(CascadeKind kind) {
    CascadeTargets t;
    t.resonance_tags = {"pi/2", "2pi/3", "acos(-1/4)"};
    t.resonance_traces = {0.0, -1.0, -0.5};
    if (uses_two_cycles(kind)) {
        t.M_plus = 0.0;
        t.M_minus = 1.0;
        t.resonance_M = {0.5, 0.75, 0.625};
    } else {
        t.M_plus = -1.0;
        t.M_minus = 3.0;
        t.resonance_M = {0.0, 1.25, 9.0 / 16.0};
    }
    return t;
}

double CascadeInterval::lo() const { return std::min(mu_plus_detected, mu_minus_detected); }
double CascadeInterval::hi() const { return std::max(mu_plus_detected, mu_minus_detected); }

double curve_mu(const ModelMap& m, int k, double M, double alpha) {
    const GlobalMapCoeffs c = m.coeffs();
    const double ell = std::pow(m.lambda(), k);
    const double s0 = compute_s0(c, nu1_of(m, k)).value;
    const double tail = (M + s0) * ell * ell / c.d;
    if (m.saddle().orientable()) {
        const double b1 = m.saddle().betas().empty() ? 0.0 : m.saddle().betas()[0];
        return -ell * c.y_minus * alpha * (1.0 + k * b1 * ell * c.x_plus * c.y_minus) - tail;
    }
    const double a = k % 2 == 0 ? alpha : alpha + 2.0;
    return -ell * c.y_minus * a - tail;
}

namespace {

double model_alpha(const ModelMap& m) {
    const GlobalMapCoeffs c = m.coeffs();
    return c.c * c.x_plus / c.y_minus - 1.0;
}

// A point of the elliptic branch: rescaled X is the branch parameter, (Y, M) are solved for.
struct BranchPoint {
    double Y = 0.0, M = 0.0, trace = 0.0;
};

struct BranchEval {
    Eigen::Vector2d r;
    double trace = 0.0;
};

BranchEval branch_residual(const ModelMap& m, int k, int period, double X, double Y, double M) {
    const ModelMap mm = m.with_mu(M_to_mu(m, k, M));
    const RescaleChart ch(mm, k);
    const ReturnMap rm(mm, k);
    MapJet j = rm.eval(ch.to_model({X, Y}));
    Mat2 mono = j.jac;
    if (period == 2) {
        j = rm.eval(j.p);
        mono = j.jac * mono;
    }
    const Point q = ch.from_model(j.p);
    return {Eigen::Vector2d(q.x - X, q.y - Y), mono.trace()};
}

std::optional<BranchPoint> solve_branch(const ModelMap& m, int k, int period, double X, double Y, double M) {
    try {
        Eigen::Vector2d z(Y, M);
        BranchEval e = branch_residual(m, k, period, X, z[0], z[1]);
        for (int it = 0; it < 40; ++it) {
            if (e.r.cwiseAbs().maxCoeff() < 1e-13) return BranchPoint{z[0], z[1], e.trace};
            const double h = 1e-7;
            Eigen::Matrix2d J;
            for (int c = 0; c < 2; ++c) {
                Eigen::Vector2d zp = z, zm = z;
                zp[c] += h;
                zm[c] -= h;
                J.col(c) = (branch_residual(m, k, period, X, zp[0], zp[1]).r -
                            branch_residual(m, k, period, X, zm[0], zm[1]).r) / (2 * h);
            }
            const Eigen::Vector2d dz = -J.fullPivLu().solve(e.r);
            double t = 1.0;
            for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
                const Eigen::Vector2d zn = z + t * dz;
                const BranchEval en = branch_residual(m, k, period, X, zn[0], zn[1]);
                if (en.r.norm() < e.r.norm() || ls == 11) {
                    z = zn;
                    e = en;
                    break;
                }
            }
        }
        if (e.r.cwiseAbs().maxCoeff() < 1e-11) return BranchPoint{z[0], z[1], e.trace};
    } catch (const Error&) {
    }
    return std::nullopt;
}

// Branch shapes of the limit maps, s being the parameter.
struct Branch {
    int period = 1;
    bool orient = true;  // fixed point of the orientable limit map
    double X(double s) const { return period == 2 ? -s : s; }
    double Y(double s) const { return s; }
    double M(double s) const { return period == 2 || !orient ? s * s : s * s + 2.0 * s; }
    double s_for_trace(double t) const { return period == 2 ? std::sqrt((2.0 - t) / 4.0) : -t / 2.0; }
};

BranchPoint on_branch(const ModelMap& m, int k, const Branch& b, double s) {
    const auto p = solve_branch(m, k, b.period, b.X(s), b.Y(s), b.M(s));
    if (!p) throw numerical_error("branch lost at s=" + std::to_string(s) + ", k=" + std::to_string(k));
    return *p;
}

// M where the branch trace equals target.
double trace_root(const ModelMap& m, int k, const Branch& b, double target) {
    auto f = [&](double s) { return on_branch(m, k, b, s).trace - target; };
    const double s0 = b.s_for_trace(target);
    double w = 0.15;
    for (int attempt = 0; attempt < 3; ++attempt, w *= 2.0) {
        double lo = s0 - w, hi = s0 + w;
        if (b.period == 2) lo = std::max(lo, 0.2);
        const double flo = f(lo), fhi = f(hi);
        if (flo * fhi > 0.0) continue;
        std::uintmax_t iters = 100;
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                         boost::math::tools::eps_tolerance<double>(50), iters);
        const double s = 0.5 * (r.first + r.second);
        return on_branch(m, k, b, s).M;
    }
    throw numerical_error("trace target " + std::to_string(target) + " not bracketed at k=" + std::to_string(k));
}

}  // namespace

CascadeInterval cascade_interval(const ModelMap& m, int k) {
    CascadeInterval ci;
    ci.k = k;
    ci.kind = cascade_kind(m, k);
    const CascadeTargets t = cascade_targets(ci.kind);
    const double alpha = model_alpha(m);
    ci.mu_plus_formula = curve_mu(m, k, t.M_plus, alpha);
    ci.mu_minus_formula = curve_mu(m, k, t.M_minus, alpha);
    const bool orient = nu1_of(m, k) > 0;
    const Branch fixed{1, orient}, cycle{2, false};
    const Branch& main = uses_two_cycles(ci.kind) ? cycle : fixed;
    try {
        // For 2-cycles the +1 end is where the fixed point has multipliers +-1 (trace 0, det -1).
        const double Mp = uses_two_cycles(ci.kind) ? trace_root(m, k, fixed, 0.0) : trace_root(m, k, fixed, 2.0);
        const double Mm = trace_root(m, k, main, -2.0);
        ci.mu_plus_detected = M_to_mu(m, k, Mp);
        ci.mu_minus_detected = M_to_mu(m, k, Mm);
        for (std::size_t i = 0; i < t.resonance_tags.size(); ++i) {
            ResonanceMu r;
            r.tag = t.resonance_tags[i];
            r.M = t.resonance_M[i];
            r.mu_formula = curve_mu(m, k, r.M, alpha);
            r.mu_detected = M_to_mu(m, k, trace_root(m, k, main, t.resonance_traces[i]));
            ci.resonances.push_back(r);
        }
    } catch (const Error& e) {
        ci.complete = false;
        ci.message = e.what();
    }
    return ci;
}

std::vector<CascadeInterval> cascade_scan(const ModelMap& m, int k_min, int k_max, Exec exec) {
    if (k_min < 1 || k_max < k_min) throw validation_error("bad k range");
    const int n = k_max - k_min + 1;
    std::vector<CascadeInterval> out(n);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (int i = 0; i < n; ++i) out[i] = cascade_interval(m, k_min + i);
    } else {
        for (int i = 0; i < n; ++i) out[i] = cascade_interval(m, k_min + i);
    }
    return out;
}

std::vector<BifCurveSample> bif_curves(const ModelMap& m, int k_min, int k_max, const std::vector<double>& alphas) {
    if (k_min < 1 || k_max < k_min) throw validation_error("bad k range");
    std::vector<BifCurveSample> out;
    for (int k = k_min; k <= k_max; ++k) {
        const CascadeKind kind = cascade_kind(m, k);
        const CascadeTargets t = cascade_targets(kind);
        CurveTag plus = CurveTag::BkPlus, minus = CurveTag::BkMinus;
        switch (kind) {
            case CascadeKind::Ek: break;
            case CascadeKind::Ek2: plus = CurveTag::BkPM1; minus = CurveTag::Bk2Minus; break;
            case CascadeKind::TildeEven: plus = CurveTag::TildePlus; minus = CurveTag::TildeMinus; break;
            case CascadeKind::Tilde2Odd: plus = CurveTag::TildePM1; minus = CurveTag::Tilde2Minus; break;
        }
        for (auto [tag, M] : {std::pair{plus, t.M_plus}, std::pair{minus, t.M_minus}})
            for (double a : alphas) out.push_back({k, tag, a, a + 2.0, curve_mu(m, k, M, a)});
    }
    return out;
}

ResonanceReport global_resonance_check(const ModelMap& m, int k_min, int k_max, Exec exec) {
    if (k_min < 1 || k_max < k_min) throw validation_error("bad k range");
    if (std::abs(m.mu()) > 1e-10) throw validation_error("global resonance check needs mu = 0");
    const double alpha = model_alpha(m);
    const bool near = m.saddle().orientable() ? std::abs(alpha) < 1e-10
                                              : std::min(std::abs(alpha), std::abs(alpha + 2.0)) < 1e-10;
    if (!near) throw validation_error("global resonance check needs alpha = 0 (or alpha + 2 = 0)");

    const int n = k_max - k_min + 1;
    ResonanceReport rep;
    rep.entries.resize(n);
    auto work = [&](int i) {
        const int k = k_min + i;
        ResonanceEntry e;
        e.k = k;
        e.kind = cascade_kind(m, k);
        const bool two = uses_two_cycles(e.kind);
        e.M = mu_to_M(m, k, 0.0);
        e.expected = elliptic_exists(!two, e.M);
        e.limit_trace = e.expected ? elliptic_trace(!two, e.M) : std::nan("");
        const ReturnMap rm(m, k);
        std::optional<FixedPointRecord> rec;
        if (e.expected) {
            try {
                const RescaleChart ch(m, k);
                if (two) {
                    const double s = std::sqrt(e.M);
                    rec = try_find_period2(rm, ch.to_model({-s, s}));
                } else {
                    const double x = -1.0 + std::sqrt(1.0 + e.M);
                    rec = try_find_fixed_point(rm, ch.to_model({x, x}));
                }
            } catch (const Error&) {
                rec.reset();
            }
        }
        auto elliptic = [](const FixedPointRecord& r) {
            return r.stability == Stability::EllipticGeneric || r.stability == Stability::EllipticResonant;
        };
        if (!rec || !elliptic(*rec)) {
            rec.reset();
            for (const auto& r : search_fixed_points(rm, seed_grid(rm), two ? 2 : 1, Exec::Serial))
                if (elliptic(r)) {
                    rec = r;
                    break;
                }
        }
        e.found = rec.has_value();
        e.trace = rec ? rec->trace : std::nan("");
        rep.entries[i] = e;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (int i = 0; i < n; ++i) work(i);
    } else {
        for (int i = 0; i < n; ++i) work(i);
    }

    const GlobalMapCoeffs c = m.coeffs();
    const double s0 = compute_s0(c, 1).value, s0n = compute_s0(c, -1).value;
    for (const auto& e : rep.entries) {
        if (e.found != e.expected) {
            rep.ok = false;
            rep.failures.push_back("k=" + std::to_string(e.k) +
                                   (e.expected ? ": elliptic orbit missing" : ": unexpected elliptic orbit"));
        }
        if (!e.expected) continue;
        const bool two = uses_two_cycles(e.kind);
        const std::vector<double> strong = two ? std::vector<double>{0.5, 0.75, 0.625} : std::vector<double>{0.0, 1.25};
        const double lim = -(two ? s0n : s0);
        for (double r : strong)
            if (std::abs(lim - r) < 1e-9) rep.generic = false;
    }
    return rep;
}

namespace {

GlobalMapCoeffs shift_plus(GlobalMapCoeffs c, double lam, double gam, double b1) {
    const double xp = c.x_plus;
    c.a = lam * c.a + lam * xp * xp * b1 * c.c;
    c.f20 = gam * c.f20 - gam * c.c * c.c * b1 * xp;
    c.x_plus = lam * xp;
    c.b = lam * c.b;
    c.c = gam * c.c;
    c.d = gam * c.d;
    c.f11 = gam * c.f11;
    return c;
}

GlobalMapCoeffs shift_minus(GlobalMapCoeffs c, double lam, double gam, double b1) {
    const double ym = c.y_minus, y2 = ym * ym;
    const double l2 = lam * lam;
    const GlobalMapCoeffs o = c;
    c.y_minus = ym / gam;
    c.a = lam * o.a - o.b * b1 * y2 / gam;
    c.b = gam * o.b;
    c.c = lam * o.c;
    c.f11 = lam * gam * o.f11 - 2.0 * o.d * b1 * y2;
    c.d = o.d * gam * gam;
    c.f20 = o.f20 * l2 - o.f11 * l2 * b1 * y2 + o.d * l2 * b1 * b1 * y2 * y2 + o.c * l2 * b1 * ym;
    return c;
}

GlobalMapCoeffs reflect_x(GlobalMapCoeffs c) {
    c.x_plus = -c.x_plus;
    c.b = -c.b;
    c.c = -c.c;
    c.f11 = -c.f11;
    return c;
}

// The closed forms stated for each step.
double predicted_step(const GlobalMapCoeffs& c, double lg, double b1, PairShift v, int nu1) {
    const double s0 = compute_s0(c, nu1).value;
    const double xp = c.x_plus, ym = c.y_minus;
    if (v == PairShift::Plus) return lg > 0.0 ? s0 : -s0;
    // Minus step.
    if (lg > 0.0) return s0 + c.d * b1 * xp * ym * (c.c * xp - c.b * c.c * ym - ym * (1.0 + nu1));
    const double base = c.d * xp * (c.a * c.c + c.f20 * xp);
    const double fx = -c.f11 * xp;
    return base + 0.5 * fx * (1.0 + nu1 - 0.5 * fx);
}

}  // namespace

GlobalMapCoeffs shift_pair(const GlobalMapCoeffs& c, double lambda, double gamma, double beta1, PairShift v) {
    GlobalMapCoeffs r;
    switch (v) {
        case PairShift::Plus: r = shift_plus(c, lambda, gamma, beta1); break;
        case PairShift::Minus: r = shift_minus(c, lambda, gamma, beta1); break;
        case PairShift::PlusTwice: r = shift_plus(shift_plus(c, lambda, gamma, beta1), lambda, gamma, beta1); break;
        case PairShift::MinusTwice:
            r = shift_minus(shift_minus(c, lambda, gamma, beta1), lambda, gamma, beta1);
            break;
        case PairShift::Mixed:
            if (lambda * gamma > 0.0) throw validation_error("mixed pair shift applies to lambda*gamma = -1");
            r = shift_minus(reflect_x(shift_plus(c, lambda, gamma, beta1)), lambda, gamma, beta1);
            break;
    }
    r.bc_sign = r.b * r.c > 0.0 ? 1 : -1;
    return r;
}

PairInvariance s0_pair_invariance(const GlobalMapCoeffs& c, const SaddleNormalForm& s, PairShift v, int nu1) {
    const double lam = s.lambda(), gam = s.gamma(), lg = s.lambda_gamma();
    const double b1 = s.betas().empty() ? 0.0 : s.betas()[0];
    PairInvariance out;
    out.s0 = compute_s0(c, nu1).value;
    out.s0_shifted = compute_s0(shift_pair(c, lam, gam, b1, v), nu1).value;
    switch (v) {
        case PairShift::Plus:
        case PairShift::Minus: out.predicted = predicted_step(c, lg, b1, v, nu1); break;
        case PairShift::PlusTwice:
        case PairShift::Mixed: out.predicted = out.s0; break;
        case PairShift::MinusTwice:
            if (lg > 0.0) {
                const GlobalMapCoeffs once = shift_minus(c, lam, gam, b1);
                out.predicted = predicted_step(c, lg, b1, PairShift::Minus, nu1) - compute_s0(once, nu1).value +
                                predicted_step(once, lg, b1, PairShift::Minus, nu1);
            } else {
                out.predicted = out.s0;
            }
            break;
    }
    return out;
}

}  // namespace apm

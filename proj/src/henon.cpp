#include "apm/henon.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "apm/error.hpp"

namespace apm {

MapJet henon_eval(Point p, double M, int nu1, double cubic) {
    MapJet r;
    r.p = {p.y, M - nu1 * p.x - p.y * p.y + cubic * p.y * p.y * p.y};
    r.jac << 0.0, 1.0, -static_cast<double>(nu1), -2.0 * p.y + 3.0 * cubic * p.y * p.y;
    return r;
}

namespace {

HenonOrbit orbit_of(std::vector<Point> pts, double M, int nu1) {
    Mat2 J = Mat2::Identity();
    for (const Point& p : pts) J = henon_eval(p, M, nu1).jac * J;
    HenonOrbit o;
    o.trace = J.trace();
    o.stability = classify(o.trace, J.determinant(), static_cast<int>(pts.size()));
    const bool elliptic = o.stability == Stability::EllipticGeneric || o.stability == Stability::EllipticResonant;
    o.psi = elliptic ? std::acos(o.trace / 2.0) : std::numeric_limits<double>::quiet_NaN();
    o.points = std::move(pts);
    return o;
}

void add_tags(HenonAnalysis& h) {
    h.bifurcation_values = henon_bifurcation_values(h.orientable);
    for (const auto& t : h.bifurcation_values)
        if (std::abs(t.M - h.M) < 1e-12) h.tags_at_M.push_back(t.tag);
}

}  // namespace

std::vector<TaggedValue> henon_bifurcation_values(bool orientable) {
    if (orientable)
        return {{"parabolic_plus", -1.0}, {"resonance_1_4", 0.0}, {"resonance_1_3", 1.25}, {"parabolic_minus", 3.0}};
    return {{"parabolic_pm1", 0.0},
            {"resonance_1_4", 0.5},
            {"resonance_acos_m14", 0.625},
            {"resonance_1_3", 0.75},
            {"period_doubling", 1.0}};
}

std::vector<double> resonance_M_values(bool orientable) {
    if (orientable) return {0.0, 1.25};
    return {0.5, 0.625, 0.75};
}

HenonAnalysis analyze_orientable(double M) {
    HenonAnalysis h;
    h.orientable = true;
    h.M = M;
    if (M >= -1.0) {
        const double r = std::sqrt(1.0 + M);
        const double xe = -1.0 + r;
        h.fixed_points.push_back(orbit_of({{xe, xe}}, M, 1));
        if (r > 0.0) {
            const double xs = -1.0 - r;
            h.fixed_points.push_back(orbit_of({{xs, xs}}, M, 1));
        }
    }
    add_tags(h);
    return h;
}

HenonAnalysis analyze_nonorientable(double M) {
    HenonAnalysis h;
    h.orientable = false;
    h.M = M;
    if (M >= 0.0) {
        const double r = std::sqrt(M);
        h.fixed_points.push_back(orbit_of({{-r, -r}}, M, -1));
        if (r > 0.0) {
            h.fixed_points.push_back(orbit_of({{r, r}}, M, -1));
            h.two_cycles.push_back(orbit_of({{-r, r}, {r, -r}}, M, -1));
        }
    }
    add_tags(h);
    return h;
}

double elliptic_trace(bool orientable, double M) {
    return orientable ? 2.0 - 2.0 * std::sqrt(1.0 + M) : 2.0 - 4.0 * M;
}

bool elliptic_exists(bool orientable, double M) {
    const HenonAnalysis h = analyze_henon(orientable, M);
    const auto& orbits = orientable ? h.fixed_points : h.two_cycles;
    for (const auto& o : orbits)
        if (std::abs(o.trace) < 2.0) return true;
    return false;
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double tol) {
    const bool plo = pred(lo);
    if (plo == pred(hi)) throw numerical_error("predicate does not switch on the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) == plo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

HenonOrbit generalized_elliptic_fixed_point(double M, double cubic) {
    if (M < -1.0) throw domain_error("no fixed point for M < -1");
    // x = y with 0 = M - 2x - x^2 + cubic x^3.
    double x = -1.0 + std::sqrt(1.0 + M);
    for (int it = 0; it < 60; ++it) {
        const double f = M - 2.0 * x - x * x + cubic * x * x * x;
        const double fp = -2.0 - 2.0 * x + 3.0 * cubic * x * x;
        const double dx = f / fp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
    }
    const MapJet j = henon_eval({x, x}, M, 1, cubic);
    HenonOrbit o;
    o.points = {{x, x}};
    o.trace = j.jac.trace();
    o.stability = classify(o.trace, j.jac.determinant(), 1);
    o.psi = std::abs(o.trace) < 2.0 ? std::acos(o.trace / 2.0) : std::numeric_limits<double>::quiet_NaN();
    return o;
}

}  // namespace apm

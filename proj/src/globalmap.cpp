#include "apm/globalmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apm/error.hpp"

namespace apm {

CoeffDiagnostics validate_coeffs(const GlobalMapCoeffs& c) {
    CoeffDiagnostics d;
    d.bc_defect = std::abs(std::abs(c.b * c.c) - 1.0);
    d.R = 2.0 * c.a * c.d - c.b * c.f11 - 2.0 * c.c * c.e02;
    auto note = [&](const std::string& what, double v) {
        std::ostringstream os;
        os.precision(17);
        os << what << " (" << v << ")";
        d.messages.push_back(os.str());
    };
    if (d.bc_defect > 1e-12) note("|bc| != 1", d.bc_defect);
    if (std::abs(d.R) > 1e-12) note("R = 2ad - b f11 - 2c e02 != 0", d.R);
    const int sign = c.b * c.c > 0.0 ? 1 : -1;
    if (sign != c.bc_sign) note("bc_sign disagrees with sign(bc)", c.b * c.c);
    if (c.d == 0.0) note("d must be nonzero", c.d);
    if (!(c.x_plus > 0.0) || !(c.y_minus > 0.0)) note("x+ and y- must be positive", std::min(c.x_plus, c.y_minus));
    return d;
}

MapJet eval_T1(const ExactGlobalMap& g, Point p) {
    const double eta = p.y - g.y_minus;
    const double G = g.mu + g.c * p.x + g.d * eta * eta + g.f03 * eta * eta * eta;
    const double Gx = g.c;
    const double Ge = 2.0 * g.d * eta + 3.0 * g.f03 * eta * eta;
    MapJet r;
    r.p = {g.x_plus + g.b * eta - g.sigma * (G - g.mu), G};
    r.jac << -g.sigma * Gx, g.b - g.sigma * Ge, Gx, Ge;
    return r;
}

Point apply_T1(const ExactGlobalMap& g, Point p) { return eval_T1(g, p).p; }

GlobalMapCoeffs taylor_of_T1(const ExactGlobalMap& g) {
    GlobalMapCoeffs c;
    c.x_plus = g.x_plus;
    c.y_minus = g.y_minus;
    c.mu = g.mu;
    c.a = -g.sigma * g.c;
    c.b = g.b;
    c.c = g.c;
    c.d = g.d;
    c.e02 = -g.sigma * g.d;
    c.f03 = g.f03;
    c.bc_sign = g.b * g.c > 0.0 ? 1 : -1;
    return c;
}

MapJet eval_T1(const GlobalMapCoeffs& g, Point p) {
    const double x = p.x, e = p.y - g.y_minus;
    MapJet r;
    r.p = {g.x_plus + g.a * x + g.b * e + g.e20 * x * x + g.e11 * x * e + g.e02 * e * e,
           g.mu + g.c * x + g.d * e * e + g.f20 * x * x + g.f11 * x * e + g.f30 * x * x * x +
               g.f21 * x * x * e + g.f12 * x * e * e + g.f03 * e * e * e};
    r.jac << g.a + 2.0 * g.e20 * x + g.e11 * e, g.b + g.e11 * x + 2.0 * g.e02 * e,
        g.c + 2.0 * g.f20 * x + g.f11 * e + 3.0 * g.f30 * x * x + 2.0 * g.f21 * x * e + g.f12 * e * e,
        2.0 * g.d * e + g.f11 * x + g.f21 * x * x + 2.0 * g.f12 * x * e + 3.0 * g.f03 * e * e;
    return r;
}

namespace {

Chart default_chart(double x_plus, double y_minus) {
    const double e = 0.25 * std::min(x_plus, y_minus);
    return {e, e};
}

}  // namespace

ModelMap::ModelMap(SaddleNormalForm saddle, Global global, int q, std::optional<Chart> chart)
    : saddle_(std::move(saddle)), global_(std::move(global)), q_(q) {
    const GlobalMapCoeffs c = coeffs();
    if (!(c.x_plus > 0.0) || !(c.y_minus > 0.0)) throw validation_error("x_plus and y_minus must be positive");
    if (c.d == 0.0) throw validation_error("d must be nonzero");
    if (std::abs(std::abs(c.b * c.c) - 1.0) > 1e-12) throw validation_error("|bc| must equal 1");
    if (!saddle_.orientable() && c.b * c.c > 0.0)
        throw validation_error("locally non-orientable saddle requires bc = -1");
    if (q < 0) throw validation_error("q must be non-negative");
    chart_ = chart.value_or(default_chart(c.x_plus, c.y_minus));
    if (!(chart_.eps_x > 0.0) || !(chart_.eps_y > 0.0)) throw validation_error("chart half-widths must be positive");
}

double ModelMap::mu() const noexcept {
    return std::visit([](const auto& g) { return g.mu; }, global_);
}

ModelMap ModelMap::with_mu(double mu) const {
    ModelMap m = *this;
    std::visit([mu](auto& g) { g.mu = mu; }, m.global_);
    return m;
}

GlobalMapCoeffs ModelMap::coeffs() const {
    if (const auto* e = std::get_if<ExactGlobalMap>(&global_)) return taylor_of_T1(*e);
    return std::get<GlobalMapCoeffs>(global_);
}

double ModelMap::x_plus() const noexcept {
    return std::visit([](const auto& g) { return g.x_plus; }, global_);
}

double ModelMap::y_minus() const noexcept {
    return std::visit([](const auto& g) { return g.y_minus; }, global_);
}

Box ModelMap::saddle_box() const noexcept {
    return {0.0, 0.0, x_plus() + chart_.eps_x, y_minus() + chart_.eps_y};
}

Box ModelMap::pi_plus() const noexcept { return {x_plus(), 0.0, chart_.eps_x, chart_.eps_y}; }

Box ModelMap::pi_minus() const noexcept { return {0.0, y_minus(), chart_.eps_x, chart_.eps_y}; }

MapJet ModelMap::eval_T1(Point p) const {
    return std::visit([p](const auto& g) { return apm::eval_T1(g, p); }, global_);
}

}  // namespace apm

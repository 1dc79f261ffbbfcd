#include "apm/saddle.hpp"

#include <cmath>
#include <string>

#include "apm/error.hpp"

namespace apm {

SaddleNormalForm::SaddleNormalForm(double lambda, std::vector<double> betas, bool orientable)
    : lambda_(lambda), gamma_(orientable ? 1.0 / lambda : -1.0 / lambda), betas_(std::move(betas)) {
    if (!(std::abs(lambda) > 0.0 && std::abs(lambda) < 1.0))
        throw validation_error("saddle needs 0 < |lambda| < 1");
    if (!orientable)
        for (std::size_t i = 0; i < betas_.size(); i += 2)
            if (betas_[i] != 0.0)
                throw validation_error("odd-index beta must vanish when lambda*gamma = -1 (beta_" +
                                       std::to_string(i + 1) + ")");
}

std::vector<double> SaddleNormalForm::tilde_betas(int n) const {
    // Series of 1/B: r_0 = 1, r_m = -sum_{i=1..m} beta_i r_{m-i}.
    std::vector<double> r(n + 1, 0.0);
    r[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int i = 1; i <= m && i <= static_cast<int>(betas_.size()); ++i) s += betas_[i - 1] * r[m - i];
        r[m] = -s;
    }
    return {r.begin() + 1, r.end()};
}

double SaddleNormalForm::B(double u) const noexcept {
    double s = 0.0;
    for (auto it = betas_.rbegin(); it != betas_.rend(); ++it) s = (s + *it) * u;
    return 1.0 + s;
}

double SaddleNormalForm::dB(double u) const noexcept {
    double s = 0.0;
    const int n = static_cast<int>(betas_.size());
    for (int i = n; i >= 1; --i) s = s * u + i * betas_[i - 1];
    return s;
}

Point apply_T0(const SaddleNormalForm& s, Point p) {
    const double b = s.B(p.x * p.y);
    if (b <= 0.0) throw domain_error("B(xy) <= 0: chart too large for the chosen betas");
    return {s.lambda() * p.x * b, s.gamma() * p.y / b};
}

Point iterate_T0(const SaddleNormalForm& s, Point p, int k, const std::optional<Box>& chart) {
    if (k < 0) throw validation_error("iterate count must be non-negative");
    if (chart && !chart->contains(p)) throw ChartExit(0, "orbit starts outside the chart");
    for (int i = 1; i <= k; ++i) {
        p = apply_T0(s, p);
        if (chart && !chart->contains(p))
            throw ChartExit(i, "orbit leaves the chart at step " + std::to_string(i));
    }
    return p;
}

MapJet T0k(const SaddleNormalForm& s, Point p, int k) {
    const double u = p.x * p.y;
    const double b = s.B(u);
    if (b <= 0.0) throw domain_error("B(xy) <= 0: chart too large for the chosen betas");
    const double lk = std::pow(s.lambda(), k), gk = std::pow(s.gamma(), k);
    const double g = std::pow(b, k);
    const double gp = k == 0 ? 0.0 : k * std::pow(b, k - 1) * s.dB(u);
    MapJet r;
    r.p = {lk * p.x * g, gk * p.y / g};
    r.jac << lk * (g + u * gp), lk * p.x * p.x * gp,
             -gk * p.y * p.y * gp / (g * g), gk * (1.0 / g - u * gp / (g * g));
    return r;
}

namespace {

// Truncated power of a polynomial in one variable, coefficients up to degree n.
std::vector<double> poly_pow(const std::vector<double>& p, long e, int n) {
    std::vector<double> result(n + 1, 0.0), base = p;
    result[0] = 1.0;
    base.resize(n + 1, 0.0);
    auto mul = [n](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(n + 1, 0.0);
        for (int i = 0; i <= n; ++i)
            if (a[i] != 0.0)
                for (int j = 0; i + j <= n; ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    while (e > 0) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

}  // namespace

std::vector<double> exact_hat_betas(std::span<const double> betas, int k, int n) {
    std::vector<double> B(n + 1, 0.0);
    B[0] = 1.0;
    for (int i = 1; i <= n && i <= static_cast<int>(betas.size()); ++i) B[i] = betas[i - 1];
    std::vector<double> out(n, 0.0);
    // Lagrange inversion: [w^m] B(u(w))^k = [u^m] B^(k(m+1)) / (m+1).
    for (int m = 1; m <= n; ++m) out[m - 1] = poly_pow(B, static_cast<long>(k) * (m + 1), m)[m] / (m + 1);
    return out;
}

std::vector<double> hat_betas(std::span<const double> betas, int k, int n) {
    std::vector<double> out = exact_hat_betas(betas, k, n);
    const double b1 = betas.size() > 0 ? betas[0] : 0.0;
    const double b2 = betas.size() > 1 ? betas[1] : 0.0;
    if (n >= 1) out[0] = b1 * k;
    if (n >= 2) out[1] = b1 * b1 * k * k + b2 * k;
    return out;
}

CrossFormResult cross_form_T0k(const SaddleNormalForm& s, double x0, double yk, int k, int n) {
    CrossFormResult r;
    r.k = k;
    r.hat_betas = hat_betas(s.betas(), k, n);
    const double w = std::pow(s.gamma(), -k) * x0 * yk;
    double R = 0.0;
    for (int i = n; i >= 1; --i) R = (R + r.hat_betas[i - 1]) * w;
    R += 1.0;
    r.xk = std::pow(s.lambda(), k) * x0 * R;
    r.y0 = std::pow(s.gamma(), -k) * yk * R;
    return r;
}

ExactCross exact_cross_T0k(const SaddleNormalForm& s, double x0, double yk, int k) {
    const double w = std::pow(s.gamma(), -k) * x0 * yk;
    double u = w;
    for (int it = 0; it < 60; ++it) {
        const double b = s.B(u);
        if (b <= 0.0) throw domain_error("B(xy) <= 0 in cross form");
        const double bk = std::pow(b, k);
        const double f = u - w * bk;
        const double fp = 1.0 - w * k * std::pow(b, k - 1) * s.dB(u);
        const double du = f / fp;
        u -= du;
        if (std::abs(du) <= 1e-17 + 1e-16 * std::abs(u)) break;
    }
    const double bk = std::pow(s.B(u), k);
    return {std::pow(s.lambda(), k) * x0 * bk, std::pow(s.gamma(), -k) * yk * bk, bk};
}

}  // namespace apm

#include "apm/jets.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "apm/error.hpp"

namespace apm {

Jet2::Jet2(int order) : order_(order) {
    if (order < 0) throw validation_error("jet order must be non-negative");
    c_.assign(static_cast<std::size_t>((order + 1) * (order + 2) / 2), 0.0);
}

Jet2 Jet2::constant(int order, double c) {
    Jet2 j(order);
    j.c_[0] = c;
    return j;
}

Jet2 Jet2::x(int order) {
    Jet2 j(order);
    if (order >= 1) j.set(1, 0, 1.0);
    return j;
}

Jet2 Jet2::y(int order) {
    Jet2 j(order);
    if (order >= 1) j.set(0, 1, 1.0);
    return j;
}

double Jet2::coeff(int i, int j) const noexcept {
    if (i < 0 || j < 0 || i + j > order_) return 0.0;
    return c_[index(i, j)];
}

void Jet2::set(int i, int j, double v) {
    if (i < 0 || j < 0 || i + j > order_) throw validation_error("monomial outside jet order");
    c_[index(i, j)] = v;
}

void Jet2::add(int i, int j, double v) {
    if (i < 0 || j < 0 || i + j > order_) return;
    c_[index(i, j)] += v;
}

double Jet2::eval(double x, double y) const {
    // Horner in y inside Horner in x would need a different layout; direct powers are fine at D <= 12.
    std::vector<double> xp(order_ + 1, 1.0), yp(order_ + 1, 1.0);
    for (int k = 1; k <= order_; ++k) {
        xp[k] = xp[k - 1] * x;
        yp[k] = yp[k - 1] * y;
    }
    double s = 0.0;
    for (int n = order_; n >= 0; --n)
        for (int j = 0; j <= n; ++j) s += c_[index(n - j, j)] * xp[n - j] * yp[j];
    return s;
}

Jet2 Jet2::dx() const {
    Jet2 r(std::max(order_ - 1, 0));
    for (int n = 1; n <= order_; ++n)
        for (int j = 0; j < n; ++j) {
            const int i = n - j;
            r.c_[index(i - 1, j)] = i * c_[index(i, j)];
        }
    return r;
}

Jet2 Jet2::dy() const {
    Jet2 r(std::max(order_ - 1, 0));
    for (int n = 1; n <= order_; ++n)
        for (int j = 1; j <= n; ++j) {
            const int i = n - j;
            r.c_[index(i, j - 1)] = j * c_[index(i, j)];
        }
    return r;
}

Jet2 Jet2::truncated(int order) const {
    Jet2 r(order);
    const int m = std::min(order, order_);
    std::copy_n(c_.begin(), (m + 1) * (m + 2) / 2, r.c_.begin());
    return r;
}

Jet2 Jet2::homogeneous_part(int degree) const {
    Jet2 r(order_);
    if (degree < 0 || degree > order_) return r;
    for (int j = 0; j <= degree; ++j) r.c_[index(degree - j, j)] = c_[index(degree - j, j)];
    return r;
}

double Jet2::max_abs() const noexcept { return max_abs_from(0); }

double Jet2::max_abs_from(int min_degree) const noexcept {
    double m = 0.0;
    const auto start = static_cast<std::size_t>(std::max(min_degree, 0) * (std::max(min_degree, 0) + 1) / 2);
    for (std::size_t k = start; k < c_.size(); ++k) m = std::max(m, std::abs(c_[k]));
    return m;
}

Jet2& Jet2::operator+=(const Jet2& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet2& Jet2::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int D = std::min(a.order_, b.order_);
    Jet2 r(D);
    for (int n1 = 0; n1 <= D; ++n1)
        for (int j1 = 0; j1 <= n1; ++j1) {
            const double ca = a.c_[Jet2::index(n1 - j1, j1)];
            if (ca == 0.0) continue;
            for (int n2 = 0; n2 + n1 <= D; ++n2)
                for (int j2 = 0; j2 <= n2; ++j2)
                    r.c_[Jet2::index(n1 - j1 + n2 - j2, j1 + j2)] += ca * b.c_[Jet2::index(n2 - j2, j2)];
        }
    return r;
}

Jet2 compose(const Jet2& f, const Jet2& g, const Jet2& h) {
    const int D = std::min({f.order(), g.order(), h.order()});
    std::vector<Jet2> hp;
    hp.reserve(D + 1);
    hp.push_back(Jet2::constant(D, 1.0));
    for (int j = 1; j <= D; ++j) hp.push_back(hp.back() * h.truncated(D));

    const Jet2 gd = g.truncated(D);
    // Horner in g over rows of fixed x-degree.
    Jet2 acc(D);
    for (int i = f.order(); i >= 0; --i) {
        Jet2 row(D);
        for (int j = 0; i + j <= f.order() && j <= D; ++j) {
            const double c = f.coeff(i, j);
            if (c != 0.0) row += hp[j] * c;
        }
        acc = acc * gd + row;
    }
    return acc;
}

Jet2 reciprocal(const Jet2& f) {
    const double c = f.coeff(0, 0);
    if (c == 0.0) throw numerical_error("reciprocal of a jet with zero constant term");
    Jet2 r = f;
    r.set(0, 0, 0.0);
    r *= -1.0 / c;
    Jet2 sum = Jet2::constant(f.order(), 1.0);
    Jet2 term = sum;
    for (int n = 1; n <= f.order(); ++n) {
        term = term * r;
        sum += term;
    }
    return sum * (1.0 / c);
}

JetMap2 JetMap2::identity(int order) { return {Jet2::x(order), Jet2::y(order), 1.0, 1.0}; }

JetMap2 JetMap2::linear(double lambda, double gamma, int order) {
    return {Jet2::x(order) * lambda, Jet2::y(order) * gamma, lambda, gamma};
}

JetMap2 jet_compose(const JetMap2& outer, const JetMap2& inner) {
    return {compose(outer.fx, inner.fx, inner.fy), compose(outer.fy, inner.fx, inner.fy),
            outer.lambda * inner.lambda, outer.gamma * inner.gamma};
}

Jet2 jet_jacobian_det(const JetMap2& f) {
    if (f.order() < 1) throw validation_error("jacobian needs order >= 1");
    return f.fx.dx() * f.fy.dy() - f.fx.dy() * f.fy.dx();
}

JetMap2 jet_inverse(const JetMap2& f) {
    const int D = f.order();
    if (std::abs(f.fx.coeff(0, 0)) > 0.0 || std::abs(f.fy.coeff(0, 0)) > 0.0)
        throw validation_error("jet inverse needs a germ fixing the origin");
    const double a = f.fx.coeff(1, 0), b = f.fx.coeff(0, 1);
    const double c = f.fy.coeff(1, 0), d = f.fy.coeff(0, 1);
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-14) throw numerical_error("singular linear part");

    Jet2 nx = f.fx.truncated(D), ny = f.fy.truncated(D);
    nx.set(1, 0, 0.0);
    nx.set(0, 1, 0.0);
    ny.set(1, 0, 0.0);
    ny.set(0, 1, 0.0);

    const Jet2 X = Jet2::x(D), Y = Jet2::y(D);
    auto linv = [&](const Jet2& u, const Jet2& v) {
        return std::pair{(u * d - v * b) * (1.0 / det), (v * a - u * c) * (1.0 / det)};
    };
    auto [gx, gy] = linv(X, Y);
    for (int it = 0; it < D; ++it) {
        auto next = linv(X - compose(nx, gx, gy), Y - compose(ny, gx, gy));
        gx = std::move(next.first);
        gy = std::move(next.second);
    }
    return {gx, gy, 1.0 / f.lambda, 1.0 / f.gamma};
}

double jet_distance(const JetMap2& a, const JetMap2& b) {
    return std::max((a.fx - b.fx).max_abs(), (a.fy - b.fy).max_abs());
}

namespace {

struct GeneratorParts {
    Jet2 wx;    // dW/dx
    Jet2 weta;  // dW/deta
};

GeneratorParts split_generator(const Jet2& V, int order) {
    if (V.order() < 2) throw validation_error("generating function needs order >= 2");
    if (std::abs(V.coeff(1, 1) - 1.0) > 1e-14)
        throw validation_error("generating function must have unit x*eta coefficient");
    if (V.coeff(0, 0) != 0.0 || V.coeff(1, 0) != 0.0 || V.coeff(0, 1) != 0.0)
        throw validation_error("generating function must start at degree 2");
    Jet2 W = V.truncated(std::max(V.order(), order + 1));
    W.set(1, 1, 0.0);
    return {W.dx().truncated(order), W.dy().truncated(order)};
}

}  // namespace

JetMap2 canonical_change(const Jet2& V, int order) {
    const auto [wx, weta] = split_generator(V, order);
    const Jet2 X = Jet2::x(order), Y = Jet2::y(order);
    // y = eta + W_x(x, eta): fixed point on eta, each pass fixes one more degree.
    Jet2 eta = Y;
    for (int it = 0; it <= order; ++it) {
        Jet2 next = Y - compose(wx, X, eta);
        const bool done = (next - eta).max_abs() == 0.0;
        eta = std::move(next);
        if (done) break;
    }
    Jet2 xi = X + compose(weta, X, eta);
    return {xi, eta, 1.0, 1.0};
}

JetMap2 canonical_change_inverse(const Jet2& V, int order) {
    const auto [wx, weta] = split_generator(V, order);
    const Jet2 Xi = Jet2::x(order), Eta = Jet2::y(order);
    Jet2 x = Xi;
    for (int it = 0; it <= order; ++it) {
        Jet2 next = Xi - compose(weta, x, Eta);
        const bool done = (next - x).max_abs() == 0.0;
        x = std::move(next);
        if (done) break;
    }
    Jet2 y = Eta + compose(wx, x, Eta);
    return {x, y, 1.0, 1.0};
}

JetMap2 apply_generating(const JetMap2& F, const Jet2& V) {
    const int D = F.order();
    const JetMap2 H = canonical_change(V, D);
    const JetMap2 Hinv = canonical_change_inverse(V, D);
    JetMap2 r = jet_compose(H, jet_compose(F, Hinv));
    r.lambda = F.lambda;
    r.gamma = F.gamma;
    return r;
}

JetMap2 birkhoff_jet(double lambda, double gamma, std::span<const double> betas, int order) {
    const Jet2 X = Jet2::x(order), Y = Jet2::y(order);
    const Jet2 u = X * Y;
    Jet2 B = Jet2::constant(order, 1.0);
    Jet2 up = Jet2::constant(order, 1.0);
    for (double b : betas) {
        up = up * u;
        B += up * b;
    }
    return {X * B * lambda, Y * reciprocal(B) * gamma, lambda, gamma};
}

bool resonant_monomial(bool x_component, int p, int q, double lambda_gamma) {
    // x(xy)^i in the first component, y(xy)^i in the second; odd i drop out when lambda*gamma < 0.
    const int i = x_component ? q : p;
    const bool shape = x_component ? (p == q + 1) : (q == p + 1);
    if (!shape) return false;
    return lambda_gamma > 0.0 || i % 2 == 0;
}

double nonresonant_residual(const JetMap2& f, int max_degree) {
    const double lg = f.lambda * f.gamma;
    double r = 0.0;
    for (int n = 2; n <= std::min(max_degree, f.order()); ++n)
        for (int q = 0; q <= n; ++q) {
            const int p = n - q;
            if (!resonant_monomial(true, p, q, lg)) r = std::max(r, std::abs(f.fx.coeff(p, q)));
            if (!resonant_monomial(false, p, q, lg)) r = std::max(r, std::abs(f.fy.coeff(p, q)));
        }
    return r;
}

NormalFormResult normal_form_reduce(const JetMap2& F, int n, const NormalFormOptions& opts) {
    const int D = F.order();
    const double lam = F.lambda, gam = F.gamma;
    if (n < 1) throw validation_error("normal form order n must be >= 1");
    if (2 * n + 1 > D) throw validation_error("truncation order too small for requested normal form order");
    if (!(std::abs(lam) > 0.0 && std::abs(lam) < 1.0 && std::abs(gam) > 1.0))
        throw validation_error("normal form needs 0 < |lambda| < 1 < |gamma|");
    if (std::abs(std::abs(lam * gam) - 1.0) > 1e-12) throw validation_error("|lambda*gamma| must equal 1");
    const double tol = 1e-12;
    if (std::abs(F.fx.coeff(1, 0) - lam) > tol || std::abs(F.fy.coeff(0, 1) - gam) > tol ||
        std::abs(F.fx.coeff(0, 1)) > tol || std::abs(F.fy.coeff(1, 0)) > tol)
        throw validation_error("linear part must be diag(lambda, gamma)");

    const double lg = lam * gam;
    std::mt19937_64 rng(opts.kernel_seed.value_or(0));
    std::uniform_real_distribution<double> uni(-opts.kernel_scale, opts.kernel_scale);

    JetMap2 G = F;
    JetMap2 change = JetMap2::identity(D);
    for (int m = 2; m <= 2 * n + 1; ++m) {
        Jet2 V(D + 1);
        V.set(1, 1, 1.0);
        bool any = false;
        for (int q = 0; q <= m; ++q) {
            const int p = m - q;
            // x^p y^q in the first component is driven by x^p eta^(q+1).
            if (resonant_monomial(true, p, q, lg)) {
                if (opts.kernel_seed) {
                    V.add(p, q + 1, uni(rng));
                    any = true;
                }
                continue;
            }
            const double c = G.fx.coeff(p, q);
            if (c == 0.0) continue;
            const double div = std::pow(lam, p) * std::pow(gam, q) - lam;
            if (std::abs(div) < 1e-8) throw numerical_error("near-resonant homological divisor");
            V.add(p, q + 1, -c / ((q + 1) * div));
            any = true;
        }
        // x^m in the second component is driven by x^(m+1), absent from the first equation.
        {
            const double c = G.fy.coeff(m, 0);
            const double div = std::pow(lam, m) - gam;
            if (c != 0.0) {
                if (std::abs(div) < 1e-8) throw numerical_error("near-resonant homological divisor");
                V.add(m + 1, 0, c / ((m + 1) * div));
                any = true;
            }
        }
        if (!any) continue;
        const JetMap2 H = canonical_change(V, D);
        const JetMap2 Hinv = canonical_change_inverse(V, D);
        G = jet_compose(H, jet_compose(G, Hinv));
        G.lambda = lam;
        G.gamma = gam;
        change = jet_compose(H, change);
    }
    // Rounding in the large compositions leaves non-resonant terms near 1e-12 that only area preservation
    // would cancel. A general near-identity change removes them degree by degree.
    for (int m = 2; m <= 2 * n + 1; ++m) {
        JetMap2 P = JetMap2::identity(D);
        bool any = false;
        for (int q = 0; q <= m; ++q) {
            const int p = m - q;
            const double mult = std::pow(lam, p) * std::pow(gam, q);
            if (!resonant_monomial(true, p, q, lg) && G.fx.coeff(p, q) != 0.0) {
                P.fx.add(p, q, -G.fx.coeff(p, q) / (mult - lam));
                any = true;
            }
            if (!resonant_monomial(false, p, q, lg) && G.fy.coeff(p, q) != 0.0) {
                P.fy.add(p, q, -G.fy.coeff(p, q) / (mult - gam));
                any = true;
            }
        }
        if (!any) continue;
        G = jet_compose(P, jet_compose(G, jet_inverse(P)));
        G.lambda = lam;
        G.gamma = gam;
        change = jet_compose(P, change);
    }

    NormalFormResult res;
    res.betas.resize(n);
    res.tilde_betas.resize(n);
    for (int i = 1; i <= n; ++i) {
        res.betas[i - 1] = G.fx.coeff(i + 1, i) / lam;
        res.tilde_betas[i - 1] = G.fy.coeff(i, i + 1) / gam;
    }
    change.lambda = 1.0;
    change.gamma = 1.0;
    res.change = std::move(change);
    res.reduced = std::move(G);
    return res;
}

}  // namespace apm

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace apm {

// Truncated bivariate power series in (x, y); keeps monomials with i + j <= order.
class Jet2 {
public:
    Jet2() = default;
    explicit Jet2(int order);

    static Jet2 constant(int order, double c);
    static Jet2 x(int order);
    static Jet2 y(int order);

    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return c_.size(); }

    // Coefficient of x^i y^j; zero outside the represented range.
    double coeff(int i, int j) const noexcept;
    void set(int i, int j, double v);
    void add(int i, int j, double v);

    double eval(double x, double y) const;
    Jet2 dx() const;
    Jet2 dy() const;
    Jet2 truncated(int order) const;
    Jet2 homogeneous_part(int degree) const;
    double max_abs() const noexcept;
    double max_abs_from(int min_degree) const noexcept;

    Jet2& operator+=(const Jet2& o);
    Jet2& operator-=(const Jet2& o);
    Jet2& operator*=(double s);

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
    friend Jet2 operator*(const Jet2& a, const Jet2& b);
    friend Jet2 operator-(Jet2 a) { return a *= -1.0; }

private:
    static std::size_t index(int i, int j) noexcept {
        const int n = i + j;
        return static_cast<std::size_t>(n * (n + 1) / 2 + j);
    }

    int order_ = 0;
    std::vector<double> c_{0.0};
};

// f(g, h); exact on represented degrees when g and h have no constant term.
Jet2 compose(const Jet2& f, const Jet2& g, const Jet2& h);

// 1 / f for f with nonzero constant term.
Jet2 reciprocal(const Jet2& f);

struct JetMap2 {
    Jet2 fx;
    Jet2 fy;
    double lambda = 1.0;
    double gamma = 1.0;

    int order() const noexcept { return fx.order() < fy.order() ? fx.order() : fy.order(); }
    static JetMap2 identity(int order);
    static JetMap2 linear(double lambda, double gamma, int order);
};

JetMap2 jet_compose(const JetMap2& outer, const JetMap2& inner);
Jet2 jet_jacobian_det(const JetMap2& f);

// Degree-by-degree inverse of a germ with invertible linear part.
JetMap2 jet_inverse(const JetMap2& f);

// Largest coefficient of a - b over both components.
double jet_distance(const JetMap2& a, const JetMap2& b);

// Change (x, y) -> (xi, eta) defined by xi = dV/deta, y = dV/dx; V must be x*eta plus terms of degree >= 2.
JetMap2 canonical_change(const Jet2& V, int order);
JetMap2 canonical_change_inverse(const Jet2& V, int order);

// H o F o H^-1 with H the canonical change of V.
JetMap2 apply_generating(const JetMap2& F, const Jet2& V);

// x' = lambda x B(xy), y' = gamma y / B(xy) with B = 1 + sum betas[i] (xy)^(i+1).
JetMap2 birkhoff_jet(double lambda, double gamma, std::span<const double> betas, int order);

struct NormalFormResult {
    std::vector<double> betas;
    std::vector<double> tilde_betas;
    JetMap2 change;
    JetMap2 reduced;
};

struct NormalFormOptions {
    // When set, resonant generator terms are filled with seeded random values; the
    // invariant coefficients must not depend on this choice.
    std::optional<std::uint64_t> kernel_seed;
    double kernel_scale = 0.1;
};

NormalFormResult normal_form_reduce(const JetMap2& F, int n, const NormalFormOptions& opts = {});

// Whether x^p y^q is a resonant monomial of the given component.
bool resonant_monomial(bool x_component, int p, int q, double lambda_gamma);

// Largest non-resonant nonlinear coefficient of degree <= max_degree.
double nonresonant_residual(const JetMap2& f, int max_degree);

}  // namespace apm

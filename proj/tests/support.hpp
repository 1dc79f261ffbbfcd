#pragma once

#include <optional>
#include <random>

#include "apm/globalmap.hpp"
#include "apm/jets.hpp"

namespace apm::test {

// Reference symplectic model: lambda = 1/2, c = 1, b = -1, d = 1, x+ = y- = 1.
inline ModelMap reference_model(double sigma = 1.0, double f03 = 0.2, double x_plus = 1.0, double mu = 0.0) {
    ExactGlobalMap g;
    g.x_plus = x_plus;
    g.y_minus = 1.0;
    g.mu = mu;
    g.b = -1.0;
    g.c = 1.0;
    g.d = 1.0;
    g.sigma = sigma;
    g.f03 = f03;
    return ModelMap(SaddleNormalForm(0.5, {}), g);
}

inline ModelMap make_model(double lambda, bool orientable, double b, double c, double d, double x_plus,
                           double y_minus, double sigma = 0.0, double f03 = 0.0, double mu = 0.0,
                           std::vector<double> betas = {}, std::optional<Chart> chart = std::nullopt) {
    ExactGlobalMap g{x_plus, y_minus, mu, b, c, d, sigma, f03};
    return ModelMap(SaddleNormalForm(lambda, std::move(betas), orientable), g, 1, chart);
}

// Random generating function x*eta + sum of monomials of degree 3..max_degree.
inline Jet2 random_generator(std::mt19937_64& rng, int max_degree, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Jet2 V(max_degree);
    V.set(1, 1, 1.0);
    for (int n = 3; n <= max_degree; ++n)
        for (int j = 0; j <= n; ++j) V.set(n - j, j, u(rng));
    return V;
}

// Linear saddle composed with a random canonical change: exact |Jacobian| = 1 on represented degrees.
inline JetMap2 random_area_preserving_jet(std::mt19937_64& rng, double lambda, double gamma, int order, double scale) {
    const Jet2 V = random_generator(rng, order + 1, scale);
    const JetMap2 H = canonical_change(V, order);
    JetMap2 f = jet_compose(JetMap2::linear(lambda, gamma, order), H);
    f.lambda = lambda;
    f.gamma = gamma;
    return f;
}

}  // namespace apm::test

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "apm/geometry.hpp"

namespace apm {

// Local map x' = lambda x B(xy), y' = gamma y / B(xy), B(u) = 1 + sum betas[i] u^(i+1).
class SaddleNormalForm {
public:
    // gamma is 1/lambda when orientable, -1/lambda otherwise.
    SaddleNormalForm(double lambda, std::vector<double> betas, bool orientable = true);

    double lambda() const noexcept { return lambda_; }
    double gamma() const noexcept { return gamma_; }
    double lambda_gamma() const noexcept { return lambda_ * gamma_; }
    bool orientable() const noexcept { return lambda_gamma() > 0.0; }
    std::span<const double> betas() const noexcept { return betas_; }
    // Coefficients of 1/B; these are the tilde betas of the y-component.
    std::vector<double> tilde_betas(int n) const;

    double B(double u) const noexcept;
    double dB(double u) const noexcept;

private:
    double lambda_;
    double gamma_;
    std::vector<double> betas_;
};

Point apply_T0(const SaddleNormalForm& s, Point p);

// k-fold composition, stepping one iterate at a time; throws ChartExit when a box is given and left.
Point iterate_T0(const SaddleNormalForm& s, Point p, int k, const std::optional<Box>& chart = std::nullopt);

// Closed form of T0^k and its differential (B(xy) is constant along orbits up to the sign of xy).
MapJet T0k(const SaddleNormalForm& s, Point p, int k);

struct CrossFormResult {
    double xk = 0.0;
    double y0 = 0.0;
    int k = 0;
    std::vector<double> hat_betas;
};

// hat beta_1 = beta_1 k, hat beta_2 = beta_1^2 k^2 + beta_2 k; higher orders from the exact series.
std::vector<double> hat_betas(std::span<const double> betas, int k, int n);

// Exact coefficients c_i of B(u)^k in powers of w, where u = w B(u)^k.
std::vector<double> exact_hat_betas(std::span<const double> betas, int k, int n);

// Truncated cross form: (x0, yk) -> (xk, y0) through the finite sum of order n.
CrossFormResult cross_form_T0k(const SaddleNormalForm& s, double x0, double yk, int k, int n);

// Exact cross form: solves u = gamma^-k x0 yk B(u)^k; returns (xk, y0) and the value B(u)^k.
struct ExactCross {
    double xk;
    double y0;
    double Bk;
};
ExactCross exact_cross_T0k(const SaddleNormalForm& s, double x0, double yk, int k);

}  // namespace apm

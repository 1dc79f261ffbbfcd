#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "apm/geometry.hpp"
#include "apm/saddle.hpp"

namespace apm {

// Taylor data of the global map at (0, y-); eta = y - y-.
//   x' - x+ = a x + b eta + e20 x^2 + e11 x eta + e02 eta^2
//   y'      = mu + c x + d eta^2 + f20 x^2 + f11 x eta + f30 x^3 + f21 x^2 eta + f12 x eta^2 + f03 eta^3
struct GlobalMapCoeffs {
    double x_plus = 1.0;
    double y_minus = 1.0;
    double mu = 0.0;
    double a = 0.0, b = -1.0, c = 1.0, d = 1.0;
    double e20 = 0.0, e11 = 0.0, e02 = 0.0;
    double f20 = 0.0, f11 = 0.0, f30 = 0.0, f21 = 0.0, f12 = 0.0, f03 = 0.0;
    int bc_sign = -1;
};

struct CoeffDiagnostics {
    double bc_defect = 0.0;  // ||bc| - 1|
    double R = 0.0;          // 2ad - b f11 - 2c e02
    std::vector<std::string> messages;
    bool clean() const noexcept { return messages.empty(); }
};

CoeffDiagnostics validate_coeffs(const GlobalMapCoeffs& c);

// x' = x+ + b eta - sigma (G - mu), y' = G = mu + c x + d eta^2 + f03 eta^3.
// Subtracting mu keeps the homoclinic image at x+ for every mu; the Jacobian is -bc everywhere.
struct ExactGlobalMap {
    double x_plus = 1.0;
    double y_minus = 1.0;
    double mu = 0.0;
    double b = -1.0, c = 1.0, d = 1.0;
    double sigma = 0.0;
    double f03 = 0.0;
};

MapJet eval_T1(const ExactGlobalMap& g, Point p);
Point apply_T1(const ExactGlobalMap& g, Point p);
GlobalMapCoeffs taylor_of_T1(const ExactGlobalMap& g);

// Truncated polynomial global map built straight from Taylor data (test mode).
MapJet eval_T1(const GlobalMapCoeffs& g, Point p);

struct Chart {
    double eps_x = 0.0;
    double eps_y = 0.0;
};

class ModelMap {
public:
    using Global = std::variant<ExactGlobalMap, GlobalMapCoeffs>;

    ModelMap(SaddleNormalForm saddle, Global global, int q = 1, std::optional<Chart> chart = std::nullopt);

    const SaddleNormalForm& saddle() const noexcept { return saddle_; }
    const Global& global() const noexcept { return global_; }
    bool exact() const noexcept { return std::holds_alternative<ExactGlobalMap>(global_); }
    int q() const noexcept { return q_; }
    const Chart& chart() const noexcept { return chart_; }

    double mu() const noexcept;
    ModelMap with_mu(double mu) const;
    GlobalMapCoeffs coeffs() const;

    double lambda() const noexcept { return saddle_.lambda(); }
    double gamma() const noexcept { return saddle_.gamma(); }
    double x_plus() const noexcept;
    double y_minus() const noexcept;

    Box saddle_box() const noexcept;
    Box pi_plus() const noexcept;
    Box pi_minus() const noexcept;

    MapJet eval_T1(Point p) const;

private:
    SaddleNormalForm saddle_;
    Global global_;
    int q_;
    Chart chart_;
};

}  // namespace apm

#pragma once

#include <vector>

#include "apm/geometry.hpp"
#include "apm/globalmap.hpp"
#include "apm/parallel.hpp"

namespace apm {

struct S0Invariant {
    double value = 0.0;
    int nu1 = 1;
};

// s0 = d x+ (a c + f20 x+) + (1/2) f11 x+ (1 + nu1 - (1/2) f11 x+).
S0Invariant compute_s0(const GlobalMapCoeffs& c, int nu1);

int nu1_of(const ModelMap& m, int k);
int nu2_of(const ModelMap& m, int k);

double mu_to_M(const ModelMap& m, int k);
double mu_to_M(const ModelMap& m, int k, double mu);
double M_to_mu(const ModelMap& m, int k, double M);

// Affine chart between cross coordinates (x0, yk) of T_k and the generalized Henon coordinates (X, Y).
class RescaleChart {
public:
    RescaleChart(const ModelMap& m, int k);

    int k() const noexcept { return k_; }
    int nu1() const noexcept { return nu1_; }
    int nu2() const noexcept { return nu2_; }
    double M() const noexcept { return M_; }
    double cubic_coeff() const noexcept { return cubic_; }

    Point to_rescaled(Point cross) const;
    Point from_rescaled(Point XY) const;
    // Model coordinates (x0, y0) of a rescaled point, through the exact cross form.
    Point to_model(Point XY) const;
    Point from_model(Point p0) const;

private:
    const ModelMap* m_;
    int k_;
    int nu1_, nu2_;
    double M_, cubic_;
    double ell_, g_, eps_;
    double xp_, ym_, a_, b_, D_, kappa_, p_, q_, h_;
};

struct RescaledMap {
    int k = 0;
    int nu1 = 1;
    int nu2 = 1;
    double M = 0.0;
    double cubic_coeff = 0.0;
    double residual_bound = 0.0;
    double ball_radius = 2.0;
    double xy_coeff = 0.0;  // least-squares XY coefficient of the second component
};

// Samples a 41 x 41 grid over the disk of the given radius; throws Domain when the chart overflows.
RescaledMap rescaled_Tk(const ModelMap& m, int k, double ball_radius = 2.0, int grid = 41);

std::vector<RescaledMap> rescale_sweep(const ModelMap& m, int k_min, int k_max, double ball_radius = 2.0,
                                       Exec exec = Exec::Parallel);

// Deterministic seed grid (n x n) over the rescaled square of half-width radius, mapped to model coordinates.
std::vector<Point> rescaled_seed_grid(const ModelMap& m, int k, double radius = 3.0, int n = 16);

}  // namespace apm

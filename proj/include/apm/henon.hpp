#pragma once

#include <functional>
#include <string>
#include <vector>

#include "apm/geometry.hpp"
#include "apm/retmap.hpp"

namespace apm {

// X' = Y, Y' = M - nu1 X - Y^2 + cubic Y^3; nu1 = +1 is the orientable map, -1 the non-orientable one.
MapJet henon_eval(Point p, double M, int nu1, double cubic = 0.0);

struct HenonOrbit {
    std::vector<Point> points;
    double trace = 0.0;
    Stability stability = Stability::Saddle;
    double psi = 0.0;  // NaN unless elliptic
};

struct TaggedValue {
    std::string tag;
    double M;
};

struct HenonAnalysis {
    bool orientable = true;
    double M = 0.0;
    std::vector<HenonOrbit> fixed_points;
    std::vector<HenonOrbit> two_cycles;
    std::vector<TaggedValue> bifurcation_values;
    std::vector<std::string> tags_at_M;
};

HenonAnalysis analyze_orientable(double M);
HenonAnalysis analyze_nonorientable(double M);
inline HenonAnalysis analyze_henon(bool orientable, double M) {
    return orientable ? analyze_orientable(M) : analyze_nonorientable(M);
}

std::vector<double> resonance_M_values(bool orientable);
std::vector<TaggedValue> henon_bifurcation_values(bool orientable);

// Elliptic-branch trace as a closed form: 2 - 2 sqrt(1 + M) (orientable fixed point) or 2 - 4M (2-cycle).
double elliptic_trace(bool orientable, double M);

// Bisection on a monotone predicate switching inside [lo, hi].
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double tol = 1e-13);

// Whether the limit map has an elliptic orbit (fixed point if orientable, 2-cycle otherwise).
bool elliptic_exists(bool orientable, double M);

// Fixed point of the cubic-perturbed orientable map continued from the cubic-free elliptic branch.
HenonOrbit generalized_elliptic_fixed_point(double M, double cubic);

}  // namespace apm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apm/geometry.hpp"
#include "apm/globalmap.hpp"
#include "apm/parallel.hpp"

namespace apm {

class ReturnMap {
public:
    ReturnMap(const ModelMap& model, int k);

    const ModelMap& model() const noexcept { return *model_; }
    int k() const noexcept { return k_; }
    // gamma^k, the y-scale of the strip.
    double y_scale() const noexcept { return gk_; }

    // T1 o T0^k with chain-rule differential; throws ChartExit when the orbit leaves the chart.
    MapJet eval(Point p) const;
    // Same without chart checks (B(xy) > 0 still required).
    MapJet eval_unchecked(Point p) const;
    bool in_strip_domain(Point p) const;

private:
    const ModelMap* model_;
    int k_;
    double gk_;
};

inline MapJet eval_Tk(const ReturnMap& rm, Point p) { return rm.eval(p); }

enum class Stability { EllipticGeneric, EllipticResonant, ParabolicPlus, ParabolicMinus, Saddle, SaddleReflection };

std::string to_string(Stability s);

struct FixedPointRecord {
    Point point;
    int period = 1;
    double trace = 0.0;
    double det = 0.0;
    Stability stability = Stability::Saddle;
    double rotation = 0.0;  // psi when elliptic, NaN otherwise
    std::vector<Point> orbit;
};

Stability classify(double trace, double det, int period);
FixedPointRecord make_record(std::vector<Point> orbit, const Mat2& monodromy);

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
};

std::optional<FixedPointRecord> try_find_fixed_point(const ReturnMap& rm, Point seed, const NewtonOptions& = {});
FixedPointRecord find_fixed_point(const ReturnMap& rm, Point seed, const NewtonOptions& = {});

std::optional<FixedPointRecord> try_find_period2(const ReturnMap& rm, Point seed, const NewtonOptions& = {});
FixedPointRecord find_period2(const ReturnMap& rm, Point seed, const NewtonOptions& = {});

// Deterministic n x n grid over the strip: x over the Pi+ window, y over gamma^-k [y- - eps_y, y- + eps_y].
std::vector<Point> seed_grid(const ReturnMap& rm, int n = 32);

// Runs Newton from every seed and keeps distinct roots (scaled distance > 1e-8).
std::vector<FixedPointRecord> search_fixed_points(const ReturnMap& rm, const std::vector<Point>& seeds, int period,
                                                  Exec exec = Exec::Parallel);

}  // namespace apm

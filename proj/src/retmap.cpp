#include "apm/retmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apm/error.hpp"

namespace apm {

ReturnMap::ReturnMap(const ModelMap& model, int k) : model_(&model), k_(k), gk_(std::pow(model.gamma(), k)) {
    if (k < 0) throw validation_error("return map index k must be >= 0");
}

MapJet ReturnMap::eval_unchecked(Point p) const {
    const MapJet loc = T0k(model_->saddle(), p, k_);
    const MapJet glob = model_->eval_T1(loc.p);
    return {glob.p, glob.jac * loc.jac};
}

MapJet ReturnMap::eval(Point p) const {
    const Box box = model_->saddle_box();
    if (k_ > 0 && !box.contains(p)) throw ChartExit(0, "return map seed outside the saddle chart");
    const MapJet loc = T0k(model_->saddle(), p, k_);
    if (!model_->pi_minus().contains(loc.p)) {
        int step = k_;
        for (int j = 1; j <= k_; ++j)
            if (!box.contains(T0k(model_->saddle(), p, j).p)) {
                step = j;
                break;
            }
        throw ChartExit(step, "orbit does not land in Pi- (exit at step " + std::to_string(step) + ")");
    }
    const MapJet glob = model_->eval_T1(loc.p);
    return {glob.p, glob.jac * loc.jac};
}

bool ReturnMap::in_strip_domain(Point p) const {
    if (!model_->pi_plus().contains(p)) return false;
    try {
        return model_->pi_minus().contains(T0k(model_->saddle(), p, k_).p);
    } catch (const Error&) {
        return false;
    }
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::EllipticGeneric: return "elliptic";
        case Stability::EllipticResonant: return "elliptic_resonant";
        case Stability::ParabolicPlus: return "parabolic_plus";
        case Stability::ParabolicMinus: return "parabolic_minus";
        case Stability::Saddle: return "saddle";
        case Stability::SaddleReflection: return "saddle_reflection";
    }
    return "unknown";
}

Stability classify(double trace, double det, int period) {
    if (det < 0.0) return Stability::SaddleReflection;
    if (std::abs(trace - 2.0) < 1e-6) return Stability::ParabolicPlus;
    if (std::abs(trace + 2.0) < 1e-6) return Stability::ParabolicMinus;
    if (std::abs(trace) < 2.0) {
        const bool resonant = std::abs(trace) < 1e-9 || std::abs(trace + 1.0) < 1e-9 ||
                              (period == 2 && std::abs(trace + 0.5) < 1e-9);
        return resonant ? Stability::EllipticResonant : Stability::EllipticGeneric;
    }
    return Stability::Saddle;
}

FixedPointRecord make_record(std::vector<Point> orbit, const Mat2& monodromy) {
    auto first = std::min_element(orbit.begin(), orbit.end(), [](Point a, Point b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    std::rotate(orbit.begin(), first, orbit.end());
    FixedPointRecord r;
    r.point = orbit.front();
    r.period = static_cast<int>(orbit.size());
    r.trace = monodromy.trace();
    r.det = monodromy.determinant();
    r.stability = classify(r.trace, r.det, r.period);
    const bool elliptic = r.stability == Stability::EllipticGeneric || r.stability == Stability::EllipticResonant;
    r.rotation = elliptic ? std::acos(r.trace / 2.0) : std::numeric_limits<double>::quiet_NaN();
    r.orbit = std::move(orbit);
    return r;
}

namespace {

struct PeriodicJet {
    Point image;
    Mat2 jac;
    std::vector<Point> orbit;
};

PeriodicJet eval_power(const ReturnMap& rm, Point p, int period, bool checked) {
    PeriodicJet r{p, Mat2::Identity(), {}};
    for (int i = 0; i < period; ++i) {
        r.orbit.push_back(r.image);
        const MapJet m = checked ? rm.eval(r.image) : rm.eval_unchecked(r.image);
        r.jac = m.jac * r.jac;
        r.image = m.p;
    }
    return r;
}

std::optional<FixedPointRecord> newton_periodic(const ReturnMap& rm, Point p, int period, const NewtonOptions& opt) {
    const double g = rm.y_scale();
    const Box box = rm.model().saddle_box();
    const double lim_x = 10.0 * box.hx, lim_y = 10.0 * box.hy;
    for (int it = 0; it <= opt.max_iter; ++it) {
        PeriodicJet pj;
        try {
            pj = eval_power(rm, p, period, false);
        } catch (const Error&) {
            return std::nullopt;
        }
        const Eigen::Vector2d r((pj.image.x - p.x), g * (pj.image.y - p.y));
        if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return std::nullopt;
        if (r.cwiseAbs().maxCoeff() < opt.tol) {
            try {
                pj = eval_power(rm, p, period, true);
            } catch (const ChartExit&) {
                return std::nullopt;
            } catch (const Error&) {
                return std::nullopt;
            }
            if (period == 2) {
                const double sep = std::max(std::abs(pj.orbit[1].x - p.x), std::abs(g * (pj.orbit[1].y - p.y)));
                if (sep < 1e-8) return std::nullopt;
            }
            return make_record(pj.orbit, pj.jac);
        }
        if (it == opt.max_iter) break;
        Mat2 A = pj.jac - Mat2::Identity();
        A.row(1) *= g;
        A.col(1) /= g;
        const double det = A.determinant();
        if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
        const Eigen::Vector2d dz = -A.partialPivLu().solve(r);
        p.x += dz[0];
        p.y += dz[1] / g;
        if (!(std::abs(p.x) < lim_x + std::abs(box.cx)) || !(std::abs(p.y) < lim_y)) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::optional<FixedPointRecord> try_find_fixed_point(const ReturnMap& rm, Point seed, const NewtonOptions& opt) {
    return newton_periodic(rm, seed, 1, opt);
}

FixedPointRecord find_fixed_point(const ReturnMap& rm, Point seed, const NewtonOptions& opt) {
    if (auto r = try_find_fixed_point(rm, seed, opt)) return *r;
    throw numerical_error("fixed point Newton did not converge inside the chart");
}

std::optional<FixedPointRecord> try_find_period2(const ReturnMap& rm, Point seed, const NewtonOptions& opt) {
    return newton_periodic(rm, seed, 2, opt);
}

FixedPointRecord find_period2(const ReturnMap& rm, Point seed, const NewtonOptions& opt) {
    if (auto r = try_find_period2(rm, seed, opt)) return *r;
    throw numerical_error("period-2 Newton did not converge inside the chart");
}

std::vector<Point> seed_grid(const ReturnMap& rm, int n) {
    const ModelMap& m = rm.model();
    const Box pp = m.pi_plus();
    const double ym = m.y_minus(), ey = m.chart().eps_y;
    std::vector<Point> seeds;
    seeds.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double x = pp.cx - pp.hx + (2.0 * pp.hx) * (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const double t = -1.0 + 2.0 * (j + 0.5) / n;
            seeds.push_back({x, (ym + t * ey) / rm.y_scale()});
        }
    }
    return seeds;
}

std::vector<FixedPointRecord> search_fixed_points(const ReturnMap& rm, const std::vector<Point>& seeds, int period,
                                                  Exec exec) {
    std::vector<std::optional<FixedPointRecord>> found(seeds.size());
    const long n = static_cast<long>(seeds.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count())
        for (long i = 0; i < n; ++i) found[i] = newton_periodic(rm, seeds[i], period, {});
    } else {
        for (long i = 0; i < n; ++i) found[i] = newton_periodic(rm, seeds[i], period, {});
    }
    const double g = rm.y_scale();
    std::vector<FixedPointRecord> out;
    for (auto& f : found) {
        if (!f) continue;
        const bool dup = std::any_of(out.begin(), out.end(), [&](const FixedPointRecord& r) {
            return std::abs(r.point.x - f->point.x) < 1e-8 && std::abs(g * (r.point.y - f->point.y)) < 1e-8;
        });
        if (!dup) out.push_back(std::move(*f));
    }
    std::sort(out.begin(), out.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        return a.point.x < b.point.x || (a.point.x == b.point.x && a.point.y < b.point.y);
    });
    return out;
}

}  // namespace apm

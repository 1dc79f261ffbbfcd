#include "apm/rescale.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "apm/error.hpp"
#include "apm/retmap.hpp"

namespace apm {

S0Invariant compute_s0(const GlobalMapCoeffs& c, int nu1) {
    const double xp = c.x_plus;
    const double v = c.d * xp * (c.a * c.c + c.f20 * xp) + 0.5 * c.f11 * xp * (1.0 + nu1 - 0.5 * c.f11 * xp);
    return {v, nu1};
}

int nu1_of(const ModelMap& m, int k) {
    const GlobalMapCoeffs c = m.coeffs();
    const double s = -c.b * c.c * std::pow(m.saddle().lambda_gamma(), k);
    return s > 0.0 ? 1 : -1;
}

int nu2_of(const ModelMap& m, int k) { return std::pow(m.saddle().lambda_gamma(), k) > 0.0 ? 1 : -1; }

namespace {

// The bracket multiplying -d lambda^-2k, minus mu.
double mu_offset(const ModelMap& m, int k) {
    const GlobalMapCoeffs c = m.coeffs();
    const double ell = std::pow(m.lambda(), k);
    if (m.saddle().orientable()) {
        const double b1 = m.saddle().betas().empty() ? 0.0 : m.saddle().betas()[0];
        return ell * (c.c * c.x_plus - c.y_minus) * (1.0 + k * b1 * ell * c.x_plus * c.y_minus);
    }
    return c.c * ell * c.x_plus - std::pow(m.gamma(), -k) * c.y_minus;
}

}  // namespace

double mu_to_M(const ModelMap& m, int k, double mu) {
    const GlobalMapCoeffs c = m.coeffs();
    const double s0 = compute_s0(c, nu1_of(m, k)).value;
    return -c.d * std::pow(m.lambda(), -2 * k) * (mu + mu_offset(m, k)) - s0;
}

double mu_to_M(const ModelMap& m, int k) { return mu_to_M(m, k, m.mu()); }

double M_to_mu(const ModelMap& m, int k, double M) {
    const GlobalMapCoeffs c = m.coeffs();
    const double s0 = compute_s0(c, nu1_of(m, k)).value;
    return -(M + s0) * std::pow(m.lambda(), 2 * k) / c.d - mu_offset(m, k);
}

RescaleChart::RescaleChart(const ModelMap& m, int k) : m_(&m), k_(k) {
    if (k < 1) throw validation_error("rescaling needs k >= 1");
    const GlobalMapCoeffs c = m.coeffs();
    nu1_ = nu1_of(m, k);
    nu2_ = nu2_of(m, k);
    M_ = mu_to_M(m, k);
    ell_ = std::pow(m.lambda(), k);
    g_ = std::pow(m.gamma(), -k);
    eps_ = ell_ / g_ > 0.0 ? 1.0 : -1.0;
    // nu2 f03 lambda^k / d^2; gamma^-k equals nu2 lambda^k.
    cubic_ = c.f03 * g_ / (c.d * c.d);
    xp_ = c.x_plus;
    ym_ = c.y_minus;
    a_ = c.a;
    b_ = c.b;
    D_ = c.d + ell_ * c.f12 * c.x_plus;
    kappa_ = 0.5 * eps_ * c.f11 * c.x_plus;
    p_ = -c.e02 * g_ / (c.b * c.d);
    q_ = c.a * ell_ - nu1_ * p_;
    h_ = 0.5 * nu1_ * p_;
}

Point RescaleChart::to_rescaled(Point cross) const {
    const double xi = cross.x - xp_ - a_ * ell_ * xp_;
    const double eta = cross.y - ym_;
    const double u = -D_ * xi / (b_ * g_) - kappa_;
    const double v = -D_ * eta / g_ - kappa_;
    const double x = u + p_ * v, y = v + q_ * u;
    return {x - h_ - p_ * M_, y - h_};
}

Point RescaleChart::from_rescaled(Point XY) const {
    const double x = XY.x + h_ + p_ * M_, y = XY.y + h_;
    const double det = 1.0 - p_ * q_;
    const double u = (x - p_ * y) / det, v = (y - q_ * x) / det;
    const double xi = -b_ * g_ * (u + kappa_) / D_;
    const double eta = -g_ * (v + kappa_) / D_;
    return {xi + xp_ + a_ * ell_ * xp_, eta + ym_};
}

Point RescaleChart::to_model(Point XY) const {
    const Point cr = from_rescaled(XY);
    return {cr.x, exact_cross_T0k(m_->saddle(), cr.x, cr.y, k_).y0};
}

Point RescaleChart::from_model(Point p0) const {
    return to_rescaled({p0.x, T0k(m_->saddle(), p0, k_).p.y});
}

RescaledMap rescaled_Tk(const ModelMap& m, int k, double ball_radius, int grid) {
    const RescaleChart chart(m, k);
    const ReturnMap rm(m, k);
    const Chart& ch = m.chart();
    RescaledMap out;
    out.k = k;
    out.nu1 = chart.nu1();
    out.nu2 = chart.nu2();
    out.M = chart.M();
    out.cubic_coeff = chart.cubic_coeff();
    out.ball_radius = ball_radius;

    std::vector<double> rows;
    std::vector<double> rhs;
    double worst = 0.0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double X = -ball_radius + 2.0 * ball_radius * i / (grid - 1);
            const double Y = -ball_radius + 2.0 * ball_radius * j / (grid - 1);
            if (X * X + Y * Y > ball_radius * ball_radius * (1.0 + 1e-12)) continue;
            const Point cr = chart.from_rescaled({X, Y});
            if (std::abs(cr.x - m.x_plus()) > ch.eps_x)
                throw domain_error("chart overflow: |x0 - x+| exceeds eps_x at k=" + std::to_string(k));
            if (std::abs(cr.y - m.y_minus()) > ch.eps_y)
                throw domain_error("chart overflow: |yk - y-| exceeds eps_y at k=" + std::to_string(k));
            const Point p0{cr.x, exact_cross_T0k(m.saddle(), cr.x, cr.y, k).y0};
            MapJet img;
            try {
                img = rm.eval(p0);
            } catch (const ChartExit& e) {
                throw domain_error(std::string("chart overflow: ") + e.what());
            }
            const double ykbar = T0k(m.saddle(), img.p, k).p.y;
            const Point bar = chart.to_rescaled({img.p.x, ykbar});
            const double target = chart.M() - chart.nu1() * X - Y * Y + chart.cubic_coeff() * Y * Y * Y;
            worst = std::max({worst, std::abs(bar.x - Y), std::abs(bar.y - target)});
            rows.insert(rows.end(), {1.0, X, Y, X * X, X * Y, Y * Y, Y * Y * Y});
            rhs.push_back(bar.y);
        }
    out.residual_bound = worst;
    const auto n = static_cast<Eigen::Index>(rhs.size());
    Eigen::MatrixXd A = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, 7, Eigen::RowMajor>>(rows.data(), n, 7);
    const Eigen::VectorXd bvec = Eigen::Map<Eigen::VectorXd>(rhs.data(), n);
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(bvec);
    out.xy_coeff = coef[4];
    return out;
}

std::vector<RescaledMap> rescale_sweep(const ModelMap& m, int k_min, int k_max, double ball_radius, Exec exec) {
    const int n = k_max - k_min + 1;
    if (n <= 0) throw validation_error("empty k range");
    std::vector<std::optional<RescaledMap>> res(n);
    std::vector<std::string> errors(n);
    auto work = [&](int i) {
        try {
            res[i] = rescaled_Tk(m, k_min + i, ball_radius);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (int i = 0; i < n; ++i) work(i);
    } else {
        for (int i = 0; i < n; ++i) work(i);
    }
    std::vector<RescaledMap> out;
    for (int i = 0; i < n; ++i) {
        if (!res[i]) throw domain_error(errors[i]);
        out.push_back(*res[i]);
    }
    return out;
}

std::vector<Point> rescaled_seed_grid(const ModelMap& m, int k, double radius, int n) {
    const RescaleChart chart(m, k);
    std::vector<Point> seeds;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double X = -radius + 2.0 * radius * (i + 0.5) / n;
            const double Y = -radius + 2.0 * radius * (j + 0.5) / n;
            try {
                const Point p = chart.to_model({X, Y});
                if (m.pi_plus().contains(p)) seeds.push_back(p);
            } catch (const Error&) {
            }
        }
    return seeds;
}

}  // namespace apm

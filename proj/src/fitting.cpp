#include "pulseforge/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "pulseforge/errors.hpp"

namespace pulseforge {
namespace {

struct LinearPart {
    double a = 0.0;
    double b = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

// Best (a, b) for a fixed decay p.
LinearPart solve_linear(const std::vector<double>& x, const std::vector<double>& y, double p) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k, 0) = 1.0;
        m(k, 1) = std::pow(p, x[k]);
        rhs(k) = y[k];
    }
    LinearPart out;
    const double spread = m.col(1).maxCoeff() - m.col(1).minCoeff();
    if (spread < 1e-14) {
        out.a = rhs.mean();
        out.b = 0.0;
    } else {
        const Eigen::Vector2d sol = m.colPivHouseholderQr().solve(rhs);
        out.a = sol(0);
        out.b = sol(1);
    }
    out.sse = (m * Eigen::Vector2d(out.a, out.b) - rhs).squaredNorm();
    return out;
}

}  // namespace

ExponentialFit fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("fit needs equally long x and y");
    std::vector<double> distinct = x;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw ConfigError("exponential fit needs at least three distinct x");
    for (double v : y) {
        if (!std::isfinite(v)) throw NumericError("exponential fit received non-finite data");
    }

    // Grid in q = -log(1 - p) spanning p from ~1 - 1e-9 to ~0.
    const double xmax = distinct.back();
    double best_q = 0.0;
    LinearPart best = solve_linear(x, y, 1.0);
    double best_p = 1.0;
    const int grid = 600;
    std::vector<double> ps;
    for (int k = 0; k <= grid; ++k) {
        const double log_gap = -9.0 + 9.0 * k / grid;  // 1 - p = 10^log_gap
        ps.push_back(1.0 - std::pow(10.0, log_gap) * (1.0 - 1e-12));
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const LinearPart lp = solve_linear(x, y, ps[k]);
        if (lp.sse < best.sse) {
            best = lp;
            best_p = ps[k];
            best_q = static_cast<double>(k);
        }
    }
    (void)xmax;

    // Brent refinement between the neighbouring grid points.
    if (best_p < 1.0) {
        const auto k = static_cast<std::size_t>(best_q);
        const double lo = ps[k == 0 ? 0 : k - 1];
        const double hi = k + 1 < ps.size() ? ps[k + 1] : 1.0;
        auto objective = [&](double p) { return solve_linear(x, y, p).sse; };
        const auto r = boost::math::tools::brent_find_minima(objective, std::min(lo, hi),
                                                             std::max(lo, hi), 52);
        const LinearPart lp = solve_linear(x, y, r.first);
        if (lp.sse <= best.sse) {
            best = lp;
            best_p = r.first;
        }
    }

    ExponentialFit fit{best.a, best.b, best_p, best.sse, 0.0};
    const auto n = static_cast<Eigen::Index>(x.size());
    auto jacobian = [&](const ExponentialFit& f, Eigen::MatrixXd& j, Eigen::VectorXd& r) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double pk = std::pow(f.p, x[k]);
            r(k) = f.a + f.b * pk - y[k];
            j(k, 0) = 1.0;
            j(k, 1) = pk;
            j(k, 2) = x[k] == 0.0 ? 0.0 : f.b * x[k] * std::pow(f.p, x[k] - 1.0);
        }
    };
    Eigen::MatrixXd j(n, 3);
    Eigen::VectorXd r(n);
    if (fit.p < 1.0 && fit.b != 0.0) {
        for (int it = 0; it < 20; ++it) {
            jacobian(fit, j, r);
            const Eigen::Vector3d step = j.colPivHouseholderQr().solve(-r);
            ExponentialFit trial = fit;
            trial.a += step(0);
            trial.b += step(1);
            trial.p += step(2);
            if (!(trial.p > 0.0 && trial.p <= 1.0)) break;
            jacobian(trial, j, r);
            const double sse = r.squaredNorm();
            if (!(sse <= fit.sse)) break;
            const bool converged = sse >= fit.sse * (1.0 - 1e-12);
            trial.sse = sse;
            fit = trial;
            if (converged) break;
        }
        jacobian(fit, j, r);
        if (n > 3) {
            const double sigma2 = fit.sse / static_cast<double>(n - 3);
            const Eigen::Matrix3d jtj = j.transpose() * j;
            const Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
            if (lu.isInvertible()) fit.p_stderr = std::sqrt(std::max(0.0, sigma2 * lu.inverse()(2, 2)));
        }
    }
    return fit;
}

DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("decay fit needs >= 2 points");
    auto solve_c = [&](double tau, double* sse) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double e = std::exp(-x[k] / tau);
            num += e * y[k];
            den += e * e;
        }
        const double c = den > 0.0 ? num / den : 0.0;
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += std::pow(c * std::exp(-x[k] / tau) - y[k], 2);
        *sse = s;
        return c;
    };
    const double span = *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
    if (!(span > 0.0)) throw ConfigError("decay fit needs distinct x");
    double best_tau = span;
    double best_sse = std::numeric_limits<double>::infinity();
    const int grid = 400;
    for (int k = 0; k <= grid; ++k) {
        const double tau = span * std::pow(10.0, -3.0 + 5.0 * k / grid);
        double sse = 0.0;
        solve_c(tau, &sse);
        if (sse < best_sse) {
            best_sse = sse;
            best_tau = tau;
        }
    }
    const double step = std::pow(10.0, 5.0 / grid);
    auto objective = [&](double log_tau) {
        double sse = 0.0;
        solve_c(std::exp(log_tau), &sse);
        return sse;
    };
    const auto r = boost::math::tools::brent_find_minima(
        objective, std::log(best_tau / step), std::log(best_tau * step), 52);
    DecayFit fit;
    fit.tau = std::exp(r.first);
    fit.c = solve_c(fit.tau, &fit.sse);
    return fit;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw ConfigError("line fit needs >= 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("line fit needs distinct x");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) sse += std::pow(y[k] - f.slope * x[k] - f.intercept, 2);
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    f.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
    return f;
}

double quadratic_vertex(const std::vector<double>& x, const std::vector<double>& y,
                        std::size_t index) {
    if (x.size() < 3 || x.size() != y.size()) return x.at(index);
    const std::size_t i = std::clamp<std::size_t>(index, 1, x.size() - 2);
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a == 0.0 || !std::isfinite(a)) return x[index];
    const double v = -b / (2.0 * a);
    // Stay within the bracketing points.
    return std::clamp(v, std::min(x0, x2), std::max(x0, x2));
}

Crossing find_crossing(const std::vector<double>& x, const std::vector<double>& y, double level,
                       double hint, std::size_t window) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("crossing search needs >= 2 points");
    std::size_t best = x.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double d0 = y[k] - level;
        const double d1 = y[k + 1] - level;
        if (d0 == 0.0 || d0 * d1 < 0.0) {
            const double xc = d0 == 0.0 ? x[k] : x[k] + (x[k + 1] - x[k]) * d0 / (d0 - d1);
            const double dist = std::abs(xc - hint);
            if (dist < best_dist) {
                best_dist = dist;
                best = k;
            }
        }
    }
    if (best == x.size()) {
        if (y.back() == level) best = x.size() - 2;
        else throw CalibrationError("signal never crosses the target level in the sweep range");
    }
    const std::size_t w = std::max<std::size_t>(2, std::min(window, x.size()));
    const std::size_t half = w / 2;
    std::size_t lo = best + 1 >= half ? best + 1 - half : 0;
    lo = std::min(lo, x.size() - w);
    const std::vector<double> xs(x.begin() + static_cast<long>(lo), x.begin() + static_cast<long>(lo + w));
    const std::vector<double> ys(y.begin() + static_cast<long>(lo), y.begin() + static_cast<long>(lo + w));
    const LineFit f = fit_line(xs, ys);
    Crossing c;
    c.slope = f.slope;
    if (f.slope == 0.0) throw CalibrationError("flat signal at the crossing");
    c.x = (level - f.intercept) / f.slope;
    c.stderr_x = std::abs(f.slope_stderr / f.slope) * std::abs(c.x);
    return c;
}

}  // namespace pulseforge

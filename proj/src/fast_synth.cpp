#include "pulseforge/fast_synth.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

double sinc(double y) {
    if (std::abs(y) < 1e-4) {
        const double y2 = y * y;
        return 1.0 - y2 / 6.0 + y2 * y2 / 120.0;
    }
    return std::sin(y) / y;
}

// Integrate a real function over [a, b] to (relative) tolerance 1e-12.
template <class F>
double integrate(F&& f, double a, double b) {
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    const double value = Quad::integrate(f, a, b, 20, 1e-12, &err);
    if (!std::isfinite(value)) throw NumericError("non-finite value in Gram integration");
    return value;
}

// exp(i pi x) g_n(f) / t_p with x = f t_p; real because every basis transform shares that phase.
double basis_ft_real(int n, double x) {
    const double nx = static_cast<double>(n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sinc(kPi * x) - 0.5 * sign * (sinc(kPi * (nx - x)) + sinc(kPi * (nx + x)));
}

// Rows are basis functions, columns quadrature nodes scaled by sqrt(weight), so that
// V V^T reproduces the Gram matrix (in units of t_p). Panels span at most a quarter bin.
Eigen::MatrixXd band_samples(const SuppressionProblem& problem) {
    using Gauss = boost::math::quadrature::gauss<double, 16>;
    const auto& nodes = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    std::vector<std::pair<double, double>> pts;  // (x, quadrature weight)
    for (const auto& iv : problem.intervals) {
        const double xl = iv.f_low * problem.duration;
        const double xh = iv.f_high * problem.duration;
        const int panels = std::max(1, static_cast<int>(std::ceil((xh - xl) / 0.25)));
        const double h = (xh - xl) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = xl + (p + 0.5) * h;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                // The gauss table stores non-negative abscissae; zero appears once for odd orders.
                pts.emplace_back(mid + 0.5 * h * nodes[k], 0.5 * h * weights[k] * iv.weight);
                if (nodes[k] != 0.0) pts.emplace_back(mid - 0.5 * h * nodes[k], 0.5 * h * weights[k] * iv.weight);
            }
        }
    }
    Eigen::MatrixXd v(problem.n_terms, static_cast<Eigen::Index>(pts.size()));
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double s = std::sqrt(pts[j].second);
        for (int n = 0; n < problem.n_terms; ++n) v(n, j) = s * basis_ft_real(n + 1, pts[j].first);
    }
    return v;
}

// min ||V^T c||^2 subject to sum(c) = b, by eliminating the constraint with an orthonormal
// complement of the ones vector and solving the least-squares problem without forming V V^T.
Eigen::VectorXd solve_factored(const Eigen::MatrixXd& v, double b) {
    const Eigen::Index n = v.rows();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd z = q.rightCols(n - 1);
    const Eigen::VectorXd c0 = ones * (b / static_cast<double>(n));
    const Eigen::MatrixXd m = v.transpose() * z;
    if (m.rows() < m.cols()) throw NumericError("degenerate FAST problem: too few band samples");
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-14 * sv(0))) {
        throw NumericError("degenerate FAST problem: band energy is flat along the constraint (sigma ratio " +
                           std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
    }
    const Eigen::VectorXd y = svd.solve(-(v.transpose() * c0));
    Eigen::VectorXd c = c0 + z * y;
    c.array() += (b - c.sum()) / static_cast<double>(n);
    return c;
}

// Bordered LU is used while its condition estimate stays below this; beyond it the
// factored least-squares route keeps about twice as many significant digits.
constexpr double kBorderedCondLimit = 1e10;

// Neumaier summation.
double compensated_sum(const Eigen::VectorXd& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

void SuppressionProblem::validate() const {
    if (n_terms < 1) throw ConfigError("FAST needs n_terms >= 1");
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ConfigError("FAST duration must be positive and finite");
    }
    if (!std::isfinite(theta)) throw ConfigError("FAST rotation angle must be finite");
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        const auto& iv = intervals[j];
        const std::string name = "interval " + std::to_string(j) + " [" + std::to_string(iv.f_low) +
                                 ", " + std::to_string(iv.f_high) + "] Hz";
        if (!(iv.f_low >= 0.0)) throw ConfigError(name + ": f_low must be >= 0");
        if (!(iv.f_low < iv.f_high) || !std::isfinite(iv.f_high)) {
            throw ConfigError(name + ": needs f_low < f_high < inf");
        }
        if (!(iv.weight > 0.0) || !std::isfinite(iv.weight)) {
            throw ConfigError(name + ": weight must be positive");
        }
    }
}

std::complex<double> basis_ft(int n, double tp, double f) {
    using namespace std::complex_literals;
    const double x = f * tp;
    const double nx = static_cast<double>(n);
    const std::complex<double> dc = std::exp(-1i * kPi * x) * sinc(kPi * x);
    const std::complex<double> lower = std::exp(1i * kPi * (nx - x)) * sinc(kPi * (nx - x));
    const std::complex<double> upper = std::exp(-1i * kPi * (nx + x)) * sinc(kPi * (nx + x));
    return tp * (dc - 0.5 * lower - 0.5 * upper);
}

Eigen::MatrixXcd build_gram(const SuppressionProblem& problem) {
    problem.validate();
    const int n = problem.n_terms;
    const double tp = problem.duration;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& iv : problem.intervals) {
        // Integrate in x = f t_p so the integrand is O(1); A = t_p^3 int ... dx / t_p.
        const double xl = iv.f_low * tp;
        const double xh = iv.f_high * tp;
        // Every g_n(f) carries the same phase exp(-i pi f t_p), so g_n conj(g_m) is real.
        for (int r = 0; r < n; ++r) {
            for (int c = r; c < n; ++c) {
                auto product = [&](double x) {
                    return (basis_ft(r + 1, 1.0, x) * std::conj(basis_ft(c + 1, 1.0, x))).real();
                };
                const double v = iv.weight * tp * integrate(product, xl, xh);
                gram(r, c) += v;
                if (c != r) gram(c, r) += v;
            }
        }
    }
    return gram;
}

double fast_objective(const SuppressionProblem& problem, const std::vector<double>& coeffs) {
    if (static_cast<int>(coeffs.size()) != problem.n_terms) {
        throw ConfigError("coefficient count does not match n_terms");
    }
    const Eigen::MatrixXd a = build_gram(problem).real();
    const Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), problem.n_terms);
    return c.dot(a * c);
}

FastSolution solve_fast(const SuppressionProblem& problem) {
    problem.validate();
    const int n = problem.n_terms;
    const double tp = problem.duration;
    const Eigen::MatrixXd a = build_gram(problem).real();
    const Eigen::MatrixXd sym = a + a.transpose();

    FastSolution sol;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd c(n);
    if (n == 1) {
        c(0) = problem.theta / tp;
        sol.lagrange_multiplier = 0.0;
        sol.condition_number = 1.0;
    } else {
        // Solve in scaled unknowns c_hat = c t_p, A_hat = A / t_p so all entries are O(1).
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
        kkt.topLeftCorner(n, n) = sym / tp;
        kkt.topRightCorner(n, 1) = -ones;
        kkt.bottomLeftCorner(1, n) = ones.transpose();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
        rhs(n) = problem.theta;

        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(kkt);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        sol.condition_number = smin > 0.0 ? sv(0) / smin : INFINITY;
        if (sol.condition_number < kBorderedCondLimit) {
            const Eigen::VectorXd z = kkt.partialPivLu().solve(rhs);
            c = z.head(n) / tp;
            sol.lagrange_multiplier = z(n);
        } else {
            c = solve_factored(band_samples(problem), problem.theta) / tp;
            sol.factored = true;
            // mu from the stationarity condition, averaged over components.
            sol.lagrange_multiplier = (sym * c).mean();
        }
    }
    if (!c.allFinite()) throw NumericError("FAST solve produced non-finite coefficients");

    // Ill-conditioned solutions alternate in sign with |c_n| t_p up to ~1e6, so a plain sum of
    // the constraint loses ~1e-10. Fold the residual into the smallest coefficient, where it fits.
    {
        Eigen::Index k_min = 0;
        c.cwiseAbs().minCoeff(&k_min);
        c(k_min) += (problem.theta - compensated_sum(c) * tp) / tp;
    }

    sol.coeffs.assign(c.data(), c.data() + n);
    sol.objective = c.dot(a * c);
    const double scale = sym.norm() * c.norm();
    const double resid = (sym * c - sol.lagrange_multiplier * ones).norm();
    sol.kkt_residual = (n == 1 || scale == 0.0) ? 0.0 : resid / scale;
    const double achieved = compensated_sum(c) * tp;
    sol.constraint_error =
        std::abs(achieved - problem.theta) / std::max(std::abs(problem.theta), 1e-300);
    return sol;
}

HeuristicParams heuristic_hyperparams(double alpha, DragVariant variant, double f_h_2) {
    if (alpha == 0.0 || !std::isfinite(alpha)) {
        throw ConfigError("heuristic needs a nonzero anharmonicity");
    }
    const double fa = std::abs(alpha) / kTwoPi;
    HeuristicParams p;
    p.f_l_ef = 0.95 * fa;
    p.f_h_ef = 1.05 * fa;
    p.f_c = 2.0 * fa;
    p.f_h_2 = std::max(f_h_2, 2.0 * p.f_c);
    p.variant = variant;
    if (variant == DragVariant::DragP) {
        p.w_ef = 100.0;
        p.n_terms = 5;
    } else {
        p.w_ef = 5.0;
        p.n_terms = 4;
    }
    return p;
}

SuppressionProblem HeuristicParams::to_problem(double theta, double duration) const {
    SuppressionProblem p;
    p.n_terms = n_terms;
    p.theta = theta;
    p.duration = duration;
    p.intervals = {{f_l_ef, f_h_ef, w_ef}, {f_c, f_h_2, 1.0}};
    return p;
}

SuppressionProblem slepian_problem(double f_c, double theta, double tp, int n_terms,
                                   double f_high) {
    if (!(f_c > 0.0)) throw ConfigError("slepian cutoff frequency must be positive");
    SuppressionProblem p;
    p.n_terms = n_terms;
    p.theta = theta;
    p.duration = tp;
    p.intervals = {{f_c, std::max(f_high, 2.0 * f_c), 1.0}};
    p.validate();
    return p;
}

int critical_n(double theta, double tp, const SuppressionProblem& suppress_all, int n_max) {
    SuppressionProblem p = suppress_all;
    p.theta = theta;
    p.duration = tp;
    const double bound = std::abs(theta) / tp;
    int n_crit = 1;
    for (int n = 2; n <= n_max; ++n) {
        p.n_terms = n;
        FastSolution sol;
        try {
            sol = solve_fast(p);
        } catch (const NumericError&) {
            break;
        }
        if (!(std::abs(sol.coeffs.back()) < bound)) break;
        n_crit = n;
    }
    return n_crit;
}

EnvelopeSpec fast_envelope_spec(const FastSolution& solution, const SuppressionProblem& problem) {
    EnvelopeSpec spec;
    spec.shape = FastSeriesShape{solution.coeffs};
    spec.duration = problem.duration;
    spec.amplitude = 1.0;
    spec.rotation_angle = problem.theta;
    return spec;
}

}  // namespace pulseforge

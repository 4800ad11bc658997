#include "pulseforge/hd_drag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

// k-th derivative of u^n at u.
double monomial_derivative(int n, int k, double u) {
    if (k > n) return 0.0;
    double coef = 1.0;
    for (int j = 0; j < k; ++j) coef *= static_cast<double>(n - j);
    return coef * std::pow(u, n - k);
}

}  // namespace

void HdProblem::validate() const {
    if (order() > kMaxHdOrder) {
        throw ConfigError("HD DRAG supports at most " + std::to_string(kMaxHdOrder) +
                          " suppressed frequencies");
    }
    if (!(duration > 0.0)) throw ConfigError("HD DRAG duration must be positive");
    for (double f : suppressed_freqs) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw ConfigError("HD DRAG suppressed frequencies must be positive");
        }
    }
}

HdProblem hd_problem_for_anharmonicity(int k, double alpha, double duration) {
    if (alpha == 0.0) throw ConfigError("HD DRAG needs a nonzero anharmonicity");
    if (k < 0) throw ConfigError("HD DRAG order must be non-negative");
    HdProblem p;
    p.suppressed_freqs.assign(static_cast<std::size_t>(k), std::abs(alpha) / kTwoPi);
    p.duration = duration;
    return p;
}

std::vector<double> solve_betas(const HdProblem& problem) {
    problem.validate();
    const int k = problem.order();
    std::vector<double> beta{1.0};
    if (k == 0) return beta;

    // Work in u = x / x_ref, x = (2 pi f)^2, with unknowns z_n = beta_2n (-1)^n x_ref^n.
    std::map<double, int> multiplicity;
    for (double f : problem.suppressed_freqs) multiplicity[f] += 1;
    double x_ref = 0.0;
    for (const auto& [f, m] : multiplicity) x_ref = std::max(x_ref, std::pow(kTwoPi * f, 2));

    Eigen::MatrixXd m(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    int row = 0;
    for (const auto& [f, mult] : multiplicity) {
        const double u = std::pow(kTwoPi * f, 2) / x_ref;
        for (int d = 0; d < mult; ++d, ++row) {
            for (int n = 1; n <= k; ++n) m(row, n - 1) = monomial_derivative(n, d, u);
            rhs(row) = d == 0 ? -1.0 : 0.0;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw NumericError("HD DRAG beta system is singular");
    const Eigen::VectorXd z = lu.solve(rhs);
    for (int n = 1; n <= k; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        beta.push_back(sign * z(n - 1) / std::pow(x_ref, n));
    }
    return beta;
}

std::vector<double> solve_basis_coeffs(int k) {
    if (k < 0 || k > 8) throw ConfigError("basis order must lie in [0, 8]");
    const int size = k + 1;
    Eigen::MatrixXd m(size, size);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    for (int col = 0; col < size; ++col) {
        const double kk = static_cast<double>(col + 1);
        m(0, col) = 1.0;
        for (int n = 1; n <= k; ++n) m(n, col) = std::pow(kk, 2 * n);
    }
    rhs(0) = 1.0;
    const Eigen::VectorXd d = m.fullPivLu().solve(rhs);
    return {d.data(), d.data() + size};
}

HdSolution solve_hd(const HdProblem& problem) {
    HdSolution s;
    s.beta_even = solve_betas(problem);
    s.d_coeffs = solve_basis_coeffs(problem.order());
    return s;
}

double hd_polynomial(const std::vector<double>& beta_even, double f) {
    const double x = std::pow(kTwoPi * f, 2);
    double acc = 0.0;
    double xn = 1.0;
    for (std::size_t n = 0; n < beta_even.size(); ++n) {
        acc += beta_even[n] * ((n % 2 == 0) ? 1.0 : -1.0) * xn;
        xn *= x;
    }
    return acc;
}

EnvelopeSpec hd_envelope_spec(const HdSolution& solution, double amplitude, double duration) {
    EnvelopeSpec spec;
    spec.shape = HdSeriesShape{solution.d_coeffs, solution.beta_even};
    spec.duration = duration;
    spec.amplitude = amplitude;
    spec.rotation_angle = amplitude * spec.base_area();
    spec.validate();
    return spec;
}

}  // namespace pulseforge

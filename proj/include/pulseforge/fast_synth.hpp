#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/envelopes.hpp"

namespace pulseforge {

/// Baseband frequency band [f_low, f_high] in Hz with a positive weight.
struct FrequencyInterval {
    double f_low = 0.0;
    double f_high = 0.0;
    double weight = 1.0;
};

/// A FAST instance: choose N cosine-series coefficients minimizing the weighted
/// in-band spectral energy of Omega_I subject to Sum c_n t_p = theta.
struct SuppressionProblem {
    int n_terms = 4;
    std::vector<FrequencyInterval> intervals;
    double theta = 1.5707963267948966;
    double duration = 0.0;

    void validate() const;
};

struct FastSolution {
    std::vector<double> coeffs;  // c_n, 1/s
    double lagrange_multiplier = 0.0;
    double objective = 0.0;        // c^T Re(A) c
    double kkt_residual = 0.0;     // ||(A + A^T) c - mu b|| / (||A + A^T|| ||c||)
    double constraint_error = 0.0; // |Sum c_n t_p - theta| / |theta|
    double condition_number = 1.0;  // of the bordered KKT matrix
    bool factored = false;          // solved by the least-squares fallback
};

struct HeuristicParams {
    double f_l_ef = 0.0;
    double f_h_ef = 0.0;
    double f_c = 0.0;
    double f_h_2 = 1e9;
    double w_ef = 5.0;
    int n_terms = 4;
    DragVariant variant = DragVariant::DragL;

    SuppressionProblem to_problem(double theta, double duration) const;
};

/// Closed-form Fourier transform of 1 - cos(2 pi n t / t_p) on [0, t_p], convention
/// g(f) = int g(t) exp(-i 2 pi f t) dt.
std::complex<double> basis_ft(int n, double tp, double f);

/// A_nm = Sum_j w_j int_{f_l,j}^{f_h,j} g_n(f) conj(g_m(f)) df by adaptive Gauss-Kronrod quadrature.
Eigen::MatrixXcd build_gram(const SuppressionProblem& problem);

/// Weighted band energy c^T Re(A) c of an arbitrary coefficient vector.
double fast_objective(const SuppressionProblem& problem, const std::vector<double>& coeffs);

/// Bordered KKT solve by partial-pivoting LU. When that matrix is too ill-conditioned (narrow
/// bands on long pulses) the same problem is solved as a constrained least-squares problem on
/// Gauss-Legendre samples of the bands. Throws NumericError when both routes are degenerate.
FastSolution solve_fast(const SuppressionProblem& problem);

/// Rule-of-thumb hyperparameters from the anharmonicity (rad/s). The upper edge of
/// the cutoff band is max(f_h_2, 2 f_c) so the band never collapses for large |alpha|.
HeuristicParams heuristic_hyperparams(double alpha, DragVariant variant, double f_h_2 = 1e9);

/// Minimum out-of-band energy problem: a single unit-weight band [f_c, f_high].
SuppressionProblem slepian_problem(double f_c, double theta, double tp, int n_terms,
                                   double f_high = 1e9);

/// Largest N in [1, n_max] for which the solved |c_N| < theta / t_p. Only the intervals
/// of `suppress_all` are used; its n_terms, theta and duration are overridden. The scan
/// stops at the first N whose problem is numerically degenerate.
int critical_n(double theta, double tp, const SuppressionProblem& suppress_all, int n_max = 12);

/// FastSeries envelope (amplitude 1) carrying the solved coefficients.
EnvelopeSpec fast_envelope_spec(const FastSolution& solution, const SuppressionProblem& problem);

}  // namespace pulseforge

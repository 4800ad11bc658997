#pragma once

#include <vector>

namespace pulseforge {

/// y = a + b p^x, fitted by a grid search over p with linear least squares for (a, b),
/// followed by Brent refinement and Gauss-Newton polishing of all three parameters.
struct ExponentialFit {
    double a = 0.0;
    double b = 0.0;
    double p = 1.0;
    double sse = 0.0;
    double p_stderr = 0.0;  // from the Gauss-Newton covariance; zero for exact data
};

ExponentialFit fit_exponential(const std::vector<double>& x, const std::vector<double>& y);

/// y = c exp(-x / tau) without offset.
struct DecayFit {
    double c = 0.0;
    double tau = 0.0;
    double sse = 0.0;
};

DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y);

/// Ordinary least-squares line y = slope x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Vertex of the parabola through the three points around the discrete extremum at `index`
/// (clamped to the interior). Returns x[index] when the points are collinear.
double quadratic_vertex(const std::vector<double>& x, const std::vector<double>& y, std::size_t index);

/// Location where y crosses `level`, by a line fitted to the `window` points nearest the first
/// sign change (closest to `hint` if several). Throws CalibrationError without a sign change.
struct Crossing {
    double x = 0.0;
    double slope = 0.0;
    double stderr_x = 0.0;
};

Crossing find_crossing(const std::vector<double>& x, const std::vector<double>& y, double level,
                       double hint, std::size_t window = 4);

}  // namespace pulseforge

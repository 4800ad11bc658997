#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace pulseforge {

// ---------------------------------------------------------------------------
// Envelope families
//
// Every family is a dimensionless (or, for the Fourier series, 1/s-valued)
// base shape b(t) supported on [0, t_p]. The in-phase envelope is
// Omega_I(t) = A * b(t). The amplitude A is not normalized to the peak; the
// calibration layer decides what A means physically.
// ---------------------------------------------------------------------------

/// Raised cosine [1 - cos(2 pi t / t_p)] / 2, peak value 1 at t_p / 2.
struct CosineShape {};

/// exp[-(t - t_p/2)^2 / (2 sigma^2)] with sigma = t_p / sigma_ratio.
/// With subtract_offset the endpoint value exp[-t_p^2 / (8 sigma^2)] is removed.
struct GaussianShape {
    double sigma_ratio = 5.0;
    bool subtract_offset = true;
};

/// Sum_n c_n [1 - cos(2 pi n t / t_p)], coefficients in 1/s.
struct FastSeriesShape {
    std::vector<double> coeffs;
};

/// g(t) + beta_2 g''(t) + beta_4 g''''(t) + ... with
/// g(t) = Sum_k d_k [1 - cos(2 pi k t / t_p)].
/// beta_even[n] carries beta_{2n} in s^(2n); beta_even[0] must be 1.
struct HdSeriesShape {
    std::vector<double> d_coeffs;
    std::vector<double> beta_even;
};

/// Flat-top pulse with cosine-shaped rise and fall of length rise_time.
struct SquareCosineRiseShape {
    double rise_time = 6.25e-9;
};

using EnvelopeShape = std::variant<CosineShape, GaussianShape, FastSeriesShape, HdSeriesShape,
                                   SquareCosineRiseShape>;

std::string_view shape_name(const EnvelopeShape& shape);

struct EnvelopeSpec {
    EnvelopeShape shape = CosineShape{};
    double duration = 0.0;        // t_p, seconds
    double amplitude = 1.0;       // A
    double rotation_angle = 1.5707963267948966;  // theta, rad

    /// Throws ConfigError when the spec breaks a family invariant.
    void validate() const;

    /// Integral of the base shape over [0, t_p] (amplitude excluded).
    double base_area() const;

    /// Copy of this spec with the amplitude chosen so that the in-phase area equals theta.
    EnvelopeSpec with_area_normalized_amplitude() const;
};

enum class DragVariant { DragP, DragL, NoDrag };

std::string_view to_string(DragVariant v);
DragVariant drag_variant_from_string(std::string_view s);

struct DragConfig {
    double beta = 0.0;
    double alpha = 0.0;  // anharmonicity, rad/s
    DragVariant variant = DragVariant::NoDrag;

    void validate() const;
};

struct IqSample {
    double i = 0.0;
    double q = 0.0;
};

struct SampledWaveform {
    double dt = 0.0;
    double start_time = 0.0;
    std::vector<double> i_samples;
    std::vector<double> q_samples;

    std::size_t size() const { return i_samples.size(); }
    double time(std::size_t k) const { return start_time + static_cast<double>(k) * dt; }
    void validate() const;
};

/// Omega_I(t); exactly zero outside [0, t_p].
double eval_envelope(const EnvelopeSpec& spec, double t);

/// d^order Omega_I / dt^order evaluated analytically; zero outside [0, t_p].
double eval_envelope_derivative(const EnvelopeSpec& spec, double t, int order);

/// (Omega_I, Omega_Q) with Omega_Q = -beta dOmega_I/dt / alpha (zero for NoDrag).
IqSample apply_drag(const EnvelopeSpec& spec, const DragConfig& drag, double t);

/// Samples at t = k dt for every k with k dt <= t_p, followed by zero_pad zero samples.
SampledWaveform sample_waveform(const EnvelopeSpec& spec, const DragConfig& drag, double dt,
                                std::size_t zero_pad = 0);

/// Leading-order drive-induced qubit frequency shift -lambda_2^2 Omega_I^2 / (4 alpha), lambda_2^2 = 2.
double ac_stark_shift(double omega_i, double alpha);

}  // namespace pulseforge

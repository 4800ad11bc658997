#include "pulseforge/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {

std::string_view to_string(DistortionKind k) {
    return k == DistortionKind::Intra ? "intra" : "cross";
}

DistortionKind distortion_kind_from_string(std::string_view s) {
    if (s == "intra" || s == "Intra") return DistortionKind::Intra;
    if (s == "cross" || s == "Cross") return DistortionKind::Cross;
    throw ConfigError("unknown distortion kind '" + std::string(s) + "'");
}

void DistortionModel::validate() const {
    for (const auto& t : terms) {
        if (!(t.tau > 0.0) || !std::isfinite(t.tau)) {
            throw ConfigError("distortion time constants must be positive");
        }
        if (!(std::abs(t.a) < 1.0)) throw ConfigError("distortion amplitudes must satisfy |a| < 1");
    }
}

double DistortionModel::max_tau() const {
    double m = 0.0;
    for (const auto& t : terms) m = std::max(m, t.tau);
    return m;
}

std::complex<double> kernel_ft(const DistortionModel& model, double f) {
    using namespace std::complex_literals;
    std::complex<double> tail = 0.0;
    for (const auto& t : model.terms) {
        const std::complex<double> x = 1i * kTwoPi * f * t.tau;
        tail += t.a * x / (1.0 + x);
    }
    return model.kind == DistortionKind::Intra ? 1.0 + tail : 1.0 + 1i * tail;
}

DistortionOutput apply_distortion(const SampledWaveform& waveform, const DistortionModel& model) {
    waveform.validate();
    model.validate();
    using namespace std::complex_literals;
    const std::size_t n = waveform.size();
    DistortionOutput out;
    out.waveform = waveform;

    std::size_t trailing = 0;
    while (trailing < n && waveform.i_samples[n - 1 - trailing] == 0.0 &&
           waveform.q_samples[n - 1 - trailing] == 0.0) {
        ++trailing;
    }
    out.padding_warning =
        !model.terms.empty() && static_cast<double>(trailing) * waveform.dt < 10.0 * model.max_tau();

    std::vector<std::complex<double>> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = {waveform.i_samples[k], waveform.q_samples[k]};
    const std::vector<std::complex<double>> x = y;
    const std::complex<double> rot = model.kind == DistortionKind::Intra ? 1.0 : 1i;
    for (const auto& term : model.terms) {
        const double decay = std::exp(-waveform.dt / term.tau);
        std::complex<double> s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            y[k] += rot * term.a * (x[k] - s);
            s = decay * s + (1.0 - decay) * x[k];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        out.waveform.i_samples[k] = y[k].real();
        out.waveform.q_samples[k] = y[k].imag();
    }
    return out;
}

std::size_t default_padding_samples(const SampledWaveform& waveform, const DistortionModel& model) {
    const double span = static_cast<double>(waveform.size()) * waveform.dt;
    const double pad = std::max(10.0 * model.max_tau(), 4.0 * span);
    return static_cast<std::size_t>(std::ceil(pad / waveform.dt));
}

SampledWaveform predistort_waveform(const SampledWaveform& waveform, const DistortionModel& model,
                                    std::size_t extend, std::size_t padding) {
    waveform.validate();
    model.validate();
    const std::size_t n = waveform.size();
    // Cheap screen over a log grid up to Nyquist before any large allocation.
    const double nyquist = 0.5 / waveform.dt;
    for (int j = 0; j <= 200; ++j) {
        const double f = nyquist * std::pow(10.0, -6.0 + 6.0 * j / 200.0);
        if (std::abs(kernel_ft(model, f)) < 1e-6 || std::abs(kernel_ft(model, -f)) < 1e-6) {
            throw NumericError("distortion kernel is not invertible near f = " + std::to_string(f) + " Hz");
        }
    }
    if (padding == 0) padding = default_padding_samples(waveform, model);
    if (n + extend + padding > (std::size_t{1} << 26)) {
        throw NumericError("predistortion needs more than 2^26 samples; the time constants are too long for dt");
    }
    std::size_t m = 1;
    while (m < n + extend + padding) m <<= 1;

    std::vector<std::complex<double>> x(m, 0.0);
    for (std::size_t k = 0; k < n; ++k) x[k] = {waveform.i_samples[k], waveform.q_samples[k]};
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, x);
    const double df = 1.0 / (static_cast<double>(m) * waveform.dt);
    for (std::size_t j = 0; j < m; ++j) {
        const double f = (j < (m + 1) / 2 ? static_cast<double>(j)
                                          : static_cast<double>(j) - static_cast<double>(m)) *
                         df;
        const std::complex<double> h = kernel_ft(model, f);
        if (std::abs(h) < 1e-6) {
            throw NumericError("distortion kernel is not invertible at f = " + std::to_string(f) +
                               " Hz");
        }
        spec[j] /= h;
    }
    std::vector<std::complex<double>> y;
    fft.inv(y, spec);

    SampledWaveform out;
    out.dt = waveform.dt;
    out.start_time = waveform.start_time;
    out.i_samples.resize(n + extend);
    out.q_samples.resize(n + extend);
    for (std::size_t k = 0; k < n + extend; ++k) {
        out.i_samples[k] = y[k].real();
        out.q_samples[k] = y[k].imag();
    }
    return out;
}

}  // namespace pulseforge

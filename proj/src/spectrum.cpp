#include "pulseforge/spectrum.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "pulseforge/errors.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
    if (!(b > a)) return 0.0;
    // Boost's error estimate misbehaves on nanosecond-wide intervals, so map onto [0, 1].
    const double w = b - a;
    return w * Quad::integrate([&](double u) { return f(a + w * u); }, 0.0, 1.0, 20, tol);
}

std::complex<double> cosine_series_ft(const std::vector<double>& coeffs, double tp, double f) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        acc += coeffs[n] * basis_ft(static_cast<int>(n) + 1, tp, f);
    }
    return acc;
}

std::complex<double> numeric_ft(const EnvelopeSpec& spec, double f) {
    const double tp = spec.duration;
    auto integrand = [&](double t, bool imag) {
        const double v = eval_envelope(spec, t);
        const double ph = -kTwoPi * f * t;
        return imag ? v * std::sin(ph) : v * std::cos(ph);
    };
    auto piece = [&](double a, double b) {
        return std::complex<double>(integrate([&](double t) { return integrand(t, false); }, a, b),
                                    integrate([&](double t) { return integrand(t, true); }, a, b));
    };
    if (const auto* s = std::get_if<SquareCosineRiseShape>(&spec.shape)) {
        // Split at the kinks so each piece is smooth.
        return piece(0.0, s->rise_time) + piece(s->rise_time, tp - s->rise_time) +
               piece(tp - s->rise_time, tp);
    }
    return piece(0.0, tp);
}

}  // namespace

std::complex<double> analytic_i_spectrum(const EnvelopeSpec& spec, double f, bool* analytic) {
    const double tp = spec.duration;
    bool closed = true;
    std::complex<double> value;
    if (std::holds_alternative<CosineShape>(spec.shape)) {
        value = spec.amplitude * 0.5 * basis_ft(1, tp, f);
    } else if (const auto* fs = std::get_if<FastSeriesShape>(&spec.shape)) {
        value = spec.amplitude * cosine_series_ft(fs->coeffs, tp, f);
    } else if (const auto* hd = std::get_if<HdSeriesShape>(&spec.shape)) {
        value = spec.amplitude * hd_polynomial(hd->beta_even, f) *
                cosine_series_ft(hd->d_coeffs, tp, f);
    } else {
        closed = false;
        value = numeric_ft(spec, f);
    }
    if (analytic != nullptr) *analytic = closed;
    return value;
}

std::complex<double> analytic_iq_spectrum(const EnvelopeSpec& spec, const DragConfig& drag,
                                          double f, bool* analytic) {
    const std::complex<double> si = analytic_i_spectrum(spec, f, analytic);
    if (drag.variant == DragVariant::NoDrag || drag.beta == 0.0) return si;
    return (1.0 - kTwoPi * drag.beta * f / drag.alpha) * si;
}

double band_energy(const EnvelopeSpec& spec, const DragConfig& drag, double f_l, double f_h,
                   SpectrumComponent component) {
    if (f_h < f_l) throw ConfigError("band energy needs f_l <= f_h");
    auto power = [&](double f) {
        const auto v = component == SpectrumComponent::I ? analytic_i_spectrum(spec, f)
                                                         : analytic_iq_spectrum(spec, drag, f);
        return std::norm(v);
    };
    return integrate(power, f_l, f_h, 1e-10);
}

SpectrumReport analytic_spectrum_report(const EnvelopeSpec& spec, const DragConfig& drag,
                                        const std::vector<double>& freqs,
                                        const std::vector<FrequencyInterval>& bands,
                                        SpectrumComponent band_component) {
    spec.validate();
    SpectrumReport r;
    r.freqs = freqs;
    for (double f : freqs) {
        bool closed = true;
        const auto si = analytic_i_spectrum(spec, f, &closed);
        r.analytic = r.analytic && closed;
        const auto siq = (drag.variant == DragVariant::NoDrag || drag.beta == 0.0)
                             ? si
                             : (1.0 - kTwoPi * drag.beta * f / drag.alpha) * si;
        r.amplitude_i.push_back(std::abs(si));
        r.amplitude_iq.push_back(std::abs(siq));
        r.iq.push_back(siq);
    }
    EnvelopeSpec reference;
    reference.shape = CosineShape{};
    reference.duration = spec.duration;
    reference.rotation_angle = spec.amplitude * spec.base_area();
    reference.amplitude = reference.rotation_angle / reference.base_area();
    for (const auto& band : bands) {
        BandEnergy be;
        be.band = band;
        be.energy = band_energy(spec, drag, band.f_low, band.f_high, band_component);
        const double ref = band_energy(reference, drag, band.f_low, band.f_high, band_component);
        be.suppression_db = (be.energy > 0.0 && ref > 0.0) ? 10.0 * std::log10(be.energy / ref)
                                                           : -INFINITY;
        r.bands.push_back(be);
    }
    return r;
}

SpectrumReport fft_spectrum(const SampledWaveform& waveform, std::size_t zero_pad_to) {
    waveform.validate();
    const std::size_t n = waveform.size();
    if (n == 0) throw ConfigError("cannot take the spectrum of an empty waveform");
    if (zero_pad_to < n) throw ConfigError("zero_pad_to is smaller than the sample count");

    std::vector<std::complex<double>> x_iq(zero_pad_to, 0.0);
    std::vector<std::complex<double>> x_i(zero_pad_to, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        x_iq[k] = {waveform.i_samples[k], -waveform.q_samples[k]};
        x_i[k] = waveform.i_samples[k];
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> y_iq;
    std::vector<std::complex<double>> y_i;
    fft.fwd(y_iq, x_iq);
    fft.fwd(y_i, x_i);

    SpectrumReport r;
    r.analytic = false;
    const double dt = waveform.dt;
    const auto m = static_cast<long>(zero_pad_to);
    r.bin_spacing = 1.0 / (static_cast<double>(m) * dt);
    const long half = m / 2;
    for (long j = -half; j < m - half; ++j) {
        const std::size_t bin = static_cast<std::size_t>((j + m) % m);
        const double f = static_cast<double>(j) * r.bin_spacing;
        const std::complex<double> shift = std::polar(1.0, -kTwoPi * f * waveform.start_time);
        r.freqs.push_back(f);
        r.iq.push_back(dt * y_iq[bin] * shift);
        r.amplitude_iq.push_back(dt * std::abs(y_iq[bin]));
        r.amplitude_i.push_back(dt * std::abs(y_i[bin]));
    }
    return r;
}

std::vector<double> linear_grid(double f_lo, double f_hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t k = 0; k < count; ++k) {
        g[k] = count == 1 ? f_lo
                          : f_lo + (f_hi - f_lo) * static_cast<double>(k) /
                                       static_cast<double>(count - 1);
    }
    return g;
}

}  // namespace pulseforge

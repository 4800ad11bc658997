#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "pulseforge/envelopes.hpp"
#include "pulseforge/fast_synth.hpp"

namespace pulseforge {

enum class SpectrumComponent { I, IQ };

struct BandEnergy {
    FrequencyInterval band;
    double energy = 0.0;
    double suppression_db = 0.0;  // relative to the same-theta, same-duration cosine pulse
};

struct SpectrumReport {
    std::vector<double> freqs;  // Hz, baseband
    std::vector<double> amplitude_i;
    std::vector<double> amplitude_iq;
    std::vector<std::complex<double>> iq;  // complex Omega_IQ(f)
    std::vector<BandEnergy> bands;
    double bin_spacing = 0.0;  // Hz; zero for analytic grids
    bool analytic = true;      // false when a family fell back to quadrature or FFT
};

/// Omega_I(f) = int Omega_I(t) exp(-i 2 pi f t) dt. Closed form for cosine, FAST and HD
/// families; Gaussian and flat-top shapes are integrated numerically, reported via *analytic.
std::complex<double> analytic_i_spectrum(const EnvelopeSpec& spec, double f,
                                         bool* analytic = nullptr);

/// Omega_IQ(f) = [1 - 2 pi beta f / alpha] Omega_I(f), the transform of Omega_I - i Omega_Q.
std::complex<double> analytic_iq_spectrum(const EnvelopeSpec& spec, const DragConfig& drag,
                                          double f, bool* analytic = nullptr);

/// int_{f_l}^{f_h} |Omega(f)|^2 df for the chosen component.
double band_energy(const EnvelopeSpec& spec, const DragConfig& drag, double f_l, double f_h,
                   SpectrumComponent component);

/// Analytic spectrum on a frequency grid with per-band energies and suppression relative
/// to a cosine pulse of equal duration and rotation angle under the same DRAG setting.
SpectrumReport analytic_spectrum_report(const EnvelopeSpec& spec, const DragConfig& drag,
                                        const std::vector<double>& freqs,
                                        const std::vector<FrequencyInterval>& bands,
                                        SpectrumComponent band_component = SpectrumComponent::I);

/// DFT of I - iQ after zero padding to zero_pad_to samples, scaled by dt. Bins are
/// returned in ascending frequency order from -1/(2 dt) up to (but excluding) 1/(2 dt).
SpectrumReport fft_spectrum(const SampledWaveform& waveform, std::size_t zero_pad_to);

/// Uniform grid of `count` points over [f_lo, f_hi].
std::vector<double> linear_grid(double f_lo, double f_hi, std::size_t count);

}  // namespace pulseforge

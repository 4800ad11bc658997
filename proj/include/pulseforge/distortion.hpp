#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include "pulseforge/envelopes.hpp"

namespace pulseforge {

enum class DistortionKind { Intra, Cross };

std::string_view to_string(DistortionKind k);
DistortionKind distortion_kind_from_string(std::string_view s);

struct ExponentialTerm {
    double a = 0.0;    // tail amplitude
    double tau = 0.0;  // s
};

/// Linear envelope distortion with step response 1 + Sum a_j exp(-t / tau_j) (Intra, applied
/// to I and Q separately) or 1 + i Sum a_j exp(-t / tau_j) on the complex envelope I + iQ (Cross).
struct DistortionModel {
    DistortionKind kind = DistortionKind::Intra;
    std::vector<ExponentialTerm> terms;

    void validate() const;
    double max_tau() const;
};

/// h(f) = 1 + [i] Sum_j i a_j 2 pi f tau_j / (1 + i 2 pi f tau_j); the leading i only for Cross.
std::complex<double> kernel_ft(const DistortionModel& model, double f);

struct DistortionOutput {
    SampledWaveform waveform;
    bool padding_warning = false;  // fewer than 10 tau_max of trailing zeros in the input
};

/// Time-domain forward model: one-pole exponential recursion per term, exact for
/// sample-and-hold inputs. Output has the input length.
DistortionOutput apply_distortion(const SampledWaveform& waveform, const DistortionModel& model);

/// Internal FFT padding in samples: max(10 tau_max, 4 t_p) / dt with t_p the waveform length.
std::size_t default_padding_samples(const SampledWaveform& waveform, const DistortionModel& model);

/// Inverse filter in the frequency domain: FFT of I + iQ, divide by h(f), inverse FFT.
/// The transform length is the next power of two >= size + padding. Returns size + extend samples.
SampledWaveform predistort_waveform(const SampledWaveform& waveform, const DistortionModel& model,
                                    std::size_t extend = 0, std::size_t padding = 0);

}  // namespace pulseforge

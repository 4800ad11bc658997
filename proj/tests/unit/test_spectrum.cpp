#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pulseforge/envelopes.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/spectrum.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;
using cd = std::complex<double>;

namespace {

const double kAlpha = angular(-212e6);

EnvelopeSpec cosine(double tp) {
    EnvelopeSpec spec;
    spec.duration = tp;
    return spec.with_area_normalized_amplitude();
}

// Closed form of the raised cosine transform, written out independently of basis_ft.
cd cosine_ft_oracle(double amp, double tp, double f) {
    const double x = f * tp;
    const cd phase = std::exp(cd(0.0, -kPi * x));
    if (std::abs(x) < 1e-12) return amp * tp / 2.0;
    if (std::abs(std::abs(x) - 1.0) < 1e-12) return -amp * tp / 4.0 * phase;
    const double s = std::sin(kPi * x) / (kPi * x);
    return amp * tp / 2.0 * phase * s / (1.0 - x * x);
}

EnvelopeSpec fast_drag_l(double tp, double w_ef = 5.0) {
    HeuristicParams h = heuristic_hyperparams(kAlpha, DragVariant::DragL);
    h.w_ef = w_ef;
    const SuppressionProblem p = h.to_problem(kPi / 2, tp);
    return fast_envelope_spec(solve_fast(p), p).with_area_normalized_amplitude();
}

}  // namespace

TEST_CASE("beta = 0 leaves the IQ spectrum equal to the I spectrum") {
    const EnvelopeSpec spec = fast_drag_l(6e-9);
    const DragConfig drag{0.0, kAlpha, DragVariant::DragL};
    for (double f : linear_grid(-1e9, 1e9, 41)) {
        CHECK(analytic_iq_spectrum(spec, drag, f) == analytic_i_spectrum(spec, f));
    }
}

TEST_CASE("DRAG factor zero") {
    const EnvelopeSpec spec = cosine(6e-9);
    const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
    CHECK(analytic_iq_spectrum(spec, drag, ordinary(kAlpha)) == cd(0.0, 0.0));
}

TEST_CASE("cosine closed form matches the oracle") {
    const EnvelopeSpec spec = cosine(6e-9);
    bool analytic = false;
    for (double f : linear_grid(-700e6, 700e6, 141)) {
        const cd got = analytic_i_spectrum(spec, f, &analytic);
        CHECK(std::abs(got - cosine_ft_oracle(spec.amplitude, spec.duration, f)) < 1e-12 * kPi / 2);
    }
    CHECK(analytic);
}

TEST_CASE("FAST DRAG-L dip near the ef transition") {
    const EnvelopeSpec spec = fast_drag_l(6e-9);
    const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
    double peak = 0.0, dip = 1e300;
    for (double f : linear_grid(-1.5e9, 1.5e9, 3001)) {
        const double a = std::abs(analytic_iq_spectrum(spec, drag, f));
        peak = std::max(peak, a);
        if (std::abs(std::abs(f) - 212e6) <= 12e6) dip = std::min(dip, a);
    }
    CHECK(20.0 * std::log10(dip / peak) < -40.0);
}

TEST_CASE("band energy") {
    const EnvelopeSpec spec = cosine(6e-9);
    const DragConfig none{};
    CHECK(band_energy(spec, none, 200e6, 200e6, SpectrumComponent::I) == 0.0);
    CHECK_THROWS_AS(band_energy(spec, none, 214e6, 194e6, SpectrumComponent::I), ConfigError);

    // 10000-point midpoint oracle on the closed-form transform.
    const int n = 10000;
    const double fl = 194e6, fh = 214e6, h = (fh - fl) / n;
    double oracle = 0.0;
    for (int k = 0; k < n; ++k) oracle += std::norm(cosine_ft_oracle(spec.amplitude, spec.duration, fl + (k + 0.5) * h)) * h;
    CHECK(band_energy(spec, none, fl, fh, SpectrumComponent::I) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("FAST band energy does not exceed the cosine reference") {
    const HeuristicParams h = heuristic_hyperparams(kAlpha, DragVariant::DragL);
    const SuppressionProblem p = h.to_problem(kPi / 2, 6e-9);
    const EnvelopeSpec fast = fast_envelope_spec(solve_fast(p), p).with_area_normalized_amplitude();
    const EnvelopeSpec ref = cosine(6e-9);
    // Optimality holds for the weighted sum over all bands, not band by band.
    double e_fast = 0.0, e_ref = 0.0;
    for (const auto& band : p.intervals) {
        e_fast += band.weight * band_energy(fast, {}, band.f_low, band.f_high, SpectrumComponent::I);
        e_ref += band.weight * band_energy(ref, {}, band.f_low, band.f_high, SpectrumComponent::I);
    }
    CHECK(e_fast <= e_ref);
    const SpectrumReport report = analytic_spectrum_report(fast, {}, linear_grid(0, 1e9, 11), p.intervals);
    REQUIRE(report.bands.size() == p.intervals.size());
    // The ef band carries the largest weight; negative dB means below the cosine reference.
    CHECK(report.bands.front().suppression_db < -20.0);
}

TEST_CASE("FFT spectrum") {
    SUBCASE("zero waveform") {
        SampledWaveform w;
        w.dt = 0.1e-9;
        w.i_samples.assign(60, 0.0);
        w.q_samples.assign(60, 0.0);
        const SpectrumReport r = fft_spectrum(w, 256);
        for (double a : r.amplitude_iq) CHECK(a == 0.0);
        CHECK(r.bin_spacing == doctest::Approx(1.0 / (256 * 0.1e-9)));
        CHECK_THROWS(fft_spectrum(w, 32));
    }
    SUBCASE("agrees with the analytic cosine DRAG spectrum") {
        const EnvelopeSpec spec = cosine(6e-9);
        const DragConfig drag{0.7, kAlpha, DragVariant::DragL};
        const SampledWaveform w = sample_waveform(spec, drag, spec.duration / 600.0);
        const SpectrumReport r = fft_spectrum(w, 4096 * 8);
        double peak = 0.0;
        for (double a : r.amplitude_iq) peak = std::max(peak, a);
        for (std::size_t k = 0; k < r.freqs.size(); ++k) {
            const double f = r.freqs[k];
            if (f < 0.0 || f > 1.2e9) continue;
            // Sample times start at 0, matching the analytic phase reference.
            CHECK(std::abs(r.amplitude_iq[k] - std::abs(analytic_iq_spectrum(spec, drag, f))) < 1e-4 * peak);
        }
    }
    SUBCASE("Parseval") {
        const EnvelopeSpec spec = fast_drag_l(6e-9);
        const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
        const SampledWaveform w = sample_waveform(spec, drag, 0.05e-9);
        double time_energy = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            time_energy += (w.i_samples[k] * w.i_samples[k] + w.q_samples[k] * w.q_samples[k]) * w.dt;
        const SpectrumReport r = fft_spectrum(w, 2048);
        double freq_energy = 0.0;
        for (double a : r.amplitude_iq) freq_energy += a * a * r.bin_spacing;
        CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-3));
    }
}

TEST_CASE("property: |Omega_I| is even for real envelopes") {
    std::vector<EnvelopeSpec> specs{cosine(6e-9), fast_drag_l(6e-9), fast_drag_l(9e-9)};
    EnvelopeSpec g;
    g.shape = GaussianShape{4.0, true};
    g.duration = 8e-9;
    specs.push_back(g.with_area_normalized_amplitude());
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uf(0.0, 1.5e9);
    for (const auto& spec : specs) {
        CAPTURE(shape_name(spec.shape));
        for (int k = 0; k < 50; ++k) {
            const double f = uf(rng);
            const double a = std::abs(analytic_i_spectrum(spec, f));
            CHECK(std::abs(a - std::abs(analytic_i_spectrum(spec, -f))) <= 1e-10 * std::max(a, 1e-12));
        }
    }
}

TEST_CASE("property: DRAG factor zero for arbitrary beta") {
    const EnvelopeSpec spec = fast_drag_l(6e-9);
    for (double beta : {0.3, 0.8, 1.0, 1.7, -0.5}) {
        CAPTURE(beta);
        const DragConfig drag{beta, kAlpha, DragVariant::DragL};
        double peak = 0.0;
        for (double f : linear_grid(-2e9, 2e9, 2001)) peak = std::max(peak, std::abs(analytic_iq_spectrum(spec, drag, f)));
        const double f0 = kAlpha / (kTwoPi * beta);
        CHECK(std::abs(analytic_iq_spectrum(spec, drag, f0)) < 1e-12 * peak);
    }
}

TEST_CASE("property: band energy equals a trapezoid of the report grid") {
    const EnvelopeSpec spec = fast_drag_l(6e-9);
    const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
    const double fl = -260e6, fh = -160e6;
    const auto grid = linear_grid(fl, fh, 2001);
    const SpectrumReport r = analytic_spectrum_report(spec, drag, grid, {{fl, fh, 1.0}}, SpectrumComponent::IQ);
    double trap = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        trap += 0.5 * (r.amplitude_iq[k] * r.amplitude_iq[k] + r.amplitude_iq[k - 1] * r.amplitude_iq[k - 1]) * (grid[k] - grid[k - 1]);
    CHECK(r.bands.at(0).energy == doctest::Approx(trap).epsilon(5e-3));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(r.amplitude_i[k] >= 0.0);
        CHECK(r.amplitude_iq[k] >= 0.0);
    }
}

TEST_CASE("property: ef-band energy is non-increasing in w_ef") {
    const HeuristicParams h = heuristic_hyperparams(kAlpha, DragVariant::DragL);
    double previous = 1e300;
    for (double w : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
        CAPTURE(w);
        const EnvelopeSpec spec = fast_drag_l(6e-9, w);
        const double e = band_energy(spec, {}, h.f_l_ef, h.f_h_ef, SpectrumComponent::I);
        CHECK(e <= previous * (1.0 + 1e-9));
        previous = e;
    }
}

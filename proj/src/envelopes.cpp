#include "pulseforge/envelopes.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// d^k/dt^k cos(w t) = w^k cos(w t + k pi/2)
double cos_derivative(double w, double t, int k) {
    return std::pow(w, k) * std::cos(w * t + 0.5 * kPi * k);
}

// Derivative of order k of Sum_n c_n [1 - cos(2 pi n t / t_p)] with n starting at 1.
double cosine_series_derivative(const std::vector<double>& coeffs, double tp, double t, int k) {
    const double w0 = kTwoPi / tp;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
        const double w = w0 * static_cast<double>(idx + 1);
        if (k == 0) {
            acc += coeffs[idx] * (1.0 - std::cos(w * t));
        } else {
            acc -= coeffs[idx] * cos_derivative(w, t, k);
        }
    }
    return acc;
}

// Probabilists' Hermite polynomial He_k(u).
double hermite_he(int k, double u) {
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = u;
    for (int n = 1; n < k; ++n) {
        const double next = u * cur - n * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double gaussian_sigma(const GaussianShape& g, double tp) { return tp / g.sigma_ratio; }

double gaussian_offset(const GaussianShape& g, double tp) {
    const double sigma = gaussian_sigma(g, tp);
    return g.subtract_offset ? std::exp(-tp * tp / (8.0 * sigma * sigma)) : 0.0;
}

double base_derivative(const EnvelopeShape& shape, double tp, double t, int k) {
    return std::visit(
        Overloaded{
            [&](const CosineShape&) {
                const double w = kTwoPi / tp;
                if (k == 0) return 0.5 * (1.0 - std::cos(w * t));
                return -0.5 * cos_derivative(w, t, k);
            },
            [&](const GaussianShape& g) {
                const double sigma = gaussian_sigma(g, tp);
                const double u = (t - 0.5 * tp) / sigma;
                const double gauss = std::exp(-0.5 * u * u);
                if (k == 0) return gauss - gaussian_offset(g, tp);
                return std::pow(-1.0 / sigma, k) * hermite_he(k, u) * gauss;
            },
            [&](const FastSeriesShape& f) { return cosine_series_derivative(f.coeffs, tp, t, k); },
            [&](const HdSeriesShape& h) {
                double acc = 0.0;
                for (std::size_t n = 0; n < h.beta_even.size(); ++n) {
                    acc += h.beta_even[n] *
                           cosine_series_derivative(h.d_coeffs, tp, t, k + 2 * static_cast<int>(n));
                }
                return acc;
            },
            [&](const SquareCosineRiseShape& s) {
                const double tr = s.rise_time;
                const double w = kPi / tr;
                if (t < tr) {
                    if (k == 0) return 0.5 * (1.0 - std::cos(w * t));
                    return -0.5 * cos_derivative(w, t, k);
                }
                if (t > tp - tr) {
                    const double s_t = tp - t;
                    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                    if (k == 0) return 0.5 * (1.0 - std::cos(w * s_t));
                    return -0.5 * sign * cos_derivative(w, s_t, k);
                }
                return k == 0 ? 1.0 : 0.0;
            },
        },
        shape);
}

}  // namespace

std::string_view shape_name(const EnvelopeShape& shape) {
    return std::visit(Overloaded{
                          [](const CosineShape&) { return std::string_view{"cosine"}; },
                          [](const GaussianShape&) { return std::string_view{"gaussian"}; },
                          [](const FastSeriesShape&) { return std::string_view{"fast_series"}; },
                          [](const HdSeriesShape&) { return std::string_view{"hd_series"}; },
                          [](const SquareCosineRiseShape&) {
                              return std::string_view{"square_cosine_rise"};
                          },
                      },
                      shape);
}

void EnvelopeSpec::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ConfigError("envelope duration must be positive and finite");
    }
    if (!std::isfinite(amplitude)) throw ConfigError("envelope amplitude must be finite");
    std::visit(Overloaded{
                   [](const CosineShape&) {},
                   [](const GaussianShape& g) {
                       if (!(g.sigma_ratio > 0.0)) {
                           throw ConfigError("gaussian sigma_ratio must be positive");
                       }
                   },
                   [&](const FastSeriesShape& f) {
                       if (f.coeffs.empty()) {
                           throw ConfigError("fast_series needs at least one coefficient");
                       }
                       const double sum =
                           std::accumulate(f.coeffs.begin(), f.coeffs.end(), 0.0) * duration;
                       const double scale = std::max(std::abs(rotation_angle), 1e-300);
                       if (std::abs(sum - rotation_angle) > 1e-12 * scale) {
                           throw ConfigError(
                               "fast_series coefficients violate sum(c_n) t_p = theta");
                       }
                   },
                   [](const HdSeriesShape& h) {
                       if (h.d_coeffs.empty()) {
                           throw ConfigError("hd_series needs at least one d coefficient");
                       }
                       if (h.beta_even.empty() || h.beta_even.front() != 1.0) {
                           throw ConfigError("hd_series beta_even must start with beta_0 = 1");
                       }
                   },
                   [&](const SquareCosineRiseShape& s) {
                       if (!(s.rise_time > 0.0) || 2.0 * s.rise_time > duration) {
                           throw ConfigError(
                               "square_cosine_rise needs 0 < rise_time <= duration / 2");
                       }
                   },
               },
               shape);
}

double EnvelopeSpec::base_area() const {
    const double tp = duration;
    return std::visit(
        Overloaded{
            [&](const CosineShape&) { return 0.5 * tp; },
            [&](const GaussianShape& g) {
                const double sigma = gaussian_sigma(g, tp);
                const double full =
                    sigma * std::sqrt(kTwoPi) * std::erf(tp / (2.0 * std::sqrt(2.0) * sigma));
                return full - gaussian_offset(g, tp) * tp;
            },
            [&](const FastSeriesShape& f) {
                return std::accumulate(f.coeffs.begin(), f.coeffs.end(), 0.0) * tp;
            },
            // Derivative terms integrate to odd derivatives of g at the endpoints, which vanish.
            [&](const HdSeriesShape& h) {
                return std::accumulate(h.d_coeffs.begin(), h.d_coeffs.end(), 0.0) * tp;
            },
            [&](const SquareCosineRiseShape& s) { return tp - s.rise_time; },
        },
        shape);
}

EnvelopeSpec EnvelopeSpec::with_area_normalized_amplitude() const {
    EnvelopeSpec out = *this;
    const double area = base_area();
    if (area == 0.0) throw ConfigError("envelope has zero area; cannot normalize amplitude");
    out.amplitude = rotation_angle / area;
    return out;
}

std::string_view to_string(DragVariant v) {
    switch (v) {
        case DragVariant::DragP: return "drag_p";
        case DragVariant::DragL: return "drag_l";
        case DragVariant::NoDrag: return "no_drag";
    }
    return "no_drag";
}

DragVariant drag_variant_from_string(std::string_view s) {
    if (s == "drag_p" || s == "DragP" || s == "P") return DragVariant::DragP;
    if (s == "drag_l" || s == "DragL" || s == "L") return DragVariant::DragL;
    if (s == "no_drag" || s == "NoDrag" || s == "none") return DragVariant::NoDrag;
    throw ConfigError("unknown DRAG variant '" + std::string(s) + "'");
}

void DragConfig::validate() const {
    if (!std::isfinite(beta)) throw ConfigError("DRAG beta must be finite");
    if (variant != DragVariant::NoDrag && !(alpha != 0.0 && std::isfinite(alpha))) {
        throw ConfigError("DRAG needs a nonzero, finite anharmonicity");
    }
}

void SampledWaveform::validate() const {
    if (!(dt > 0.0)) throw ConfigError("waveform dt must be positive");
    if (i_samples.size() != q_samples.size()) {
        throw ConfigError("waveform I and Q sample counts differ");
    }
}

double eval_envelope(const EnvelopeSpec& spec, double t) {
    return eval_envelope_derivative(spec, t, 0);
}

double eval_envelope_derivative(const EnvelopeSpec& spec, double t, int order) {
    if (order < 0) throw ConfigError("derivative order must be non-negative");
    if (t < 0.0 || t > spec.duration) return 0.0;
    return spec.amplitude * base_derivative(spec.shape, spec.duration, t, order);
}

IqSample apply_drag(const EnvelopeSpec& spec, const DragConfig& drag, double t) {
    IqSample out;
    out.i = eval_envelope(spec, t);
    if (drag.variant == DragVariant::NoDrag || drag.beta == 0.0) return out;
    out.q = -drag.beta * eval_envelope_derivative(spec, t, 1) / drag.alpha;
    return out;
}

SampledWaveform sample_waveform(const EnvelopeSpec& spec, const DragConfig& drag, double dt,
                                std::size_t zero_pad) {
    spec.validate();
    drag.validate();
    if (!(dt > 0.0) || dt > spec.duration) {
        throw ConfigError("sampling interval must satisfy 0 < dt <= t_p");
    }
    const auto count = static_cast<std::size_t>(std::floor(spec.duration / dt + 1e-9)) + 1;
    SampledWaveform w;
    w.dt = dt;
    w.i_samples.assign(count + zero_pad, 0.0);
    w.q_samples.assign(count + zero_pad, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        const auto iq = apply_drag(spec, drag, static_cast<double>(k) * dt);
        w.i_samples[k] = iq.i;
        w.q_samples[k] = iq.q;
    }
    return w;
}

double ac_stark_shift(double omega_i, double alpha) {
    if (alpha == 0.0) throw ConfigError("AC Stark estimate needs nonzero anharmonicity");
    return -2.0 * omega_i * omega_i / (4.0 * alpha);
}

}  // namespace pulseforge

#include "pulseforge/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/fitting.hpp"
#include "pulseforge/units.hpp"
#include "parallel.hpp"

namespace pulseforge {
namespace {

std::vector<double> centered_grid(double center, double half_width, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        g[k] = center - half_width + 2.0 * half_width * k / (points - 1);
    }
    return g;
}

// Evaluates f on every grid point (possibly in parallel), then applies shot noise in grid order.
template <class F>
std::vector<double> measure_sweep(const std::vector<double>& grid, const CalibrationConfig& config,
                                  std::uint64_t stream, F&& f) {
    std::vector<double> out(grid.size());
    detail::parallel_for(grid.size(), config.jobs, [&](std::size_t k) { out[k] = f(grid[k]); });
    if (config.shots > 0) {
        std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        for (double& p : out) {
            std::binomial_distribution<int> draw(config.shots, std::clamp(p, 0.0, 1.0));
            p = static_cast<double>(draw(rng)) / config.shots;
        }
    }
    return out;
}

std::size_t crossing_window(const CalibrationConfig& config) { return config.shots > 0 ? 4 : 2; }

GateSimulator make_sim(const TransmonModel& model, const PulseShape& shape, const GateCalibration& c,
                       const CalibrationConfig& config) {
    return GateSimulator(model, shape, c, config.integrator);
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmin(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void CalibrationConfig::validate() const {
    if (max_loop_iters < 1) throw ConfigError("max_loop_iters must be >= 1");
    if (rabi_points < 5 || qscale_points < 3 || beta_coarse_points < 3 || beta_fine_points < 3 ||
        virtual_z_points < 3 || bangbang_points < 3) {
        throw ConfigError("calibration sweeps need at least three points (Rabi five)");
    }
    if (phase_amp_reps.empty() || bangbang_reps.empty()) {
        throw ConfigError("repetition lists must not be empty");
    }
    for (int n : phase_amp_reps) {
        if (n < 1) throw ConfigError("phase_amp_reps entries must be >= 1");
    }
    for (int n : bangbang_reps) {
        if (n < 1) throw ConfigError("bangbang_reps entries must be >= 1");
    }
    if (leakage_rb_lengths.empty()) throw ConfigError("leakage_rb_lengths must not be empty");
    for (int n : leakage_rb_lengths) {
        if (n < 1) throw ConfigError("leakage_rb_lengths entries must be >= 1");
    }
    if (leakage_rb_sequences < 1) throw ConfigError("leakage_rb_sequences must be >= 1");
    if (!(virtual_z_span > 0.0)) throw ConfigError("virtual_z_span must be positive");
    if (!(qscale_max > qscale_min)) throw ConfigError("qscale range is empty");
    if (shots < 0) throw ConfigError("shots must be >= 0");
    if (integrator.steps < 1) throw ConfigError("integrator steps must be >= 1");
}

double excited_population(const GateSimulator& sim, const std::vector<GateOp>& gates) {
    const int d = sim.model().levels;
    const auto [v, frame] = sim.run_vec(vectorize(DensityMatrix::basis(d, 0).rho), gates);
    (void)frame;
    return v(1 + d).real();
}

double area_theorem_amplitude(const PulseShape& shape, double t_p) {
    EnvelopeSpec spec = shape.spec;
    spec.duration = t_p;
    spec.amplitude = 1.0;
    const double area = spec.base_area();
    if (!(std::abs(area) > 0.0)) throw CalibrationError("pulse shape has zero area");
    return spec.rotation_angle / area;
}

RabiResult calibrate_amplitude_rabi(const TransmonModel& model, const PulseShape& shape,
                                    const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    const double a_pi = 2.0 * area_theorem_amplitude(shape, calib.t_p);
    RabiResult r;
    r.sweep = centered_grid(a_pi, 0.5 * a_pi, config.rabi_points);
    const DensityMatrix ground = DensityMatrix::basis(model.levels, 0);
    r.p1 = measure_sweep(r.sweep, config, 1, [&](double a) {
        GateCalibration c = calib;
        c.amplitude = a;
        const auto [spec, drag] = calibrated_pulse(shape, c, model);
        const DriveFunction drive = [spec = spec, drag = drag](double t) { return apply_drag(spec, drag, t); };
        return evolve(ground, model, drive, c.t_p, 0.0, 0.0, 0.0, config.integrator).population(1);
    });
    const std::size_t k = argmax(r.p1);
    if (k == 0 || k + 1 == r.p1.size() || r.p1[k] < 0.5) {
        throw CalibrationError("Rabi sweep shows no oscillation maximum inside the amplitude range");
    }
    r.amplitude = 0.5 * quadratic_vertex(r.sweep, r.p1, k);
    return r;
}

namespace {

struct FringeFit {
    double a = 0.0, c = 0.0, s = 0.0, omega = 0.0, decay = kInfiniteTime, sse = 0.0;
};

FringeFit fit_fringe(const std::vector<double>& t, const std::vector<double>& y, double omega,
                     double decay) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double env = std::isfinite(decay) ? std::exp(-t[k] / decay) : 1.0;
        m(k, 0) = 1.0;
        m(k, 1) = env * std::cos(omega * t[k]);
        m(k, 2) = env * std::sin(omega * t[k]);
        rhs(k) = y[k];
    }
    const Eigen::Vector3d sol = m.colPivHouseholderQr().solve(rhs);
    return {sol(0), sol(1), sol(2), omega, decay, (m * sol - rhs).squaredNorm()};
}

}  // namespace

RamseyResult calibrate_frequency_ramsey(const TransmonModel& model, const PulseShape& shape,
                                        const GateCalibration& calib, const RamseyOptions& options,
                                        const CalibrationConfig& config) {
    config.validate();
    if (options.points < 8 || !(options.max_delay > 0.0)) {
        throw ConfigError("Ramsey needs >= 8 delays and a positive max_delay");
    }
    const double f_est = calib.drive_freq > 0.0 ? calib.drive_freq : model.omega_q / kTwoPi;
    GateCalibration c = calib;
    c.drive_freq = f_est + options.offset;
    const GateSimulator sim = make_sim(model, shape, c, config);

    RamseyResult r;
    for (int k = 0; k < options.points; ++k) {
        r.delays.push_back(options.max_delay * k / (options.points - 1));
    }
    r.p1 = measure_sweep(r.delays, config, 2, [&](double tau) {
        return excited_population(sim, {GateOp::x90(), GateOp::idle(tau), GateOp::x90()});
    });

    const auto [lo, hi] = std::minmax_element(r.p1.begin(), r.p1.end());
    if (*hi - *lo < 1e-4) {
        r.flat = true;
        r.qubit_freq = c.drive_freq;
        return r;
    }

    // Frequency grid up to Nyquist, quarter-bin spacing.
    const double dt = r.delays[1] - r.delays[0];
    const double w_max = kPi / dt;
    const double w_step = 0.25 * kTwoPi / options.max_delay;
    FringeFit best;
    best.sse = INFINITY;
    for (double w = 0.0; w <= w_max; w += w_step) {
        const FringeFit f = fit_fringe(r.delays, r.p1, w, kInfiniteTime);
        if (f.sse < best.sse) best = f;
    }
    double omega = best.omega;
    double decay = kInfiniteTime;
    const double t_hi = options.max_delay * 1e4;
    for (int pass = 0; pass < 3; ++pass) {
        const auto wr = boost::math::tools::brent_find_minima(
            [&](double w) { return fit_fringe(r.delays, r.p1, w, decay).sse; },
            std::max(0.0, omega - w_step), omega + w_step, 52);
        omega = wr.first;
        const auto tr = boost::math::tools::brent_find_minima(
            [&](double lt) { return fit_fringe(r.delays, r.p1, omega, std::exp(lt)).sse; },
            std::log(options.max_delay * 1e-2), std::log(t_hi), 52);
        decay = std::exp(tr.first);
        if (decay > 0.99 * t_hi) decay = kInfiniteTime;
    }
    const FringeFit fit = fit_fringe(r.delays, r.p1, omega, decay);
    r.fringe_freq = omega / kTwoPi;
    r.fringe_amplitude = std::hypot(fit.c, fit.s);
    r.decay_time = decay;
    // Real fringes swing by ~0.5; leaked population beating during the idle leaves ripples of ~1e-3.
    if (r.fringe_amplitude < 0.02 || r.fringe_freq < 0.5 / options.max_delay) {
        r.flat = true;
        r.qubit_freq = c.drive_freq;
        return r;
    }
    // The estimate is assumed closer to the qubit than the deliberate offset.
    r.qubit_freq = c.drive_freq - std::copysign(r.fringe_freq, options.offset);
    return r;
}

QscaleResult calibrate_beta_qscale(const TransmonModel& model, const PulseShape& shape,
                                   const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    const std::vector<GateOp> xy{GateOp::x90(), GateOp::x90(), GateOp::y90()};
    const std::vector<GateOp> yx{GateOp::y90(), GateOp::y90(), GateOp::x90()};
    double lo = config.qscale_min, hi = config.qscale_max;
    QscaleResult r;
    for (int attempt = 0; attempt < 2; ++attempt) {
        r.sweep = centered_grid(0.5 * (lo + hi), 0.5 * (hi - lo), config.qscale_points);
        r.difference = measure_sweep(r.sweep, config, 3 + attempt, [&](double b) {
            GateCalibration c = calib;
            c.beta = b;
            const GateSimulator sim = make_sim(model, shape, c, config);
            return excited_population(sim, xy) - excited_population(sim, yx);
        });
        double spread = 0.0;
        for (double d : r.difference) spread = std::max(spread, std::abs(d));
        if (spread < 1e-7) {
            r.degenerate = true;
            r.beta = calib.beta;
            return r;
        }
        try {
            r.beta = find_crossing(r.sweep, r.difference, 0.0, 0.5, crossing_window(config)).x;
            return r;
        } catch (const CalibrationError&) {
            const double w = hi - lo;
            lo -= w;
            hi += w;
        }
    }
    throw CalibrationError("Q-scale curves do not cross in the widened beta range");
}

double rb_leakage_population(const GateSimulator& sim, int length, int n_sequences,
                             std::uint64_t seed, int jobs) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> seqs(static_cast<std::size_t>(n_sequences));
    for (auto& s : seqs) {
        s.resize(static_cast<std::size_t>(length));
        for (auto& c : s) c = static_cast<int>(rng() % CliffordTable::kSize);
    }
    const SimulatedGateSet gates(sim);
    std::vector<double> leak(seqs.size());
    detail::parallel_for(seqs.size(), jobs, [&](std::size_t k) {
        const Matrix rho = gates.run(rb_native_gates(seqs[k]));
        leak[k] = 1.0 - rho(0, 0).real() - rho(1, 1).real();
    });
    double sum = 0.0;
    for (double v : leak) sum += v;
    return sum / static_cast<double>(leak.size());
}

SweepResult calibrate_beta_leakage(const TransmonModel& model, const PulseShape& shape,
                                   const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    const int coarse_len = config.leakage_rb_lengths.front();
    const int fine_len = config.leakage_rb_lengths.back();
    auto leakage_at = [&](double b, int length) {
        GateCalibration c = calib;
        c.beta = b;
        const GateSimulator sim = make_sim(model, shape, c, config);
        return rb_leakage_population(sim, length, config.leakage_rb_sequences, config.seed);
    };

    const std::vector<double> coarse = centered_grid(1.0, 1.0, config.beta_coarse_points);
    const std::vector<double> lc =
        measure_sweep(coarse, config, 5, [&](double b) { return leakage_at(b, coarse_len); });
    const auto [lo, hi] = std::minmax_element(lc.begin(), lc.end());
    if (*hi - *lo < 1e-12) throw CalibrationError("leaked population does not depend on beta");
    const double center = quadratic_vertex(coarse, lc, argmin(lc));

    SweepResult r;
    r.sweep = centered_grid(center, 0.2, config.beta_fine_points);
    r.signal = measure_sweep(r.sweep, config, 6, [&](double b) { return leakage_at(b, fine_len); });
    r.value = quadratic_vertex(r.sweep, r.signal, argmin(r.signal));
    return r;
}

std::vector<GateOp> phase_amplification_circuit(int n) {
    std::vector<GateOp> g;
    for (int k = 0; k < n; ++k) {
        g.push_back(GateOp::x90());
        g.push_back(GateOp::x90());
        g.push_back(GateOp::xm90());
        g.push_back(GateOp::xm90());
    }
    g.push_back(GateOp::y90());
    return g;
}

std::vector<GateOp> bangbang_circuit(int n) {
    std::vector<GateOp> g{GateOp::x90()};
    for (int k = 0; k < 4 * n; ++k) g.push_back(GateOp::x90());
    return g;
}

namespace {

// Successive crossing estimates over the repetition counts, each sweep centred on the previous
// estimate. The first count widens its range (up to 8x) until the signal crosses; a later count
// whose signal has no crossing (saturated) leaves the estimate in place.
template <class Signal>
SweepResult null_phase_signal(double center, double span, int points, const CalibrationConfig& config,
                              std::uint64_t stream, Signal&& signal) {
    SweepResult r;
    double estimate = center;
    bool found = false;
    std::uint64_t s = stream;
    for (int n : config.phase_amp_reps) {
        double width = span;
        for (int attempt = 0; attempt < (found ? 1 : 4); ++attempt, width *= 2.0) {
            const std::vector<double> grid = centered_grid(estimate, width, points);
            const std::vector<double> y =
                measure_sweep(grid, config, s++, [&](double v) { return signal(v, n) - 0.5; });
            try {
                estimate = find_crossing(grid, y, 0.0, estimate, crossing_window(config)).x;
                found = true;
                r.sweep = grid;
                r.signal = y;
                break;
            } catch (const CalibrationError&) {
                if (!found) {
                    r.sweep = grid;
                    r.signal = y;
                }
            }
        }
    }
    if (!found) throw CalibrationError("phase-error signal never crosses zero in the sweep range");
    r.value = estimate;
    return r;
}

}  // namespace

SweepResult calibrate_virtual_z(const TransmonModel& model, const PulseShape& shape,
                                const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    const GateSimulator base = make_sim(model, shape, calib, config);
    return null_phase_signal(calib.virtual_z, config.virtual_z_span, config.virtual_z_points, config, 10,
                             [&](double phi, int n) {
        return excited_population(base.with_virtual_z(phi), phase_amplification_circuit(n));
    });
}

SweepResult calibrate_beta_phase(const TransmonModel& model, const PulseShape& shape,
                                 const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    return null_phase_signal(calib.beta, 0.2, config.beta_fine_points, config, 20,
                             [&](double b, int n) {
                                 GateCalibration c = calib;
                                 c.beta = b;
                                 return excited_population(make_sim(model, shape, c, config),
                                                           phase_amplification_circuit(n));
                             });
}

BangBangResult refine_amplitude_bangbang(const TransmonModel& model, const PulseShape& shape,
                                         const GateCalibration& calib, const CalibrationConfig& config) {
    config.validate();
    if (!(calib.amplitude > 0.0)) throw CalibrationError("BangBang needs an initial amplitude");
    const double sigma_p = std::sqrt(0.25 / 1000.0);
    BangBangResult r;
    double center = calib.amplitude;
    std::uint64_t stream = 30;
    bool first = true;
    for (int n : config.bangbang_reps) {
        // The first count may widen its window; p1 is monotonic within +-(4n+1)^-1 around the
        // optimum, so later windows stay inside that range.
        double half = center * 0.5 / (4.0 * n + 1.0);
        for (int attempt = 0;; ++attempt, half *= 1.5) {
            const std::vector<double> grid = centered_grid(center, half, config.bangbang_points);
            const std::vector<double> p1 = measure_sweep(grid, config, stream++, [&](double a) {
                GateCalibration c = calib;
                c.amplitude = a;
                return excited_population(make_sim(model, shape, c, config), bangbang_circuit(n));
            });
            try {
                const Crossing cr = find_crossing(grid, p1, 0.5, center, crossing_window(config));
                center = cr.x;
                r.reps = n;
                r.slope = cr.slope;
                r.ci_halfwidth = sigma_p / std::abs(cr.slope);
                r.ci_per_rep.push_back(r.ci_halfwidth);
                break;
            } catch (const CalibrationError&) {
                // A degraded signal at a high count keeps the previous estimate.
                if (!first) break;
                if (attempt >= 2) throw;
            }
        }
        first = false;
    }
    r.amplitude = center;
    return r;
}

GateCalibration initial_calibration(const TransmonModel& model, const PulseShape& shape) {
    (void)model;
    GateCalibration c;
    c.t_p = shape.spec.duration;
    c.amplitude = area_theorem_amplitude(shape, c.t_p);
    c.beta = shape.variant == DragVariant::DragP ? 0.5
             : shape.variant == DragVariant::DragL ? 1.0
                                                   : 0.0;
    return c;
}

GateCalibration calibration_loop_iteration(const TransmonModel& model, const PulseShape& shape,
                                           const GateCalibration& calib,
                                           const CalibrationConfig& config,
                                           std::vector<CalibrationStep>* log) {
    GateCalibration c = calib;
    auto note = [&](const char* name, double v) {
        if (log != nullptr) log->push_back({name, v});
    };
    switch (shape.variant) {
        case DragVariant::DragL:
            c.virtual_z = calibrate_virtual_z(model, shape, c, config).value;
            note("virtual_z", c.virtual_z);
            c.amplitude = refine_amplitude_bangbang(model, shape, c, config).amplitude;
            note("bangbang", c.amplitude);
            break;
        case DragVariant::DragP:
            c.amplitude = refine_amplitude_bangbang(model, shape, c, config).amplitude;
            note("bangbang", c.amplitude);
            c.beta = calibrate_beta_phase(model, shape, c, config).value;
            note("beta_phase", c.beta);
            break;
        case DragVariant::NoDrag:
            c.amplitude = refine_amplitude_bangbang(model, shape, c, config).amplitude;
            note("bangbang", c.amplitude);
            break;
    }
    return c;
}

CalibrationReport full_calibration(const TransmonModel& model, const PulseShape& shape,
                                   const CalibrationConfig& config, const GateCalibration* initial) {
    config.validate();
    model.validate();
    CalibrationReport rep;
    GateCalibration c = initial != nullptr ? *initial : initial_calibration(model, shape);
    if (!(c.t_p > 0.0)) c.t_p = shape.spec.duration;
    if (!(c.amplitude > 0.0)) c.amplitude = area_theorem_amplitude(shape, c.t_p);

    c.amplitude = calibrate_amplitude_rabi(model, shape, c, config).amplitude;
    rep.steps.push_back({"rabi", c.amplitude});

    const RamseyResult ramsey = calibrate_frequency_ramsey(model, shape, c, {}, config);
    c.drive_freq = ramsey.qubit_freq;
    rep.steps.push_back({"ramsey", c.drive_freq});

    if (shape.variant == DragVariant::DragP) {
        const QscaleResult q = calibrate_beta_qscale(model, shape, c, config);
        if (!q.degenerate) c.beta = q.beta;
        rep.steps.push_back({"qscale", c.beta});
    } else if (shape.variant == DragVariant::DragL) {
        c.beta = calibrate_beta_leakage(model, shape, c, config).value;
        rep.steps.push_back({"leakage_beta", c.beta});
    }

    for (int it = 0; it < config.max_loop_iters; ++it) {
        c = calibration_loop_iteration(model, shape, c, config, &rep.steps);
    }
    rep.calib = c;
    return rep;
}

}  // namespace pulseforge

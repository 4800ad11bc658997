#include "pulseforge/benchmarking.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"
#include "parallel.hpp"

namespace pulseforge {
namespace {

double normalized_purity(const Matrix& rho) {
    const Eigen::Matrix2cd block = rho.topLeftCorner<2, 2>();
    const double tr = block.trace().real();
    if (!(tr > 1e-12)) return 0.0;
    const Eigen::Matrix2cd q = block / tr;
    return 2.0 * (q * q).trace().real() - 1.0;
}

std::array<double, 3> level_populations(const Matrix& rho) {
    const double pg = rho(0, 0).real();
    const double pe = rho.rows() > 1 ? rho(1, 1).real() : 0.0;
    double pf = 0.0;
    for (Eigen::Index k = 2; k < rho.rows(); ++k) pf += rho(k, k).real();
    return {pg, pe, pf};
}

double resolve_gate_count(double n_g) {
    return n_g > 0.0 ? n_g : CliffordTable::instance().avg_gate_count();
}

// Flattened (x, y) pairs over every sequence of every length.
template <class Pick>
void gather(const RbOutcome& o, Pick pick, std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t l = 0; l < o.lengths.size(); ++l) {
        for (std::size_t s = 0; s < o.populations[l].size(); ++s) {
            x.push_back(static_cast<double>(o.lengths[l]));
            y.push_back(pick(l, s));
        }
    }
}

ExponentialFit checked_fit(const std::vector<double>& x, const std::vector<double>& y,
                           const char* what) {
    const ExponentialFit f = fit_exponential(x, y);
    if (!std::isfinite(f.p) || !std::isfinite(f.a) || !std::isfinite(f.b)) {
        throw NumericError(std::string(what) + " fit did not converge (residual " +
                           std::to_string(f.sse) + ")");
    }
    return f;
}

}  // namespace

SimulatedGateSet::SimulatedGateSet(GateSimulator sim) : sim_(std::move(sim)) {}

SimulatedGateSet::SimulatedGateSet(const TransmonModel& model, const PulseShape& shape,
                                   const GateCalibration& calib)
    : sim_(model, shape, calib) {}

Matrix SimulatedGateSet::run(const std::vector<NativeGate>& gates) const {
    const bool y_as_vz = sim_.shape().variant == DragVariant::DragL;
    const double idle = sim_.calibration().gate_time();
    std::vector<GateOp> ops;
    ops.reserve(gates.size() * 3);
    for (NativeGate g : gates) {
        switch (g) {
            case NativeGate::I: ops.push_back(GateOp::idle(idle)); break;
            case NativeGate::X90: ops.push_back(GateOp::x90()); break;
            case NativeGate::Xm90: ops.push_back(GateOp::xm90()); break;
            case NativeGate::Y90:
            case NativeGate::Ym90:
                if (y_as_vz) ops.push_back(GateOp::vz(-0.5 * kPi));
                if (y_as_vz) ops.push_back(g == NativeGate::Y90 ? GateOp::x90() : GateOp::xm90());
                else ops.push_back(g == NativeGate::Y90 ? GateOp::y90() : GateOp::ym90());
                if (y_as_vz) ops.push_back(GateOp::vz(0.5 * kPi));
                break;
        }
    }
    const int d = levels();
    const Vector v0 = vectorize(DensityMatrix::basis(d, 0).rho);
    const auto [v, frame] = sim_.run_vec(v0, ops);
    const Vector undo = frame_phases(d, frame).conjugate().cwiseProduct(v);
    return unvectorize(undo, d);
}

IdealGateSet::IdealGateSet(double eps, int levels) : eps_(eps), levels_(levels) {
    if (!(eps >= 0.0 && eps <= 0.5)) throw ConfigError("depolarizing error must lie in [0, 0.5]");
    if (levels < 2) throw ConfigError("gate set needs at least two levels");
}

Matrix IdealGateSet::run(const std::vector<NativeGate>& gates) const {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    rho(0, 0) = 1.0;
    const double p = 1.0 - 2.0 * eps_;
    for (NativeGate g : gates) {
        const Eigen::Matrix2cd u = native_unitary(g);
        rho = u * rho * u.adjoint();
        rho = p * rho + (1.0 - p) * 0.5 * rho.trace() * Eigen::Matrix2cd::Identity();
    }
    Matrix out = Matrix::Zero(levels_, levels_);
    out.topLeftCorner<2, 2>() = rho;
    return out;
}

std::vector<std::vector<std::vector<int>>> draw_sequences(const RbConfig& config) {
    if (config.n_sequences < 1) throw ConfigError("RB needs at least one sequence per length");
    std::vector<int> distinct = config.lengths;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw ConfigError("RB needs at least two distinct lengths");
    for (int n : config.lengths) {
        if (n < 0) throw ConfigError("RB lengths must be non-negative");
    }
    std::mt19937_64 rng(config.seed);
    std::vector<std::vector<std::vector<int>>> out;
    for (int n : config.lengths) {
        std::vector<std::vector<int>> per_length;
        for (int s = 0; s < config.n_sequences; ++s) {
            std::vector<int> seq(static_cast<std::size_t>(n));
            for (auto& c : seq) c = static_cast<int>(rng() % CliffordTable::kSize);
            per_length.push_back(std::move(seq));
        }
        out.push_back(std::move(per_length));
    }
    return out;
}

std::vector<NativeGate> rb_native_gates(const std::vector<int>& cliffords) {
    const auto& table = CliffordTable::instance();
    std::vector<NativeGate> gates;
    int total = 0;
    for (int c : cliffords) {
        const auto& seq = table.sequence(c);
        gates.insert(gates.end(), seq.begin(), seq.end());
        total = table.compose(total, c);
    }
    const auto& rec = table.sequence(table.inverse(total));
    gates.insert(gates.end(), rec.begin(), rec.end());
    return gates;
}

RbOutcome run_rb(const GateSet& gates, const RbConfig& config) {
    const auto sequences = draw_sequences(config);
    RbOutcome out;
    out.lengths = config.lengths;
    out.populations.assign(sequences.size(), {});
    out.purity.assign(sequences.size(), {});
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t l = 0; l < sequences.size(); ++l) {
        out.populations[l].resize(sequences[l].size());
        out.purity[l].resize(sequences[l].size());
        for (std::size_t s = 0; s < sequences[l].size(); ++s) tasks.emplace_back(l, s);
    }
    detail::parallel_for(tasks.size(), config.jobs, [&](std::size_t k) {
        const auto [l, s] = tasks[k];
        const Matrix rho = gates.run(rb_native_gates(sequences[l][s]));
        out.populations[l][s] = level_populations(rho);
        out.purity[l][s] = normalized_purity(rho);
    });
    return out;
}

RbFit fit_rb(const RbOutcome& outcome, double gates_per_clifford) {
    std::vector<double> x, y;
    gather(outcome, [&](std::size_t l, std::size_t s) { return outcome.populations[l][s][0]; }, x, y);
    RbFit r;
    r.fit = checked_fit(x, y, "RB");
    r.eps_cl = 0.5 * (1.0 - r.fit.p);
    r.eps_g = r.eps_cl / resolve_gate_count(gates_per_clifford);
    return r;
}

LeakageFit fit_leakage_rb(const RbOutcome& outcome, double gates_per_clifford) {
    std::vector<double> x, y;
    gather(outcome, [&](std::size_t l, std::size_t s) { return outcome.populations[l][s][2]; }, x, y);
    LeakageFit r;
    r.fit = checked_fit(x, y, "leakage RB");
    r.l_g = r.fit.a * (1.0 - r.fit.p) / resolve_gate_count(gates_per_clifford);
    return r;
}

PurityFit fit_purity_rb(const RbOutcome& outcome, double gates_per_clifford) {
    std::vector<double> x, y;
    gather(outcome, [&](std::size_t l, std::size_t s) { return outcome.purity[l][s]; }, x, y);
    PurityFit r;
    r.fit = checked_fit(x, y, "purity RB");
    r.u = r.fit.p;
    r.eps_inc = 0.5 * (1.0 - std::sqrt(r.u)) / resolve_gate_count(gates_per_clifford);
    return r;
}

void AssignmentMatrix::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(beta.row(i).sum() - 1.0) > 1e-9) {
            throw ConfigError("assignment matrix row " + std::to_string(i) + " does not sum to 1");
        }
        for (int j = 0; j < 3; ++j) {
            if (!(beta(i, j) >= 0.0)) throw ConfigError("assignment matrix entries must be >= 0");
        }
    }
}

CorrectedPopulations correct_readout(const Eigen::Vector3d& p_meas, const AssignmentMatrix& beta) {
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(beta.beta.transpose());
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) {
        throw NumericError("assignment matrix is singular");
    }
    CorrectedPopulations out;
    out.p = lu.solve(p_meas);
    out.has_negative = (out.p.array() < 0.0).any();
    return out;
}

namespace {

RbOutcome transform_outcome(const RbOutcome& in, const Eigen::Matrix3d& m) {
    RbOutcome out = in;
    for (auto& per_length : out.populations) {
        for (auto& p : per_length) {
            const Eigen::Vector3d v = m * Eigen::Vector3d(p[0], p[1], p[2]);
            p = {v(0), v(1), v(2)};
        }
    }
    return out;
}

}  // namespace

RbOutcome apply_assignment(const RbOutcome& outcome, const AssignmentMatrix& beta) {
    return transform_outcome(outcome, beta.beta.transpose());
}

RbOutcome correct_outcome(const RbOutcome& outcome, const AssignmentMatrix& beta) {
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(beta.beta.transpose());
    if (!lu.isInvertible()) throw NumericError("assignment matrix is singular");
    return transform_outcome(outcome, lu.inverse());
}

SampledWaveform render_sequence(const WaveformExperiment& exp, const std::vector<GateOp>& gates,
                                double tail) {
    if (!(exp.dt > 0.0)) throw ConfigError("waveform sample interval must be positive");
    const auto [spec, drag] = calibrated_pulse(exp.shape, exp.calib, exp.model);

    struct Placed {
        double start;
        double phase;
    };
    std::vector<Placed> pulses;
    double frame = 0.0;
    double t = 0.0;
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateOp::Kind::VirtualZ: frame += g.value; break;
            case GateOp::Kind::Idle: t += g.value; break;
            case GateOp::Kind::Pulse:
                frame += 0.5 * exp.calib.virtual_z;
                pulses.push_back({t, frame + g.value});
                frame += 0.5 * exp.calib.virtual_z;
                t += exp.calib.gate_time();
                break;
        }
    }
    const double total = t + tail;
    const auto n = static_cast<std::size_t>(std::floor(total / exp.dt + 1e-9)) + 1;

    SampledWaveform w;
    w.dt = exp.dt;
    w.i_samples.assign(n, 0.0);
    w.q_samples.assign(n, 0.0);
    const double tp = exp.calib.t_p;
    for (const auto& p : pulses) {
        const auto k0 = static_cast<std::size_t>(std::ceil(p.start / exp.dt - 1e-9));
        const std::complex<double> rot = std::polar(1.0, -p.phase);
        for (std::size_t k = k0; k < n; ++k) {
            const double local = static_cast<double>(k) * exp.dt - p.start;
            if (local > tp) break;
            const IqSample s = apply_drag(spec, drag, local);
            const std::complex<double> z = rot * std::complex<double>(s.i, s.q);
            w.i_samples[k] += z.real();
            w.q_samples[k] += z.imag();
        }
    }
    return w;
}

double waveform_excited_population(const WaveformExperiment& exp, const std::vector<GateOp>& gates,
                                   const DistortionModel* line) {
    SampledWaveform w = render_sequence(exp, gates);
    if (line != nullptr && !line->terms.empty()) {
        if (exp.predistort) w = predistort_waveform(w, *line);
        w = apply_distortion(w, *line).waveform;
    }
    const std::size_t n = w.size();
    if (n < 2) throw ConfigError("sequence is shorter than one sample");
    const double dt = w.dt;
    DriveFunction drive = [&w, dt, n](double t) {
        const double x = std::clamp(t / dt, 0.0, static_cast<double>(n - 1));
        const auto k = std::min(static_cast<std::size_t>(x), n - 2);
        const double f = x - static_cast<double>(k);
        return IqSample{(1.0 - f) * w.i_samples[k] + f * w.i_samples[k + 1],
                        (1.0 - f) * w.q_samples[k] + f * w.q_samples[k + 1]};
    };
    const double duration = static_cast<double>(n - 1) * dt;
    IntegratorOptions opt;
    opt.steps = std::max(1, static_cast<int>((n - 1) / static_cast<std::size_t>(std::max(1, exp.samples_per_step))));
    const double detuning =
        exp.calib.drive_freq > 0.0 ? kTwoPi * exp.calib.drive_freq - exp.model.omega_q : 0.0;
    const DensityMatrix rho =
        evolve(DensityMatrix::basis(exp.model.levels, 0), exp.model, drive, duration, 0.0, detuning, 0.0, opt);
    return rho.population(1);
}

std::vector<GateOp> i_distortion_circuit(int n_pairs, double phi) {
    std::vector<GateOp> g{GateOp::x90()};
    for (int k = 0; k < n_pairs; ++k) {
        g.push_back(GateOp::x90());
        g.push_back(GateOp::x90());
        g.push_back(GateOp::y90_shifted(phi));
        g.push_back(GateOp::y90_shifted(phi));
    }
    g.push_back(GateOp::y90());
    return g;
}

std::vector<GateOp> c_distortion_circuit(int n_pairs) {
    std::vector<GateOp> g;
    for (int k = 0; k < n_pairs; ++k) {
        g.push_back(GateOp::x90());
        g.push_back(GateOp::x90());
        g.push_back(GateOp::xm90());
        g.push_back(GateOp::xm90());
    }
    g.push_back(GateOp::y90());
    return g;
}

std::vector<AxisShiftScan> i_distortion_characterization(const WaveformExperiment& exp,
                                                         const DistortionModel* line,
                                                         const std::vector<double>& t_d_values,
                                                         const std::vector<double>& phi_grid,
                                                         int n_pairs) {
    if (phi_grid.size() < 3) throw ConfigError("axis-shift sweep needs at least three phases");
    if (n_pairs < 1) throw ConfigError("axis-shift circuit needs at least one pair");
    std::vector<AxisShiftScan> out;
    for (double td : t_d_values) {
        WaveformExperiment e = exp;
        e.calib.t_d = td;
        AxisShiftScan scan;
        scan.t_d = td;
        scan.phi = phi_grid;
        for (double phi : phi_grid) {
            scan.p_e.push_back(waveform_excited_population(e, i_distortion_circuit(n_pairs, phi), line));
        }
        const Crossing c = find_crossing(scan.phi, scan.p_e, 0.5, 0.0);
        scan.phi_s = c.x;
        scan.phi_s_stderr = c.stderr_x;
        out.push_back(std::move(scan));
    }
    return out;
}

std::vector<std::vector<double>> c_distortion_characterization(const WaveformExperiment& exp,
                                                               const DistortionModel* line,
                                                               const std::vector<double>& t_d_values,
                                                               const std::vector<int>& n_reps) {
    std::vector<std::vector<double>> grid;
    for (double td : t_d_values) {
        WaveformExperiment e = exp;
        e.calib.t_d = td;
        std::vector<double> row;
        for (int n : n_reps) {
            if (n < 0) throw ConfigError("repetition counts must be non-negative");
            row.push_back(waveform_excited_population(e, c_distortion_circuit(n), line));
        }
        grid.push_back(std::move(row));
    }
    return grid;
}

}  // namespace pulseforge

#include "pulseforge/simulator.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

using namespace std::complex_literals;
using cd = std::complex<double>;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Superoperator of rho -> -i[H, rho].
Matrix commutator_superop(const Matrix& h) {
    const Matrix id = Matrix::Identity(h.rows(), h.cols());
    return -1i * (kron(id, h) - kron(h.transpose(), id));
}

Matrix dissipator_superop(const Matrix& l) {
    const Matrix id = Matrix::Identity(l.rows(), l.cols());
    const Matrix ldl = l.adjoint() * l;
    return kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
}

Matrix anharmonic_term(const TransmonModel& model) {
    Matrix h = Matrix::Zero(model.levels, model.levels);
    for (int j = 0; j < model.levels; ++j) h(j, j) = 0.5 * model.alpha * j * (j - 1);
    return h;
}

struct DriveOperators {
    Matrix sx;  // superoperator of -i[X, .], X = (a+ + a) / 2
    Matrix sy;  // superoperator of -i[Y, .], Y = i(a+ - a) / 2
};

DriveOperators drive_operators(int levels) {
    const Matrix a = annihilation(levels);
    const Matrix ad = a.adjoint();
    return {commutator_superop(0.5 * (ad + a)), commutator_superop(0.5i * (ad - a))};
}

cd drive_phasor(const IqSample& s, double phase, double detuning, double t) {
    return std::polar(1.0, -(detuning * t + phase)) * cd(s.i, s.q);
}

double rate(double time_constant) {
    return std::isinf(time_constant) ? 0.0 : 1.0 / time_constant;
}

}  // namespace

void TransmonModel::validate() const {
    if (levels < 2 || levels > 5) throw ConfigError("transmon levels must lie in [2, 5]");
    if (!(t1 > 0.0)) throw ConfigError("T1 must be positive (or infinite)");
    if (!(t_phi > 0.0)) throw ConfigError("T_phi must be positive (or infinite)");
    if (!(n_bar >= 0.0 && n_bar < 1.0)) throw ConfigError("n_bar must lie in [0, 1)");
    if (!std::isfinite(alpha) || !std::isfinite(omega_q)) {
        throw ConfigError("transmon frequencies must be finite");
    }
}

TransmonModel TransmonModel::closed() const {
    TransmonModel m = *this;
    m.t1 = kInfiniteTime;
    m.t_phi = kInfiniteTime;
    m.n_bar = 0.0;
    return m;
}

DensityMatrix DensityMatrix::basis(int levels, int k) {
    DensityMatrix d;
    d.rho = Matrix::Zero(levels, levels);
    d.rho(k, k) = 1.0;
    return d;
}

DensityMatrix DensityMatrix::from_ket(const Vector& psi) {
    DensityMatrix d;
    d.rho = psi * psi.adjoint();
    return d;
}

void DensityMatrix::check() const {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) {
        throw NumericError("density matrix lost Hermiticity (" + std::to_string(herm) +
                           "); reduce the integration step");
    }
    const double tr = std::abs(rho.trace() - 1.0);
    if (tr > 1e-9) {
        throw NumericError("density matrix trace drifted by " + std::to_string(tr) +
                           "; reduce the integration step");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-9) {
        throw NumericError("density matrix has a negative eigenvalue " +
                           std::to_string(es.eigenvalues().minCoeff()) +
                           "; reduce the integration step");
    }
}

Matrix annihilation(int levels) {
    Matrix a = Matrix::Zero(levels, levels);
    for (int j = 1; j < levels; ++j) a(j - 1, j) = std::sqrt(static_cast<double>(j));
    return a;
}

Matrix build_hamiltonian(const TransmonModel& model, double i_env, double q_env, double phase,
                         double detuning, double t) {
    const double ri = i_env * std::cos(phase) + q_env * std::sin(phase);
    const double rq = -i_env * std::sin(phase) + q_env * std::cos(phase);
    const cd z = std::polar(1.0, -detuning * t) * cd(ri, rq);
    const Matrix a = annihilation(model.levels);
    return anharmonic_term(model) + 0.5 * (a.adjoint() * z + a * std::conj(z));
}

Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix lindblad_static(const TransmonModel& model) {
    model.validate();
    const Matrix a = annihilation(model.levels);
    Matrix l = commutator_superop(anharmonic_term(model));
    const double g1 = rate(model.t1);
    if (g1 > 0.0) {
        l += dissipator_superop(std::sqrt((1.0 + model.n_bar) * g1) * a);
        if (model.n_bar > 0.0) l += dissipator_superop(std::sqrt(model.n_bar * g1) * a.adjoint());
    }
    const double gphi = rate(model.t_phi);
    if (gphi > 0.0) l += dissipator_superop(std::sqrt(gphi) * (a.adjoint() * a));
    return l;
}

DensityMatrix evolve(const DensityMatrix& rho0, const TransmonModel& model,
                     const DriveFunction& drive, double duration, double phase, double detuning,
                     double t0, IntegratorOptions options) {
    model.validate();
    if (rho0.dim() != model.levels) throw ConfigError("initial state dimension does not match model");
    if (duration < 0.0) throw ConfigError("evolution duration must be non-negative");
    rho0.check();
    if (duration == 0.0) return rho0;
    if (options.steps < 1) throw ConfigError("integrator needs at least one step");

    const Matrix l0 = lindblad_static(model);
    const auto ops = drive_operators(model.levels);
    const double h = duration / options.steps;
    auto generator = [&](double t) {
        const cd z = drive ? drive_phasor(drive(t), phase, detuning, t) : cd(0.0);
        Matrix l = l0;
        if (z != 0.0) l += z.real() * ops.sx + z.imag() * ops.sy;
        return l;
    };

    Vector v = vectorize(rho0.rho);
    Matrix l_start = generator(t0);
    for (int k = 0; k < options.steps; ++k) {
        const double t = t0 + k * h;
        const Matrix l_mid = generator(t + 0.5 * h);
        const Matrix l_end = generator(t + h);
        const Vector k1 = l_start * v;
        const Vector k2 = l_mid * (v + 0.5 * h * k1);
        const Vector k3 = l_mid * (v + 0.5 * h * k2);
        const Vector k4 = l_end * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        l_start = l_end;
    }
    if (!v.allFinite()) throw NumericError("master-equation integration produced non-finite values");
    DensityMatrix out;
    out.rho = unvectorize(v, model.levels);
    out.check();
    return out;
}

Matrix pulse_propagator(const TransmonModel& model, const DriveFunction& drive, double duration,
                        double detuning, IntegratorOptions options) {
    model.validate();
    if (!(duration > 0.0)) throw ConfigError("pulse duration must be positive");
    if (options.steps < 1) throw ConfigError("integrator needs at least one step");
    const Matrix l0 = lindblad_static(model);
    const auto ops = drive_operators(model.levels);
    const Eigen::Index n = l0.rows();
    const double h = duration / options.steps;

    Matrix l_start(n, n), l_mid(n, n), l_end(n, n);
    auto generator = [&](double t, Matrix& l) {
        const cd z = drive_phasor(drive(t), 0.0, detuning, t);
        l = l0 + z.real() * ops.sx + z.imag() * ops.sy;
    };

    Matrix p = Matrix::Identity(n, n);
    Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n);
    generator(0.0, l_start);
    for (int k = 0; k < options.steps; ++k) {
        const double t = k * h;
        generator(t + 0.5 * h, l_mid);
        generator(t + h, l_end);
        k1.noalias() = l_start * p;
        k2.noalias() = l_mid * (p + 0.5 * h * k1);
        k3.noalias() = l_mid * (p + 0.5 * h * k2);
        k4.noalias() = l_end * (p + h * k3);
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        std::swap(l_start, l_end);
    }
    if (!p.allFinite()) throw NumericError("propagator integration produced non-finite values");
    return p;
}

Matrix idle_propagator(const TransmonModel& model, double duration) {
    if (duration < 0.0) throw ConfigError("idle duration must be non-negative");
    const Matrix l0 = lindblad_static(model);
    if (duration == 0.0) return Matrix::Identity(l0.rows(), l0.cols());
    return (l0 * duration).exp();
}

Vector frame_phases(int levels, double phase) {
    Vector d(levels * levels);
    for (int j = 0; j < levels; ++j) {
        for (int i = 0; i < levels; ++i) d(i + j * levels) = std::polar(1.0, -phase * (i - j));
    }
    return d;
}

void GateCalibration::validate() const {
    if (!(t_p > 0.0)) throw ConfigError("calibration t_p must be positive");
    if (!(t_d >= 0.0)) throw ConfigError("calibration t_d must be non-negative");
    if (!std::isfinite(amplitude) || !std::isfinite(beta) || !std::isfinite(virtual_z)) {
        throw ConfigError("calibration parameters must be finite");
    }
    if (drive_freq < 0.0) throw ConfigError("drive frequency must be non-negative");
}

std::pair<EnvelopeSpec, DragConfig> calibrated_pulse(const PulseShape& shape,
                                                     const GateCalibration& calib,
                                                     const TransmonModel& model) {
    EnvelopeSpec spec = shape.spec;
    spec.duration = calib.t_p;
    spec.amplitude = calib.amplitude;
    DragConfig drag;
    drag.alpha = model.alpha;
    drag.variant = shape.variant;
    drag.beta = shape.variant == DragVariant::NoDrag ? 0.0 : calib.beta;
    return {spec, drag};
}

GateSimulator::GateSimulator(const TransmonModel& model, const PulseShape& shape,
                             const GateCalibration& calib, IntegratorOptions options)
    : model_(model), shape_(shape), calib_(calib) {
    model_.validate();
    calib_.validate();
    detuning_ = calib_.drive_freq > 0.0 ? kTwoPi * calib_.drive_freq - model_.omega_q : 0.0;
    const auto [spec, drag] = calibrated_pulse(shape_, calib_, model_);
    spec.validate();
    drag.validate();
    const EnvelopeSpec s = spec;
    const DragConfig d = drag;
    pulse_ = pulse_propagator(
        model_, [s, d](double t) { return apply_drag(s, d, t); }, calib_.t_p, detuning_, options);
    gap_ = idle_propagator(model_, calib_.t_d);
}

GateSimulator GateSimulator::with_virtual_z(double phi_z) const {
    GateSimulator copy = *this;
    copy.calib_.virtual_z = phi_z;
    return copy;
}

const Matrix& GateSimulator::idle_for(double duration) const {
    const std::lock_guard<std::mutex> lock(*cache_mutex_);
    auto it = idle_cache_.find(duration);
    if (it == idle_cache_.end()) {
        it = idle_cache_.emplace(duration, idle_propagator(model_, duration)).first;
    }
    return it->second;
}

std::pair<Vector, double> GateSimulator::run_vec(const Vector& v0, const std::vector<GateOp>& gates,
                                                  double* elapsed) const {
    Vector v = v0;
    Vector tmp(v.size());
    double frame = 0.0;
    double t = 0.0;
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateOp::Kind::VirtualZ:
                frame += g.value;
                break;
            case GateOp::Kind::Idle:
                if (g.value > 0.0) {
                    tmp.noalias() = idle_for(g.value) * v;
                    v = tmp;
                    t += g.value;
                }
                break;
            case GateOp::Kind::Pulse: {
                frame += 0.5 * calib_.virtual_z;
                const Vector d = frame_phases(model_.levels, frame + g.value + detuning_ * t);
                v = d.conjugate().cwiseProduct(v);
                tmp.noalias() = pulse_ * v;
                v = d.cwiseProduct(tmp);
                frame += 0.5 * calib_.virtual_z;
                tmp.noalias() = gap_ * v;
                v = tmp;
                t += calib_.gate_time();
                break;
            }
        }
    }
    if (elapsed != nullptr) *elapsed = t;
    return {v, frame};
}

SequenceResult GateSimulator::run(const DensityMatrix& rho0, const std::vector<GateOp>& gates) const {
    if (rho0.dim() != model_.levels) throw ConfigError("initial state dimension does not match model");
    SequenceResult r;
    const auto [v, frame] = run_vec(vectorize(rho0.rho), gates, &r.elapsed);
    r.rho.rho = unvectorize(v, model_.levels);
    r.accumulated_phase = frame;
    r.rho.check();
    return r;
}

DensityMatrix GateSimulator::undo_frame(const DensityMatrix& rho, double phase) const {
    const Vector d = frame_phases(model_.levels, phase);
    DensityMatrix out;
    out.rho = unvectorize(d.conjugate().cwiseProduct(vectorize(rho.rho)), model_.levels);
    return out;
}

SequenceResult run_sequence(const DensityMatrix& rho0, const TransmonModel& model,
                            const PulseShape& shape, const GateCalibration& calib,
                            const std::vector<GateOp>& gates) {
    if (gates.empty()) {
        rho0.check();
        return {rho0, 0.0, 0.0};
    }
    return GateSimulator(model, shape, calib).run(rho0, gates);
}

std::vector<Vector> cardinal_states(int levels) {
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<std::pair<cd, cd>> amps = {
        {1.0, 0.0}, {0.0, 1.0}, {s, s}, {s, -s}, {s, cd(0.0, s)}, {s, cd(0.0, -s)}};
    std::vector<Vector> out;
    for (const auto& [c0, c1] : amps) {
        Vector psi = Vector::Zero(levels);
        psi(0) = c0;
        psi(1) = c1;
        out.push_back(psi);
    }
    return out;
}

Eigen::Matrix2cd ideal_pulse_unitary(double phase, double angle) {
    Eigen::Matrix2cd sx, sy;
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -1i, 1i, 0.0;
    const Eigen::Matrix2cd axis = std::cos(phase) * sx - std::sin(phase) * sy;
    return std::cos(0.5 * angle) * Eigen::Matrix2cd::Identity() - 1i * std::sin(0.5 * angle) * axis;
}

CardinalMetrics gate_error_cardinal(const GateSimulator& sim) {
    const int levels = sim.model().levels;
    const Eigen::Matrix2cd target = ideal_pulse_unitary(0.0);
    CardinalMetrics m;
    const auto states = cardinal_states(levels);
    for (const auto& psi : states) {
        const auto [v, frame] = sim.run_vec(vectorize(psi * psi.adjoint()), {GateOp::x90()});
        DensityMatrix rho;
        rho.rho = unvectorize(v, levels);
        rho = sim.undo_frame(rho, frame);
        Vector ideal = Vector::Zero(levels);
        ideal.head<2>() = target * psi.head<2>();
        m.error += (ideal.adjoint() * rho.rho * ideal)(0, 0).real();
        for (int k = 2; k < rho.dim(); ++k) m.leakage += rho.population(k);
    }
    const double n = static_cast<double>(states.size());
    m.error = 1.0 - m.error / n;
    m.leakage /= n;
    return m;
}

CardinalMetrics gate_error_cardinal(const TransmonModel& model, const GateCalibration& calib,
                                    const PulseShape& shape) {
    return gate_error_cardinal(GateSimulator(model, shape, calib));
}

}  // namespace pulseforge

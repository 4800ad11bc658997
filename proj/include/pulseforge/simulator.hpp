#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/envelopes.hpp"

namespace pulseforge {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Truncated Duffing oscillator with relaxation, thermal excitation and pure dephasing.
/// T1 or T_phi may be infinite to switch the channel off.
struct TransmonModel {
    double omega_q = 2.0 * 3.14159265358979323846 * 4.417e9;  // rad/s
    double alpha = 2.0 * 3.14159265358979323846 * -212e6;     // rad/s
    double t1 = 35e-6;
    double t_phi = 40e-6;
    double n_bar = 0.02;
    int levels = 4;

    void validate() const;
    /// Same Hamiltonian with every dissipative channel removed.
    TransmonModel closed() const;
};

struct DensityMatrix {
    Matrix rho;

    int dim() const { return static_cast<int>(rho.rows()); }
    double population(int level) const { return rho(level, level).real(); }

    static DensityMatrix basis(int levels, int k);
    static DensityMatrix from_ket(const Vector& psi);

    /// Throws NumericError unless Hermitian (1e-10), unit trace (1e-9) and eigenvalues >= -1e-9.
    void check() const;
};

/// Lowering operator truncated to `levels`.
Matrix annihilation(int levels);

/// Rotating-frame Hamiltonian (alpha/2) a+a+aa + (1/2)[a+ z + a z*] with
/// z = exp(-i detuning t) (Omega~_I + i Omega~_Q) and quadratures rotated by `phase`.
Matrix build_hamiltonian(const TransmonModel& model, double i_env, double q_env, double phase,
                         double detuning, double t);

using DriveFunction = std::function<IqSample(double)>;

struct IntegratorOptions {
    int steps = 2048;  // RK4 steps over the drive duration
};

/// Lindblad evolution of rho0 over [t0, t0 + duration] under `drive` (evaluated at absolute
/// time), with frame `phase` and drive detuning omega_d - omega_q. Fixed-step RK4.
DensityMatrix evolve(const DensityMatrix& rho0, const TransmonModel& model,
                     const DriveFunction& drive, double duration, double phase = 0.0,
                     double detuning = 0.0, double t0 = 0.0, IntegratorOptions options = {});

/// Column-stacked superoperator algebra: vec(A rho B) = (B^T (x) A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, int dim);

/// Static part of the Lindbladian (anharmonic term and all dissipators).
Matrix lindblad_static(const TransmonModel& model);

/// Propagator of the driven master equation over [0, duration] at zero frame phase. The
/// drive is evaluated at local time; `detuning` enters as exp(-i detuning t_local).
Matrix pulse_propagator(const TransmonModel& model, const DriveFunction& drive, double duration,
                        double detuning = 0.0, IntegratorOptions options = {});

/// exp(L_static t).
Matrix idle_propagator(const TransmonModel& model, double duration);

/// Diagonal of the superoperator rho -> V rho V^dagger with V = exp(-i phase a+a).
Vector frame_phases(int levels, double phase);

struct GateCalibration {
    double amplitude = 0.0;     // A, rad/s
    double beta = 0.0;
    double drive_freq = 0.0;    // Hz; zero means "resonant with the model"
    double virtual_z = 0.0;     // phi_z, rad
    double t_p = 0.0;           // s
    double t_d = 0.41e-9;       // s

    void validate() const;
    double gate_time() const { return t_p + t_d; }
};

/// The unit-amplitude pulse family being calibrated.
struct PulseShape {
    EnvelopeSpec spec;  // amplitude ignored; duration must equal the calibration's t_p
    DragVariant variant = DragVariant::DragL;
};

/// Envelope and DRAG settings of a calibrated pulse.
std::pair<EnvelopeSpec, DragConfig> calibrated_pulse(const PulseShape& shape,
                                                     const GateCalibration& calib,
                                                     const TransmonModel& model);

struct GateOp {
    enum class Kind { Pulse, VirtualZ, Idle };
    Kind kind = Kind::Pulse;
    double value = 0.0;  // axis phase offset (Pulse), Z angle (VirtualZ), duration (Idle)

    static GateOp x90() { return {Kind::Pulse, 0.0}; }
    static GateOp xm90() { return {Kind::Pulse, 3.14159265358979323846}; }
    static GateOp y90() { return {Kind::Pulse, -0.5 * 3.14159265358979323846}; }
    static GateOp ym90() { return {Kind::Pulse, 0.5 * 3.14159265358979323846}; }
    /// pi/2 pulse about the axis rotated by `phi` from +Y towards -X (the R_{Y+phi} family).
    static GateOp y90_shifted(double phi) { return {Kind::Pulse, -0.5 * 3.14159265358979323846 + phi}; }
    static GateOp vz(double angle) { return {Kind::VirtualZ, angle}; }
    static GateOp idle(double duration) { return {Kind::Idle, duration}; }
};

struct SequenceResult {
    DensityMatrix rho;
    double accumulated_phase = 0.0;  // running frame phase at the end of the sequence
    double elapsed = 0.0;            // s
};

/// Executes gate sequences for one calibrated pulse. The pulse and t_d idle superoperators are
/// computed once; a pulse at frame phase phi is V(phi) P V(phi)^dagger. Every pulse gate is the
/// envelope followed by the t_d idle. The frame advances by phi_z / 2 before and after each
/// pulse (phi_z stays zero for DRAG-P calibrations).
class GateSimulator {
public:
    GateSimulator(const TransmonModel& model, const PulseShape& shape, const GateCalibration& calib,
                  IntegratorOptions options = {});

    SequenceResult run(const DensityMatrix& rho0, const std::vector<GateOp>& gates) const;
    /// Vectorized variant without invariant checks; returns (vec rho, frame phase).
    std::pair<Vector, double> run_vec(const Vector& v0, const std::vector<GateOp>& gates,
                                      double* elapsed = nullptr) const;

    /// rho with the accumulated frame rotation removed: V(phi)^dagger rho V(phi).
    DensityMatrix undo_frame(const DensityMatrix& rho, double phase) const;

    const TransmonModel& model() const { return model_; }
    const GateCalibration& calibration() const { return calib_; }
    const PulseShape& shape() const { return shape_; }
    double detuning() const { return detuning_; }
    const Matrix& pulse_superop() const { return pulse_; }

    /// Same pulse with another virtual-Z angle; the pulse superoperator is shared.
    GateSimulator with_virtual_z(double phi_z) const;

private:
    const Matrix& idle_for(double duration) const;

    TransmonModel model_;
    PulseShape shape_;
    GateCalibration calib_;
    double detuning_ = 0.0;
    Matrix pulse_;
    Matrix gap_;
    mutable std::map<double, Matrix> idle_cache_;
    std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
};

/// Convenience wrapper around GateSimulator::run.
SequenceResult run_sequence(const DensityMatrix& rho0, const TransmonModel& model,
                            const PulseShape& shape, const GateCalibration& calib,
                            const std::vector<GateOp>& gates);

struct CardinalMetrics {
    double error = 0.0;    // 1 - average cardinal-state fidelity to R_X(pi/2)
    double leakage = 0.0;  // average population outside {|0>, |1>}
};

/// One R_X(pi/2) gate (pulse plus t_d idle) applied to the six cardinal states.
CardinalMetrics gate_error_cardinal(const GateSimulator& sim);
CardinalMetrics gate_error_cardinal(const TransmonModel& model, const GateCalibration& calib,
                                    const PulseShape& shape);

/// The six qubit cardinal states embedded in `levels` levels.
std::vector<Vector> cardinal_states(int levels);

/// Ideal 2x2 unitary for a pi/2 rotation about the axis (cos phi, -sin phi, 0).
Eigen::Matrix2cd ideal_pulse_unitary(double phase, double angle = 1.5707963267948966);

}  // namespace pulseforge

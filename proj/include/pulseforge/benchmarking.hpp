#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/clifford.hpp"
#include "pulseforge/distortion.hpp"
#include "pulseforge/fitting.hpp"
#include "pulseforge/simulator.hpp"

namespace pulseforge {

/// Executes native-gate strings and returns the final density matrix in the qubit frame.
class GateSet {
public:
    virtual ~GateSet() = default;
    virtual int levels() const = 0;
    virtual Matrix run(const std::vector<NativeGate>& gates) const = 0;  // from |0><0|
};

/// Gates simulated through the Lindblad engine with a calibrated pulse. DRAG-L executes
/// Y rotations as frame-conjugated X rotations.
class SimulatedGateSet : public GateSet {
public:
    explicit SimulatedGateSet(GateSimulator sim);
    SimulatedGateSet(const TransmonModel& model, const PulseShape& shape, const GateCalibration& calib);

    int levels() const override { return sim_.model().levels; }
    Matrix run(const std::vector<NativeGate>& gates) const override;
    const GateSimulator& simulator() const { return sim_; }

private:
    GateSimulator sim_;
};

/// Ideal qubit rotations followed by a depolarizing channel rho -> p rho + (1 - p) I/2 with
/// p = 1 - 2 eps after every gate, the identity included. Extra levels stay empty.
class IdealGateSet : public GateSet {
public:
    explicit IdealGateSet(double eps = 0.0, int levels = 3);

    int levels() const override { return levels_; }
    Matrix run(const std::vector<NativeGate>& gates) const override;

private:
    double eps_;
    int levels_;
};

struct RbConfig {
    std::vector<int> lengths{2, 8, 24, 60, 120, 240};
    int n_sequences = 25;
    std::uint64_t seed = 1234;
    int jobs = 1;
};

/// One entry per (length, sequence): populations of |0>, |1>, |2> and the normalized purity
/// 2 tr(rho_q^2) - 1 of the renormalized qubit block.
struct RbOutcome {
    std::vector<int> lengths;
    std::vector<std::vector<std::array<double, 3>>> populations;
    std::vector<std::vector<double>> purity;
};

/// Random Clifford strings (indices) for every length, recovery excluded.
std::vector<std::vector<std::vector<int>>> draw_sequences(const RbConfig& config);

/// Native gates of a Clifford string followed by its recovery element.
std::vector<NativeGate> rb_native_gates(const std::vector<int>& cliffords);

RbOutcome run_rb(const GateSet& gates, const RbConfig& config);

struct RbFit {
    ExponentialFit fit;  // p_g = a + b p^N
    double eps_cl = 0.0;
    double eps_g = 0.0;
};

struct LeakageFit {
    ExponentialFit fit;  // p_f = a + b lambda^N
    double l_g = 0.0;
};

struct PurityFit {
    ExponentialFit fit;  // P_norm = a + b u^N
    double u = 1.0;
    double eps_inc = 0.0;
};

/// Estimators default to the Clifford table's average native-gate count.
RbFit fit_rb(const RbOutcome& outcome, double gates_per_clifford = 0.0);
LeakageFit fit_leakage_rb(const RbOutcome& outcome, double gates_per_clifford = 0.0);
PurityFit fit_purity_rb(const RbOutcome& outcome, double gates_per_clifford = 0.0);

/// Three-level assignment matrix, beta(i, j) = P(measure j | prepared i).
struct AssignmentMatrix {
    Eigen::Matrix3d beta = Eigen::Matrix3d::Identity();

    void validate() const;
};

struct CorrectedPopulations {
    Eigen::Vector3d p;
    bool has_negative = false;
};

/// beta^{-T} p_meas without clipping.
CorrectedPopulations correct_readout(const Eigen::Vector3d& p_meas, const AssignmentMatrix& beta);

/// Measured populations beta^T p for every entry of the outcome.
RbOutcome apply_assignment(const RbOutcome& outcome, const AssignmentMatrix& beta);
RbOutcome correct_outcome(const RbOutcome& outcome, const AssignmentMatrix& beta);

/// Pulse sequences rendered as sampled I/Q waveforms, passed through a line model and simulated
/// sample by sample. The drive between samples is linearly interpolated.
struct WaveformExperiment {
    TransmonModel model;
    PulseShape shape;
    GateCalibration calib;
    double dt = 10e-12;
    int samples_per_step = 2;  // RK4 step = samples_per_step * dt
    bool predistort = false;   // invert the line model before applying it
};

/// Samples of consecutive pulses; `gates` may contain pulses and virtual Z only. Each pulse is
/// followed by the calibration's t_d, and `tail` seconds of zeros close the waveform.
SampledWaveform render_sequence(const WaveformExperiment& exp, const std::vector<GateOp>& gates,
                                double tail = 0.0);

/// Excited-state population after `gates` from |0>, through `line` (nullptr for an ideal line).
double waveform_excited_population(const WaveformExperiment& exp, const std::vector<GateOp>& gates,
                                   const DistortionModel* line);

struct AxisShiftScan {
    double t_d = 0.0;
    std::vector<double> phi;
    std::vector<double> p_e;
    double phi_s = 0.0;
    double phi_s_stderr = 0.0;
};

/// R_X(pi/2), n x (R_X(pi), R_{Y+phi}(pi)), R_Y(pi/2) with every pi rotation as two pi/2 pulses.
std::vector<GateOp> i_distortion_circuit(int n_pairs, double phi);
/// n x (R_X(pi), R_X(-pi)), R_Y(pi/2).
std::vector<GateOp> c_distortion_circuit(int n_pairs);

/// Axis shift phi_s nulling the amplified over-rotation, per delay t_d.
std::vector<AxisShiftScan> i_distortion_characterization(const WaveformExperiment& exp,
                                                         const DistortionModel* line,
                                                         const std::vector<double>& t_d_values,
                                                         const std::vector<double>& phi_grid,
                                                         int n_pairs = 10);

/// p_e(t_d, n) grid, rows indexed by t_d.
std::vector<std::vector<double>> c_distortion_characterization(const WaveformExperiment& exp,
                                                               const DistortionModel* line,
                                                               const std::vector<double>& t_d_values,
                                                               const std::vector<int>& n_reps);

}  // namespace pulseforge

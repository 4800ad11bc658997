#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulseforge/simulator.hpp"

namespace pulseforge {

struct CalibrationConfig {
    int max_loop_iters = 3;
    int rabi_points = 41;             // over [0.5, 1.5] x the area-theorem pi amplitude
    int qscale_points = 41;
    double qscale_min = -0.5;
    double qscale_max = 1.5;
    int beta_coarse_points = 21;      // over [0, 2]
    int beta_fine_points = 21;        // over +-0.2
    int virtual_z_points = 41;        // over +-100 mrad
    double virtual_z_span = 0.1;
    std::vector<int> phase_amp_reps{1, 4, 16};
    std::vector<int> bangbang_reps{1, 4, 8};
    int bangbang_points = 11;
    std::vector<int> leakage_rb_lengths{20, 40};  // coarse, fine
    int leakage_rb_sequences = 10;
    int shots = 0;                    // 0: exact probabilities
    std::uint64_t seed = 1234;
    int jobs = 1;
    IntegratorOptions integrator{};

    void validate() const;
};

/// Excited-state population after `gates` from |0>.
double excited_population(const GateSimulator& sim, const std::vector<GateOp>& gates);

/// Area-theorem amplitude theta / int base(t) dt for the pulse shape.
double area_theorem_amplitude(const PulseShape& shape, double t_p);

struct RabiResult {
    double amplitude = 0.0;  // pi/2 amplitude, rad/s
    std::vector<double> sweep;
    std::vector<double> p1;
};

/// Sweeps the amplitude of a single pulse around twice the area-theorem guess, locates the first
/// p1 maximum (the pi pulse) and returns half of it.
RabiResult calibrate_amplitude_rabi(const TransmonModel& model, const PulseShape& shape,
                                    const GateCalibration& calib, const CalibrationConfig& config = {});

struct RamseyOptions {
    double offset = 5e6;       // deliberate drive detuning, Hz
    double max_delay = 2e-6;   // s
    int points = 201;
};

struct RamseyResult {
    double qubit_freq = 0.0;    // Hz; the drive frequency to use
    double fringe_freq = 0.0;   // Hz
    double fringe_amplitude = 0.0;
    double decay_time = kInfiniteTime;  // s
    bool flat = false;          // no fringes resolved; qubit_freq is the drive frequency used
    std::vector<double> delays;
    std::vector<double> p1;
};

/// X90 - delay - X90 with the drive detuned by `offset` from the current estimate (the model's
/// frequency when calib.drive_freq is zero). Fits a + exp(-t / T) (c cos wt + s sin wt).
RamseyResult calibrate_frequency_ramsey(const TransmonModel& model, const PulseShape& shape,
                                        const GateCalibration& calib, const RamseyOptions& options = {},
                                        const CalibrationConfig& config = {});

struct QscaleResult {
    double beta = 0.0;
    bool degenerate = false;  // both sequences agree for every beta
    std::vector<double> sweep;
    std::vector<double> difference;  // p1(X180, Y90) - p1(Y180, X90)
};

QscaleResult calibrate_beta_qscale(const TransmonModel& model, const PulseShape& shape,
                                   const GateCalibration& calib, const CalibrationConfig& config = {});

struct SweepResult {
    double value = 0.0;
    std::vector<double> sweep;
    std::vector<double> signal;
};

/// Coarse then fine beta sweep minimizing the mean leaked population after random Clifford
/// sequences of the configured lengths.
SweepResult calibrate_beta_leakage(const TransmonModel& model, const PulseShape& shape,
                                   const GateCalibration& calib, const CalibrationConfig& config = {});

/// Mean leaked population after `n_sequences` random Clifford strings of `length` plus recovery.
double rb_leakage_population(const GateSimulator& sim, int length, int n_sequences,
                             std::uint64_t seed, int jobs = 1);

/// n x (X90, X90, X-90, X-90) followed by Y90.
std::vector<GateOp> phase_amplification_circuit(int n);
/// X90 followed by n x (X90, X90, X90, X90).
std::vector<GateOp> bangbang_circuit(int n);

/// phi_z nulling the phase-error signal, refined over the configured repetition counts.
SweepResult calibrate_virtual_z(const TransmonModel& model, const PulseShape& shape,
                                const GateCalibration& calib, const CalibrationConfig& config = {});

/// DRAG-P loop step: beta nulling the same phase-error signal.
SweepResult calibrate_beta_phase(const TransmonModel& model, const PulseShape& shape,
                                 const GateCalibration& calib, const CalibrationConfig& config = {});

struct BangBangResult {
    double amplitude = 0.0;
    int reps = 0;              // repetition count of the final sweep
    double slope = 0.0;        // dp1/dA at the crossing, per rad/s
    double ci_halfwidth = 0.0; // amplitude uncertainty for 1000-shot noise on p1
    std::vector<double> ci_per_rep;
};

BangBangResult refine_amplitude_bangbang(const TransmonModel& model, const PulseShape& shape,
                                         const GateCalibration& calib,
                                         const CalibrationConfig& config = {});

struct CalibrationStep {
    std::string name;
    double value = 0.0;
};

struct CalibrationReport {
    GateCalibration calib;
    std::vector<CalibrationStep> steps;
};

/// Initial guess: area-theorem amplitude, beta 0.5 (DRAG-P) or 1.0 (DRAG-L), phi_z 0.
GateCalibration initial_calibration(const TransmonModel& model, const PulseShape& shape);

/// One pass of the error-amplification loop (phase step then BangBang).
GateCalibration calibration_loop_iteration(const TransmonModel& model, const PulseShape& shape,
                                           const GateCalibration& calib,
                                           const CalibrationConfig& config = {},
                                           std::vector<CalibrationStep>* log = nullptr);

/// Rabi, Ramsey, Q-scale or leakage-RB beta, then the loop. `initial` replaces the default
/// starting point.
CalibrationReport full_calibration(const TransmonModel& model, const PulseShape& shape,
                                   const CalibrationConfig& config = {},
                                   const GateCalibration* initial = nullptr);

}  // namespace pulseforge

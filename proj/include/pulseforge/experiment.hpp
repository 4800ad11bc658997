#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/simulator.hpp"

namespace pulseforge {

enum class PulseMethod { Fast, Hd, Cosine, Gaussian, Slepian, SquareCosineRise };

std::string_view to_string(PulseMethod m);
PulseMethod pulse_method_from_string(std::string_view s);

/// How to build a pulse family for a model. Unset optionals fall back to the anharmonicity
/// heuristic (FAST), |alpha| / 2 pi (HD suppressed frequency) or 2 |alpha| / 2 pi (Slepian cutoff).
struct PulseRecipe {
    PulseMethod method = PulseMethod::Fast;
    DragVariant variant = DragVariant::DragL;
    double gate_duration = 6.25e-9;  // t_g = t_p + t_d
    double t_d = 0.41e-9;
    double theta = 1.5707963267948966;

    std::optional<int> n_terms;
    std::optional<double> f_c;
    std::optional<double> w_ef;
    std::optional<double> f_l_ef;
    std::optional<double> f_h_ef;
    std::optional<double> f_h_2;

    std::optional<double> beta2_freq;  // HD

    double sigma_ratio = 5.0;          // Gaussian
    bool subtract_offset = true;
    double rise_time = 6.25e-9;        // square-cosine-rise

    void validate() const;
    double pulse_duration() const { return gate_duration - t_d; }
};

/// Solved FAST problem for the recipe (method Fast or Slepian).
SuppressionProblem recipe_problem(const PulseRecipe& recipe, const TransmonModel& model);

PulseShape build_pulse(const PulseRecipe& recipe, const TransmonModel& model);

struct ExperimentConfig {
    TransmonModel model;
    PulseRecipe pulse;
    CalibrationConfig calibration;
    bool run_rb = false;
    RbConfig rb;
};

struct ExperimentResult {
    GateCalibration calib;
    CardinalMetrics cardinal;
    std::optional<RbFit> rb;
    std::optional<LeakageFit> leakage_rb;
};

/// full_calibration, then the cardinal-state metrics and optionally (leakage) RB.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class SweepAxis { GateDuration, NTerms, FC, WEf, IntervalCenter, IntervalWidth, Beta2Freq };

std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

struct SweepConfig {
    SweepAxis axis = SweepAxis::GateDuration;
    std::vector<double> values;
    ExperimentConfig base;
    std::uint64_t seed = 1234;

    void validate() const;
};

/// The base experiment with the axis set to `value` and the sweep seed applied.
ExperimentConfig sweep_point(const SweepConfig& sweep, double value);

struct SweepRow {
    double value = 0.0;
    double eps_g = 0.0;    // cardinal-state error, or the RB estimate when RB is enabled
    double l_g = 0.0;
    double amplitude = 0.0;
    double beta = 0.0;
    double virtual_z = 0.0;
    std::string error;     // empty on success; the numeric fields are NaN otherwise
};

/// Rows in axis order; points run on up to `jobs` threads.
std::vector<SweepRow> run_sweep(const SweepConfig& sweep, int jobs = 1);

}  // namespace pulseforge

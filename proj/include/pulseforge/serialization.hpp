#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/distortion.hpp"
#include "pulseforge/experiment.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/simulator.hpp"
#include "pulseforge/spectrum.hpp"

namespace pulseforge {

using Json = nlohmann::json;

/// Every top-level document carries "schema": "pulseforge.<kind>/1". Readers reject unknown
/// fields and a mismatched schema; nested objects may omit the schema field.
std::string schema_id(std::string_view kind);

Json to_json(const TransmonModel& m);
TransmonModel model_from_json(const Json& j);

/// Envelope documents carry a "kind" discriminator (cosine, gaussian, fast, hd,
/// square_cosine_rise) plus the family fields.
Json to_json(const EnvelopeSpec& e);
EnvelopeSpec envelope_from_json(const Json& j);

Json to_json(const PulseShape& p);
PulseShape pulse_shape_from_json(const Json& j);

Json to_json(const GateCalibration& c);
GateCalibration calibration_from_json(const Json& j);

Json to_json(const DistortionModel& d);
DistortionModel distortion_from_json(const Json& j);

Json to_json(const SuppressionProblem& p);
SuppressionProblem problem_from_json(const Json& j);
Json to_json(const FastSolution& s);

Json to_json(const HdProblem& p);
HdProblem hd_problem_from_json(const Json& j);
Json to_json(const HdSolution& s);

/// Summary only (grid extent and band energies); the sampled spectrum goes to CSV.
Json to_json(const SpectrumReport& s);

Json to_json(const PulseRecipe& r);
PulseRecipe recipe_from_json(const Json& j);

Json to_json(const CalibrationConfig& c);
CalibrationConfig calibration_config_from_json(const Json& j);

Json to_json(const RbConfig& c);
RbConfig rb_config_from_json(const Json& j);

Json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const Json& j);

Json to_json(const SweepConfig& c);
SweepConfig sweep_from_json(const Json& j);

Json to_json(const AssignmentMatrix& a);
AssignmentMatrix assignment_from_json(const Json& j);

/// Parses text, turning syntax errors into ConfigError.
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);

/// CSV with header t_ns,I,Q (I and Q in rad/s).
void write_waveform_csv(std::ostream& out, const SampledWaveform& w);
SampledWaveform read_waveform_csv(std::istream& in, const std::string& source);

}  // namespace pulseforge

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/distortion.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/experiment.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/serialization.hpp"
#include "pulseforge/spectrum.hpp"
#include "pulseforge/units.hpp"

namespace py = pybind11;
using namespace pulseforge;

namespace {

// Documents cross the boundary as JSON text; the Python side wraps them with json.loads/dumps.
std::string dump(const Json& j) { return j.dump(); }

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

SampledWaveform waveform_from(py::array_t<double, py::array::c_style | py::array::forcecast> i,
                              py::array_t<double, py::array::c_style | py::array::forcecast> q, double dt) {
    if (i.ndim() != 1 || q.ndim() != 1 || i.size() != q.size()) {
        throw ConfigError("I and Q must be one-dimensional arrays of equal length");
    }
    SampledWaveform w;
    w.dt = dt;
    w.i_samples.assign(i.data(), i.data() + i.size());
    w.q_samples.assign(q.data(), q.data() + q.size());
    return w;
}

py::tuple waveform_tuple(const SampledWaveform& w) {
    return py::make_tuple(to_array(w.i_samples), to_array(w.q_samples));
}

DragConfig drag_from(double beta, double alpha_hz, const std::string& variant) {
    if (beta == 0.0) return {};
    return {beta, angular(alpha_hz), drag_variant_from_string(variant)};
}

}  // namespace

PYBIND11_MODULE(_pulseforge, m) {
    m.doc() = "pulseforge native core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);

    m.def("schema_id", [](const std::string& kind) { return schema_id(kind); });

    // FAST and HD synthesis
    m.def(
        "solve_fast",
        [](const std::string& problem) {
            const SuppressionProblem p = problem_from_json(parse_json(problem, "problem"));
            Json out{{"problem", to_json(p)}, {"solution", to_json(solve_fast(p))}};
            return dump(out);
        },
        py::arg("problem_json"));
    m.def(
        "heuristic_problem",
        [](double alpha_hz, double tp, double theta, const std::string& variant) {
            const SuppressionProblem p =
                heuristic_hyperparams(angular(alpha_hz), drag_variant_from_string(variant)).to_problem(theta, tp);
            p.validate();
            return dump(to_json(p));
        },
        py::arg("alpha_hz"), py::arg("tp"), py::arg("theta") = 1.5707963267948966, py::arg("variant") = "drag_l");
    m.def(
        "solve_hd",
        [](const std::string& problem) {
            const HdProblem p = hd_problem_from_json(parse_json(problem, "problem"));
            return dump(to_json(solve_hd(p)));
        },
        py::arg("problem_json"));

    // Envelopes and spectra, from envelope documents.
    m.def(
        "sample_waveform",
        [](const std::string& envelope, double dt, double beta, double alpha_hz, const std::string& variant) {
            const EnvelopeSpec spec = envelope_from_json(parse_json(envelope, "envelope"));
            return waveform_tuple(sample_waveform(spec, drag_from(beta, alpha_hz, variant), dt));
        },
        py::arg("envelope_json"), py::arg("dt") = 10e-12, py::arg("beta") = 0.0, py::arg("alpha_hz") = 0.0,
        py::arg("variant") = "drag_l");
    m.def(
        "spectrum",
        [](const std::string& envelope, const std::vector<double>& freqs, double beta, double alpha_hz,
           const std::string& variant) {
            const EnvelopeSpec spec = envelope_from_json(parse_json(envelope, "envelope"));
            const DragConfig drag = drag_from(beta, alpha_hz, variant);
            py::array_t<std::complex<double>> i(freqs.size()), iq(freqs.size());
            auto pi = i.mutable_unchecked<1>();
            auto piq = iq.mutable_unchecked<1>();
            for (std::size_t k = 0; k < freqs.size(); ++k) {
                pi(k) = analytic_i_spectrum(spec, freqs[k]);
                piq(k) = analytic_iq_spectrum(spec, drag, freqs[k]);
            }
            return py::make_tuple(i, iq);
        },
        py::arg("envelope_json"), py::arg("freqs"), py::arg("beta") = 0.0, py::arg("alpha_hz") = 0.0,
        py::arg("variant") = "drag_l");
    m.def(
        "band_energy",
        [](const std::string& envelope, double f_low, double f_high, const std::string& component, double beta,
           double alpha_hz) {
            const EnvelopeSpec spec = envelope_from_json(parse_json(envelope, "envelope"));
            SpectrumComponent c;
            if (component == "i") c = SpectrumComponent::I;
            else if (component == "iq") c = SpectrumComponent::IQ;
            else throw ConfigError("component must be 'i' or 'iq'");
            return band_energy(spec, drag_from(beta, alpha_hz, "drag_l"), f_low, f_high, c);
        },
        py::arg("envelope_json"), py::arg("f_low"), py::arg("f_high"), py::arg("component") = "i",
        py::arg("beta") = 0.0, py::arg("alpha_hz") = 0.0);

    // Calibration and simulation through experiment documents.
    m.def(
        "run_experiment",
        [](const std::string& config) {
            const ExperimentConfig c = experiment_from_json(parse_json(config, "experiment"));
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(c);
            }
            Json out{{"calibration", to_json(r.calib)},
                     {"cardinal", {{"gate_error", r.cardinal.error}, {"leakage", r.cardinal.leakage}}}};
            if (r.rb) out["rb"] = {{"eps_g", r.rb->eps_g}, {"p", r.rb->fit.p}};
            if (r.leakage_rb) out["leakage_rb"] = {{"l_g", r.leakage_rb->l_g}, {"lambda", r.leakage_rb->fit.p}};
            return dump(out);
        },
        py::arg("experiment_json"));
    m.def(
        "depolarizing_rb",
        [](double eps, const std::vector<int>& lengths, int sequences, std::uint64_t seed) {
            RbConfig cfg;
            cfg.lengths = lengths;
            cfg.n_sequences = sequences;
            cfg.seed = seed;
            RbFit f;
            {
                py::gil_scoped_release release;
                f = fit_rb(run_rb(IdealGateSet(eps), cfg));
            }
            return py::dict(py::arg("eps_g") = f.eps_g, py::arg("eps_clifford") = f.eps_cl, py::arg("p") = f.fit.p,
                            py::arg("p_stderr") = f.fit.p_stderr);
        },
        py::arg("eps"), py::arg("lengths"), py::arg("sequences") = 25, py::arg("seed") = 1234);

    // Line distortion
    m.def(
        "apply_distortion",
        [](py::array_t<double> i, py::array_t<double> q, double dt, const std::string& model) {
            const DistortionModel d = distortion_from_json(parse_json(model, "distortion"));
            return waveform_tuple(apply_distortion(waveform_from(i, q, dt), d).waveform);
        },
        py::arg("i"), py::arg("q"), py::arg("dt"), py::arg("distortion_json"));
    m.def(
        "predistort",
        [](py::array_t<double> i, py::array_t<double> q, double dt, const std::string& model, std::size_t extend) {
            const DistortionModel d = distortion_from_json(parse_json(model, "distortion"));
            return waveform_tuple(predistort_waveform(waveform_from(i, q, dt), d, extend));
        },
        py::arg("i"), py::arg("q"), py::arg("dt"), py::arg("distortion_json"), py::arg("extend") = 0);

    // Readout
    m.def(
        "correct_readout",
        [](const std::vector<double>& measured, const std::string& assignment) {
            if (measured.size() != 3) throw ConfigError("expected three measured populations");
            const AssignmentMatrix a = assignment_from_json(parse_json(assignment, "assignment"));
            const CorrectedPopulations c = correct_readout(Eigen::Vector3d(measured[0], measured[1], measured[2]), a);
            return py::make_tuple(std::vector<double>{c.p(0), c.p(1), c.p(2)}, c.has_negative);
        },
        py::arg("measured"), py::arg("assignment_json"));
}

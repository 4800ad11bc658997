// pulseforge command-line front end. Exit codes: 0 ok, 1 usage, 2 configuration, 3 numeric.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/distortion.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/experiment.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/fitting.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/serialization.hpp"
#include "pulseforge/spectrum.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    int jobs = 1;

    // --seed, then PULSEFORGE_SEED, then the configuration's own value.
    std::uint64_t resolve_seed(std::uint64_t fallback) const {
        if (seed) return *seed;
        if (const char* env = std::getenv("PULSEFORGE_SEED")) {
            try {
                std::size_t pos = 0;
                const std::uint64_t v = std::stoull(env, &pos);
                if (pos == std::string(env).size()) return v;
            } catch (const std::exception&) {
            }
            throw ConfigError("PULSEFORGE_SEED must be a non-negative integer");
        }
        return fallback;
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string schema_of(const Json& j) {
    return j.is_object() && j.contains("schema") && j["schema"].is_string() ? j["schema"].get<std::string>()
                                                                               : "";
}

TransmonModel load_model(const std::string& path) {
    return path.empty() ? TransmonModel{} : model_from_json(read_json_file(path));
}

// A pulse document, or a recipe that is built against the model. Recipes also supply t_d.
struct LoadedPulse {
    PulseShape shape;
    std::optional<double> t_d;
};

LoadedPulse load_pulse(const std::string& path, const TransmonModel& model) {
    const Json j = read_json_file(path);
    if (schema_of(j) == schema_id("recipe")) {
        const PulseRecipe r = recipe_from_json(j);
        return {build_pulse(r, model), r.t_d};
    }
    return {pulse_shape_from_json(j), std::nullopt};
}

EnvelopeSpec load_envelope(const std::string& path) {
    const Json j = read_json_file(path);
    const std::string s = schema_of(j);
    if (s == schema_id("synth")) return envelope_from_json(j.at("envelope"));
    if (s == schema_id("pulse")) return pulse_shape_from_json(j).spec;
    return envelope_from_json(j);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(what + ": cannot parse '" + s + "' as a number");
}

// "f_low:f_high[:weight]" in Hz.
FrequencyInterval parse_interval(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() < 2 || parts.size() > 3) {
        throw ConfigError("interval '" + s + "' must be f_low:f_high[:weight]");
    }
    FrequencyInterval iv;
    iv.f_low = parse_double(parts[0], "interval " + s);
    iv.f_high = parse_double(parts[1], "interval " + s);
    if (parts.size() == 3) iv.weight = parse_double(parts[2], "interval " + s);
    return iv;
}

std::vector<GateOp> parse_gates(const std::string& text, double gate_time) {
    std::vector<GateOp> gates;
    for (const auto& tok : split(text, ' ')) {
        for (const auto& g : split(tok, ',')) {
            if (g == "X90") gates.push_back(GateOp::x90());
            else if (g == "X-90" || g == "Xm90") gates.push_back(GateOp::xm90());
            else if (g == "Y90") gates.push_back(GateOp::y90());
            else if (g == "Y-90" || g == "Ym90") gates.push_back(GateOp::ym90());
            else if (g == "I") gates.push_back(GateOp::idle(gate_time));
            else if (g.rfind("Z:", 0) == 0) gates.push_back(GateOp::vz(parse_double(g.substr(2), "gate " + g)));
            else if (g.rfind("W:", 0) == 0) gates.push_back(GateOp::idle(parse_double(g.substr(2), "gate " + g)));
            else throw ConfigError("unknown gate '" + g + "' (X90, X-90, Y90, Y-90, I, Z:<rad>, W:<s>)");
        }
    }
    return gates;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string method = "fast";
    bool heuristic = false;
    std::optional<double> alpha_hz;
    double tp = 5.84e-9;
    double theta = kPi / 2.0;
    std::string variant = "drag_l";
    std::optional<int> n_terms;
    std::vector<std::string> intervals;
    std::optional<double> f_c;
    int k = 1;
    std::string config;
    double beta = 0.0;
    double dt = 10e-12;
    std::string out, pulse_out, csv;
};

int cmd_synth(const SynthArgs& a) {
    const DragVariant variant = drag_variant_from_string(a.variant);
    auto need_alpha = [&]() {
        if (!a.alpha_hz) throw ConfigError("--alpha is required for method " + a.method);
        return kTwoPi * *a.alpha_hz;
    };
    Json report{{"schema", schema_id("synth")}, {"method", a.method}};
    EnvelopeSpec spec;
    const PulseMethod method = pulse_method_from_string(a.method);
    if (method == PulseMethod::Fast || method == PulseMethod::Slepian) {
        SuppressionProblem problem;
        if (!a.config.empty()) {
            problem = problem_from_json(read_json_file(a.config));
        } else if (method == PulseMethod::Slepian) {
            const double fc = a.f_c ? *a.f_c : 2.0 * std::abs(need_alpha()) / kTwoPi;
            problem = slepian_problem(fc, a.theta, a.tp, a.n_terms.value_or(4));
        } else if (a.heuristic || a.intervals.empty()) {
            HeuristicParams h = heuristic_hyperparams(need_alpha(), variant);
            if (a.n_terms) h.n_terms = *a.n_terms;
            problem = h.to_problem(a.theta, a.tp);
            report["heuristic"] = {{"f_l_ef_hz", h.f_l_ef}, {"f_h_ef_hz", h.f_h_ef}, {"f_c_hz", h.f_c},
                                   {"f_h_2_hz", h.f_h_2},   {"w_ef", h.w_ef},       {"n_terms", h.n_terms}};
        } else {
            problem.n_terms = a.n_terms.value_or(4);
            problem.theta = a.theta;
            problem.duration = a.tp;
            for (const auto& s : a.intervals) problem.intervals.push_back(parse_interval(s));
        }
        const FastSolution sol = solve_fast(problem);
        report["problem"] = to_json(problem);
        report["solution"] = to_json(sol);
        spec = fast_envelope_spec(sol, problem);
    } else if (method == PulseMethod::Hd) {
        const HdProblem problem = a.config.empty() ? hd_problem_for_anharmonicity(a.k, need_alpha(), a.tp)
                                                   : hd_problem_from_json(read_json_file(a.config));
        const HdSolution sol = solve_hd(problem);
        report["problem"] = to_json(problem);
        report["solution"] = to_json(sol);
        spec = hd_envelope_spec(sol, 1.0, problem.duration);
        spec.rotation_angle = a.theta;
    } else {
        PulseRecipe r;
        r.method = method;
        r.gate_duration = a.tp + r.t_d;
        r.theta = a.theta;
        TransmonModel m;
        if (a.alpha_hz) m.alpha = kTwoPi * *a.alpha_hz;
        spec = build_pulse(r, m).spec;
    }
    spec = spec.with_area_normalized_amplitude();
    report["envelope"] = to_json(spec);

    if (!a.out.empty() || (a.pulse_out.empty() && a.csv.empty())) write_json(a.out, report);
    if (!a.pulse_out.empty()) write_json(a.pulse_out, to_json(PulseShape{spec, variant}));
    if (!a.csv.empty()) {
        DragConfig drag;
        if (a.beta != 0.0) drag = {a.beta, need_alpha(), variant};
        std::ostringstream ss;
        write_waveform_csv(ss, sample_waveform(spec, drag, a.dt));
        write_text(a.csv, ss.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumArgs {
    std::string envelope;
    double beta = 0.0;
    std::optional<double> alpha_hz;
    std::string variant = "drag_l";
    double fmin = -1e9, fmax = 1e9;
    int points = 2001;
    std::vector<std::string> bands;
    std::string component = "i";
    std::string csv, out;
};

int cmd_spectrum(const SpectrumArgs& a) {
    const EnvelopeSpec spec = load_envelope(a.envelope);
    DragConfig drag;
    if (a.beta != 0.0) {
        if (!a.alpha_hz) throw ConfigError("--alpha is required with --beta");
        drag = {a.beta, kTwoPi * *a.alpha_hz, drag_variant_from_string(a.variant)};
    }
    if (a.points < 2) throw ConfigError("--points must be at least 2");
    std::vector<FrequencyInterval> bands;
    for (const auto& b : a.bands) bands.push_back(parse_interval(b));
    SpectrumComponent comp;
    if (a.component == "i") comp = SpectrumComponent::I;
    else if (a.component == "iq") comp = SpectrumComponent::IQ;
    else throw ConfigError("--component must be i or iq");
    const SpectrumReport rep = analytic_spectrum_report(
        spec, drag, linear_grid(a.fmin, a.fmax, static_cast<std::size_t>(a.points)), bands, comp);

    std::ostringstream ss;
    ss << "f_MHz,abs_I,abs_IQ\n" << std::setprecision(12);
    for (std::size_t k = 0; k < rep.freqs.size(); ++k) {
        ss << rep.freqs[k] * 1e-6 << ',' << rep.amplitude_i[k] << ',' << rep.amplitude_iq[k] << '\n';
    }
    if (!a.csv.empty()) write_text(a.csv, ss.str());
    if (!a.out.empty() || a.csv.empty()) write_json(a.out, to_json(rep));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / calibrate
// ---------------------------------------------------------------------------

struct SimArgs {
    std::string model, pulse, calibration, gates, out;
    int steps = 0;
};

Json density_json(const DensityMatrix& rho) {
    Json pops = Json::array();
    for (int k = 0; k < rho.dim(); ++k) pops.push_back(rho.population(k));
    return pops;
}

int cmd_simulate(const SimArgs& a) {
    const TransmonModel model = load_model(a.model);
    const LoadedPulse pulse = load_pulse(a.pulse, model);
    const GateCalibration calib = calibration_from_json(read_json_file(a.calibration));
    IntegratorOptions opts;
    if (a.steps > 0) opts.steps = a.steps;
    const GateSimulator sim(model, pulse.shape, calib, opts);
    Json report{{"schema", schema_id("simulation")}};
    const CardinalMetrics m = gate_error_cardinal(sim);
    report["cardinal"] = {{"gate_error", m.error}, {"leakage", m.leakage}};
    if (!a.gates.empty()) {
        const SequenceResult r =
            sim.run(DensityMatrix::basis(model.levels, 0), parse_gates(a.gates, calib.gate_time()));
        report["sequence"] = {{"gates", a.gates},
                              {"populations", density_json(r.rho)},
                              {"frame_phase_rad", r.accumulated_phase},
                              {"elapsed_s", r.elapsed}};
    }
    write_json(a.out, report);
    return 0;
}

struct CalibrateArgs {
    std::string model, pulse, config, initial, out, report;
    std::optional<double> t_d;
};

int cmd_calibrate(const CalibrateArgs& a, const Globals& g) {
    const TransmonModel model = load_model(a.model);
    const LoadedPulse pulse = load_pulse(a.pulse, model);
    CalibrationConfig cfg;
    if (!a.config.empty()) cfg = calibration_config_from_json(read_json_file(a.config));
    cfg.seed = g.resolve_seed(cfg.seed);
    cfg.jobs = g.jobs;
    GateCalibration init = a.initial.empty() ? initial_calibration(model, pulse.shape)
                                             : calibration_from_json(read_json_file(a.initial));
    if (pulse.t_d && a.initial.empty()) init.t_d = *pulse.t_d;
    if (a.t_d) init.t_d = *a.t_d;
    const CalibrationReport rep = full_calibration(model, pulse.shape, cfg, &init);
    write_json(a.out, to_json(rep.calib));
    if (!a.report.empty()) {
        Json steps = Json::array();
        for (const auto& s : rep.steps) steps.push_back({{"step", s.name}, {"value", s.value}});
        const CardinalMetrics m = gate_error_cardinal(model, rep.calib, pulse.shape);
        write_json(a.report, {{"schema", schema_id("calibration_report")},
                              {"calibration", to_json(rep.calib)},
                              {"steps", steps},
                              {"cardinal", {{"gate_error", m.error}, {"leakage", m.leakage}}}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config, out;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    return ss.str();
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

int cmd_sweep(const SweepArgs& a, const Globals& g) {
    SweepConfig sweep = sweep_from_json(read_json_file(a.config));
    sweep.seed = g.resolve_seed(sweep.seed);
    const auto rows = run_sweep(sweep, g.jobs);
    std::ostringstream ss;
    ss << to_string(sweep.axis) << ",eps_g,l_g,amplitude_rad_s,beta,virtual_z_rad,error\n";
    for (const auto& r : rows) {
        ss << fmt(r.value) << ',' << fmt(r.eps_g) << ',' << fmt(r.l_g) << ',' << fmt(r.amplitude) << ','
           << fmt(r.beta) << ',' << fmt(r.virtual_z) << ',' << (r.error.empty() ? "" : csv_quote(r.error))
           << '\n';
    }
    write_text(a.out, ss.str());
    for (const auto& r : rows) {
        if (!r.error.empty()) std::cerr << "warning: point " << r.value << " failed: " << r.error << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// rb, leakage-rb, purity-rb
// ---------------------------------------------------------------------------

enum class RbKind { Standard, Leakage, Purity };

struct RbArgs {
    std::string model, pulse, calibration, rb_config, assignment;
    std::optional<double> depolarizing;
    std::vector<int> lengths;
    std::optional<int> sequences;
    bool correct = false;
    std::string csv, out;
};

Json fit_json(const ExponentialFit& f) {
    return {{"a", f.a}, {"b", f.b}, {"p", f.p}, {"p_stderr", f.p_stderr}, {"sse", f.sse}};
}

int cmd_rb(RbKind kind, const RbArgs& a, const Globals& g) {
    RbConfig cfg;
    if (!a.rb_config.empty()) cfg = rb_config_from_json(read_json_file(a.rb_config));
    if (!a.lengths.empty()) cfg.lengths = a.lengths;
    if (a.sequences) cfg.n_sequences = *a.sequences;
    cfg.seed = g.resolve_seed(cfg.seed);
    cfg.jobs = g.jobs;

    RbOutcome o;
    if (a.depolarizing) {
        o = run_rb(IdealGateSet(*a.depolarizing), cfg);
    } else {
        if (a.pulse.empty() || a.calibration.empty()) {
            throw ConfigError("--pulse and --calibration are required unless --depolarizing is given");
        }
        const TransmonModel model = load_model(a.model);
        const LoadedPulse pulse = load_pulse(a.pulse, model);
        const GateCalibration calib = calibration_from_json(read_json_file(a.calibration));
        o = run_rb(SimulatedGateSet(model, pulse.shape, calib), cfg);
    }
    if (!a.assignment.empty()) {
        const AssignmentMatrix beta = assignment_from_json(read_json_file(a.assignment));
        o = apply_assignment(o, beta);
        if (a.correct) o = correct_outcome(o, beta);
    } else if (a.correct) {
        throw ConfigError("--correct needs --assignment");
    }

    std::ostringstream ss;
    ss << "length,p0,p1,p_leak,purity\n" << std::setprecision(12);
    for (std::size_t l = 0; l < o.lengths.size(); ++l) {
        double p[3] = {0, 0, 0}, pur = 0;
        const auto n = static_cast<double>(o.populations[l].size());
        for (std::size_t s = 0; s < o.populations[l].size(); ++s) {
            for (int k = 0; k < 3; ++k) p[k] += o.populations[l][s][k] / n;
            pur += o.purity[l][s] / n;
        }
        ss << o.lengths[l] << ',' << p[0] << ',' << p[1] << ',' << p[2] << ',' << pur << '\n';
    }
    if (!a.csv.empty()) write_text(a.csv, ss.str());

    Json summary{{"schema", schema_id("rb_fit")}, {"config", to_json(cfg)}};
    switch (kind) {
        case RbKind::Standard: {
            const RbFit f = fit_rb(o);
            summary["protocol"] = "rb";
            summary["fit"] = fit_json(f.fit);
            summary["eps_clifford"] = f.eps_cl;
            summary["eps_g"] = f.eps_g;
            break;
        }
        case RbKind::Leakage: {
            const LeakageFit f = fit_leakage_rb(o);
            summary["protocol"] = "leakage_rb";
            summary["fit"] = fit_json(f.fit);
            summary["l_g"] = f.l_g;
            break;
        }
        case RbKind::Purity: {
            const PurityFit f = fit_purity_rb(o);
            summary["protocol"] = "purity_rb";
            summary["fit"] = fit_json(f.fit);
            summary["u"] = f.u;
            summary["eps_incoherent"] = f.eps_inc;
            break;
        }
    }
    if (!a.out.empty() || a.csv.empty()) write_json(a.out, summary);
    return 0;
}

// ---------------------------------------------------------------------------
// distort / characterize-distortion
// ---------------------------------------------------------------------------

struct DistortArgs {
    std::string distortion, in, out;
    bool apply = false, invert = false;
    int extend = 0;
};

int cmd_distort(const DistortArgs& a) {
    const DistortionModel d = distortion_from_json(read_json_file(a.distortion));
    std::ifstream in(a.in);
    if (!in) throw ConfigError("cannot open " + a.in);
    const SampledWaveform w = read_waveform_csv(in, a.in);
    SampledWaveform result;
    if (a.apply) {
        const DistortionOutput r = apply_distortion(w, d);
        if (r.padding_warning) {
            std::cerr << "warning: fewer than 10 tau_max of trailing zeros; the tail is truncated\n";
        }
        result = r.waveform;
    } else {
        result = predistort_waveform(w, d, static_cast<std::size_t>(a.extend));
    }
    std::ostringstream ss;
    write_waveform_csv(ss, result);
    write_text(a.out, ss.str());
    return 0;
}

struct CharacterizeArgs {
    std::string model, pulse, calibration, distortion;
    std::string kind = "intra";
    std::string td_ns = "0.5,1,2,4,6,8,12,16,24";
    double phi_span = 0.1;
    int phi_points = 21;
    int pairs = 10;
    std::string reps = "0,2,4,6,8,10";
    bool predistort = false;
    double dt = 10e-12;
    std::string csv, out;
};

int cmd_characterize(const CharacterizeArgs& a) {
    const TransmonModel model = load_model(a.model);
    const LoadedPulse pulse = load_pulse(a.pulse, model);
    WaveformExperiment exp{model, pulse.shape, calibration_from_json(read_json_file(a.calibration))};
    exp.dt = a.dt;
    exp.predistort = a.predistort;
    std::optional<DistortionModel> line;
    if (!a.distortion.empty()) line = distortion_from_json(read_json_file(a.distortion));
    if (exp.predistort && !line) throw ConfigError("--predistort needs --distortion");
    std::vector<double> tds;
    for (const auto& s : split(a.td_ns, ',')) tds.push_back(1e-9 * parse_double(s, "--td-ns"));
    if (tds.empty()) throw ConfigError("--td-ns must list at least one delay");

    Json summary{{"schema", schema_id("distortion_characterization")}, {"kind", a.kind}};
    std::ostringstream ss;
    ss << std::setprecision(12);
    if (a.kind == "intra") {
        if (a.phi_points < 3) throw ConfigError("--phi-points must be at least 3");
        const auto phis = linear_grid(-a.phi_span, a.phi_span, static_cast<std::size_t>(a.phi_points));
        const auto scans = i_distortion_characterization(exp, line ? &*line : nullptr, tds, phis, a.pairs);
        ss << "t_ns,phi_s_rad,phi_s_stderr_rad\n";
        std::vector<double> x, y;
        for (const auto& s : scans) {
            ss << s.t_d * 1e9 << ',' << s.phi_s << ',' << s.phi_s_stderr << '\n';
            x.push_back(s.t_d * 1e9);
            y.push_back(s.phi_s);
        }
        Json pts = Json::array();
        for (const auto& s : scans) pts.push_back({{"t_d_s", s.t_d}, {"phi_s_rad", s.phi_s}});
        summary["points"] = pts;
        if (x.size() >= 3) {
            try {
                const ExponentialFit f = fit_exponential(x, y);
                summary["fit"] = fit_json(f);
                summary["tau_s"] = (f.p > 0.0 && f.p < 1.0) ? -1e-9 / std::log(f.p) : NAN;
            } catch (const NumericError& e) {
                summary["fit_error"] = e.what();
            }
        }
    } else if (a.kind == "cross") {
        std::vector<int> reps;
        for (const auto& s : split(a.reps, ',')) reps.push_back(static_cast<int>(parse_double(s, "--reps")));
        const auto grid = c_distortion_characterization(exp, line ? &*line : nullptr, tds, reps);
        ss << "t_ns,n,p_e\n";
        for (std::size_t i = 0; i < tds.size(); ++i) {
            for (std::size_t k = 0; k < reps.size(); ++k) {
                ss << tds[i] * 1e9 << ',' << reps[k] << ',' << grid[i][k] << '\n';
            }
        }
        summary["p_e"] = grid;
    } else {
        throw ConfigError("--kind must be intra or cross");
    }
    if (!a.csv.empty()) write_text(a.csv, ss.str());
    if (!a.out.empty() || a.csv.empty()) write_json(a.out, summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulseforge: spectrally tuned transmon pulses, calibration and benchmarking"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed (default: PULSEFORGE_SEED, then the config value)");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Solve a pulse family and write its definition and samples");
    s->add_option("--method", synth.method, "fast, hd, slepian, cosine, gaussian, square_cosine_rise");
    s->add_flag("--heuristic", synth.heuristic, "FAST hyperparameters from the anharmonicity");
    s->add_option("--alpha", synth.alpha_hz, "Anharmonicity in Hz (negative for a transmon)");
    s->add_option("--tp", synth.tp, "Pulse duration t_p in s");
    s->add_option("--theta", synth.theta, "Rotation angle in rad");
    s->add_option("--variant", synth.variant, "drag_l, drag_p or no_drag");
    s->add_option("--n-terms", synth.n_terms, "Number of cosine terms");
    s->add_option("--interval", synth.intervals, "Suppression band f_low:f_high[:weight] in Hz");
    s->add_option("--fc", synth.f_c, "Slepian cutoff in Hz");
    s->add_option("--k", synth.k, "HD DRAG order");
    s->add_option("--config", synth.config, "Problem JSON (fast_problem or hd_problem)");
    s->add_option("--beta", synth.beta, "DRAG coefficient for the sampled Q quadrature");
    s->add_option("--dt", synth.dt, "Sample spacing in s");
    s->add_option("--out", synth.out, "Synthesis report JSON (stdout if no output is given)");
    s->add_option("--pulse-out", synth.pulse_out, "Pulse JSON for calibrate/simulate");
    s->add_option("--csv", synth.csv, "Waveform CSV (t_ns, I, Q)");

    SpectrumArgs spec;
    auto* sp = app.add_subcommand("spectrum", "Analytic spectrum of an envelope");
    sp->add_option("--envelope", spec.envelope, "Envelope, pulse or synth JSON")->required();
    sp->add_option("--beta", spec.beta, "DRAG coefficient");
    sp->add_option("--alpha", spec.alpha_hz, "Anharmonicity in Hz");
    sp->add_option("--variant", spec.variant, "DRAG variant");
    sp->add_option("--fmin", spec.fmin, "Lowest frequency in Hz");
    sp->add_option("--fmax", spec.fmax, "Highest frequency in Hz");
    sp->add_option("--points", spec.points, "Grid points");
    sp->add_option("--band", spec.bands, "Band f_low:f_high in Hz for energy and suppression");
    sp->add_option("--component", spec.component, "Band component: i or iq");
    sp->add_option("--csv", spec.csv, "CSV (f_MHz, abs_I, abs_IQ)");
    sp->add_option("--out", spec.out, "Summary JSON");

    SimArgs sim;
    auto* si = app.add_subcommand("simulate", "Simulate a calibrated gate");
    si->add_option("--model", sim.model, "Transmon model JSON (default: reference model)");
    si->add_option("--pulse", sim.pulse, "Pulse or recipe JSON")->required();
    si->add_option("--calibration", sim.calibration, "Calibration JSON")->required();
    si->add_option("--gates", sim.gates, "Sequence from |0>, e.g. \"X90 Y90 Z:0.1 X-90\"");
    si->add_option("--steps", sim.steps, "RK4 steps per pulse");
    si->add_option("--out", sim.out, "Result JSON (stdout by default)");

    CalibrateArgs cal;
    auto* ca = app.add_subcommand("calibrate", "Run the simulated calibration procedure");
    ca->add_option("--model", cal.model, "Transmon model JSON (default: reference model)");
    ca->add_option("--pulse", cal.pulse, "Pulse or recipe JSON")->required();
    ca->add_option("--config", cal.config, "Calibration settings JSON");
    ca->add_option("--initial", cal.initial, "Starting calibration JSON");
    ca->add_option("--t-d", cal.t_d, "Buffer after each pulse in s");
    ca->add_option("--out", cal.out, "Calibration JSON (stdout by default)");
    ca->add_option("--report", cal.report, "Step-by-step report JSON");

    SweepArgs sw;
    auto* swc = app.add_subcommand("sweep", "Calibrate and evaluate along one parameter axis");
    swc->add_option("--config", sw.config, "Sweep JSON")->required();
    swc->add_option("--out", sw.out, "CSV (stdout by default)");

    RbArgs rb;
    std::vector<std::pair<CLI::App*, RbKind>> rb_cmds;
    for (auto [name, kind, help] :
         {std::tuple{"rb", RbKind::Standard, "Randomized benchmarking"},
          std::tuple{"leakage-rb", RbKind::Leakage, "Leakage randomized benchmarking"},
          std::tuple{"purity-rb", RbKind::Purity, "Purity randomized benchmarking"}}) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("--model", rb.model, "Transmon model JSON (default: reference model)");
        c->add_option("--pulse", rb.pulse, "Pulse or recipe JSON");
        c->add_option("--calibration", rb.calibration, "Calibration JSON");
        c->add_option("--depolarizing", rb.depolarizing, "Ideal gates with this depolarizing error");
        c->add_option("--rb", rb.rb_config, "RB settings JSON");
        c->add_option("--lengths", rb.lengths, "Clifford lengths")->delimiter(',');
        c->add_option("--sequences", rb.sequences, "Sequences per length");
        c->add_option("--assignment", rb.assignment, "Readout assignment matrix JSON");
        c->add_flag("--correct", rb.correct, "Invert the assignment matrix before fitting");
        c->add_option("--csv", rb.csv, "Per-length CSV");
        c->add_option("--out", rb.out, "Fit summary JSON");
        rb_cmds.emplace_back(c, kind);
    }

    DistortArgs dis;
    auto* di = app.add_subcommand("distort", "Apply or invert a line distortion model");
    di->add_option("--distortion", dis.distortion, "Distortion JSON")->required();
    di->add_option("--in", dis.in, "Input waveform CSV")->required();
    di->add_option("--out", dis.out, "Output waveform CSV (stdout by default)");
    auto* apply = di->add_flag("--apply", dis.apply, "Forward model");
    auto* invert = di->add_flag("--invert", dis.invert, "Inverse filter (predistortion)");
    apply->excludes(invert);
    di->add_option("--extend", dis.extend, "Extra predistorted samples beyond the input");

    CharacterizeArgs ch;
    auto* cd = app.add_subcommand("characterize-distortion", "Simulated I- or C-distortion experiment");
    cd->add_option("--model", ch.model, "Transmon model JSON (default: reference model)");
    cd->add_option("--pulse", ch.pulse, "Pulse or recipe JSON")->required();
    cd->add_option("--calibration", ch.calibration, "Calibration JSON")->required();
    cd->add_option("--distortion", ch.distortion, "Line distortion JSON (ideal line if omitted)");
    cd->add_option("--kind", ch.kind, "intra or cross");
    cd->add_option("--td-ns", ch.td_ns, "Comma-separated delays in ns");
    cd->add_option("--phi-span", ch.phi_span, "Axis-shift scan half-width in rad");
    cd->add_option("--phi-points", ch.phi_points, "Axis-shift scan points");
    cd->add_option("--pairs", ch.pairs, "Amplification pairs (intra)");
    cd->add_option("--reps", ch.reps, "Comma-separated repetition counts (cross)");
    cd->add_flag("--predistort", ch.predistort, "Invert the line model before applying it");
    cd->add_option("--dt", ch.dt, "Waveform sample spacing in s");
    cd->add_option("--csv", ch.csv, "CSV output");
    cd->add_option("--out", ch.out, "Summary JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (sp->parsed()) return cmd_spectrum(spec);
        if (si->parsed()) return cmd_simulate(sim);
        if (ca->parsed()) return cmd_calibrate(cal, g);
        if (swc->parsed()) return cmd_sweep(sw, g);
        for (auto& [c, kind] : rb_cmds) {
            if (c->parsed()) return cmd_rb(kind, rb, g);
        }
        if (di->parsed()) {
            if (!dis.apply && !dis.invert) throw ConfigError("distort needs --apply or --invert");
            return cmd_distort(dis);
        }
        if (cd->parsed()) return cmd_characterize(ch);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

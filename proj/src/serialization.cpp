#include "pulseforge/serialization.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {
namespace {

constexpr int kSchemaVersion = 1;

// Strict field access: every key read is recorded and finish() rejects the rest.
class Reader {
public:
    Reader(const Json& j, std::string context, std::string_view kind)
        : j_(j), ctx_(std::move(context)) {
        if (!j_.is_object()) throw ConfigError(ctx_ + ": expected a JSON object");
        if (j_.contains("schema")) {
            seen_.insert("schema");
            const Json& s = j_.at("schema");
            if (!s.is_string() || s.get<std::string>() != schema_id(kind)) {
                throw ConfigError(ctx_ + ": schema must be \"" + schema_id(kind) + "\"");
            }
        }
    }

    template <class T>
    T req(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(ctx_ + ": missing field '" + key + "'");
        return get<T>(key);
    }

    template <class T>
    T opt(const std::string& key, T fallback) {
        return j_.contains(key) && !j_.at(key).is_null() ? get<T>(key) : (seen_.insert(key), fallback);
    }

    template <class T>
    std::optional<T> maybe(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
        return get<T>(key);
    }

    // Seconds where null means "infinite".
    double time_or_inf(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        if (j_.at(key).is_null()) return kInfiniteTime;
        return get<double>(key);
    }

    const Json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(ctx_ + ": missing field '" + key + "'");
        seen_.insert(key);
        return j_.at(key);
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string path(const std::string& key) const { return ctx_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(ctx_ + ": unknown field '" + it.key() + "'");
            }
        }
    }

private:
    template <class T>
    T get(const std::string& key) {
        seen_.insert(key);
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(ctx_ + ": field '" + key + "' has the wrong type");
        }
    }

    const Json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

Json time_json(double t) { return std::isfinite(t) ? Json(t) : Json(nullptr); }

Json envelope_shape_fields(const EnvelopeShape& shape) {
    return std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CosineShape>) {
                return {{"kind", "cosine"}};
            } else if constexpr (std::is_same_v<T, GaussianShape>) {
                return {{"kind", "gaussian"}, {"sigma_ratio", s.sigma_ratio},
                        {"subtract_offset", s.subtract_offset}};
            } else if constexpr (std::is_same_v<T, FastSeriesShape>) {
                return {{"kind", "fast"}, {"coeffs", s.coeffs}};
            } else if constexpr (std::is_same_v<T, HdSeriesShape>) {
                return {{"kind", "hd"}, {"d_coeffs", s.d_coeffs}, {"beta_even", s.beta_even}};
            } else {
                return {{"kind", "square_cosine_rise"}, {"rise_time_s", s.rise_time}};
            }
        },
        shape);
}

EnvelopeShape envelope_shape_from_reader(Reader& r, const std::string& ctx) {
    const auto type = r.req<std::string>("kind");
    EnvelopeShape out;
    if (type == "cosine") {
        out = CosineShape{};
    } else if (type == "gaussian") {
        GaussianShape g;
        g.sigma_ratio = r.opt<double>("sigma_ratio", g.sigma_ratio);
        g.subtract_offset = r.opt<bool>("subtract_offset", g.subtract_offset);
        out = g;
    } else if (type == "fast") {
        out = FastSeriesShape{r.req<std::vector<double>>("coeffs")};
    } else if (type == "hd") {
        HdSeriesShape h;
        h.d_coeffs = r.req<std::vector<double>>("d_coeffs");
        h.beta_even = r.req<std::vector<double>>("beta_even");
        out = h;
    } else if (type == "square_cosine_rise") {
        SquareCosineRiseShape s;
        s.rise_time = r.opt<double>("rise_time_s", s.rise_time);
        out = s;
    } else {
        throw ConfigError(ctx + ": unknown envelope kind '" + type + "'");
    }
    return out;
}

}  // namespace

std::string schema_id(std::string_view kind) {
    return "pulseforge." + std::string(kind) + "/" + std::to_string(kSchemaVersion);
}

Json to_json(const TransmonModel& m) {
    return {{"schema", schema_id("model")},
            {"qubit_freq_hz", m.omega_q / kTwoPi},
            {"anharmonicity_hz", m.alpha / kTwoPi},
            {"t1_s", time_json(m.t1)},
            {"t_phi_s", time_json(m.t_phi)},
            {"n_bar", m.n_bar},
            {"levels", m.levels}};
}

TransmonModel model_from_json(const Json& j) {
    Reader r(j, "model", "model");
    TransmonModel m;
    m.omega_q = kTwoPi * r.opt<double>("qubit_freq_hz", m.omega_q / kTwoPi);
    m.alpha = kTwoPi * r.opt<double>("anharmonicity_hz", m.alpha / kTwoPi);
    m.t1 = r.time_or_inf("t1_s", m.t1);
    m.t_phi = r.time_or_inf("t_phi_s", m.t_phi);
    m.n_bar = r.opt<double>("n_bar", m.n_bar);
    m.levels = r.opt<int>("levels", m.levels);
    r.finish();
    m.validate();
    return m;
}

Json to_json(const EnvelopeSpec& e) {
    Json j = envelope_shape_fields(e.shape);
    j["schema"] = schema_id("envelope");
    j["duration_s"] = e.duration;
    j["amplitude"] = e.amplitude;
    j["rotation_angle"] = e.rotation_angle;
    return j;
}

EnvelopeSpec envelope_from_json(const Json& j) {
    Reader r(j, "envelope", "envelope");
    EnvelopeSpec e;
    e.shape = envelope_shape_from_reader(r, "envelope");
    e.duration = r.req<double>("duration_s");
    e.amplitude = r.opt<double>("amplitude", e.amplitude);
    e.rotation_angle = r.opt<double>("rotation_angle", e.rotation_angle);
    r.finish();
    e.validate();
    return e;
}

Json to_json(const PulseShape& p) {
    Json env = to_json(p.spec);
    env.erase("schema");
    return {{"schema", schema_id("pulse")},
            {"envelope", env},
            {"variant", std::string(to_string(p.variant))}};
}

PulseShape pulse_shape_from_json(const Json& j) {
    Reader r(j, "pulse", "pulse");
    PulseShape p;
    p.spec = envelope_from_json(r.raw("envelope"));
    p.variant = drag_variant_from_string(r.opt<std::string>("variant", "drag_l"));
    r.finish();
    return p;
}

Json to_json(const GateCalibration& c) {
    return {{"schema", schema_id("calibration")},
            {"amplitude_rad_s", c.amplitude},
            {"beta", c.beta},
            {"drive_freq_hz", c.drive_freq},
            {"virtual_z_rad", c.virtual_z},
            {"t_p_s", c.t_p},
            {"t_d_s", c.t_d}};
}

GateCalibration calibration_from_json(const Json& j) {
    Reader r(j, "calibration", "calibration");
    GateCalibration c;
    c.amplitude = r.req<double>("amplitude_rad_s");
    c.beta = r.opt<double>("beta", 0.0);
    c.drive_freq = r.opt<double>("drive_freq_hz", 0.0);
    c.virtual_z = r.opt<double>("virtual_z_rad", 0.0);
    c.t_p = r.req<double>("t_p_s");
    c.t_d = r.opt<double>("t_d_s", c.t_d);
    r.finish();
    c.validate();
    return c;
}

Json to_json(const DistortionModel& d) {
    Json terms = Json::array();
    for (const auto& t : d.terms) terms.push_back({{"a", t.a}, {"tau_s", t.tau}});
    return {{"schema", schema_id("distortion")}, {"kind", std::string(to_string(d.kind))}, {"terms", terms}};
}

DistortionModel distortion_from_json(const Json& j) {
    Reader r(j, "distortion", "distortion");
    DistortionModel d;
    d.kind = distortion_kind_from_string(r.opt<std::string>("kind", "intra"));
    const Json& terms = r.raw("terms");
    if (!terms.is_array()) throw ConfigError("distortion.terms must be an array");
    for (std::size_t k = 0; k < terms.size(); ++k) {
        Reader t(terms[k], "distortion.terms[" + std::to_string(k) + "]", "term");
        d.terms.push_back({t.req<double>("a"), t.req<double>("tau_s")});
        t.finish();
    }
    r.finish();
    d.validate();
    return d;
}

Json to_json(const SuppressionProblem& p) {
    Json iv = Json::array();
    for (const auto& i : p.intervals) {
        iv.push_back({{"f_low_hz", i.f_low}, {"f_high_hz", i.f_high}, {"weight", i.weight}});
    }
    return {{"schema", schema_id("fast_problem")},
            {"n_terms", p.n_terms},
            {"theta", p.theta},
            {"duration_s", p.duration},
            {"intervals", iv}};
}

SuppressionProblem problem_from_json(const Json& j) {
    Reader r(j, "fast_problem", "fast_problem");
    SuppressionProblem p;
    p.n_terms = r.opt<int>("n_terms", p.n_terms);
    p.theta = r.opt<double>("theta", p.theta);
    p.duration = r.req<double>("duration_s");
    const Json& iv = r.raw("intervals");
    if (!iv.is_array()) throw ConfigError("fast_problem.intervals must be an array");
    for (std::size_t k = 0; k < iv.size(); ++k) {
        Reader t(iv[k], "fast_problem.intervals[" + std::to_string(k) + "]", "interval");
        FrequencyInterval f;
        f.f_low = t.req<double>("f_low_hz");
        f.f_high = t.req<double>("f_high_hz");
        f.weight = t.opt<double>("weight", 1.0);
        t.finish();
        p.intervals.push_back(f);
    }
    r.finish();
    p.validate();
    return p;
}

Json to_json(const FastSolution& s) {
    return {{"coeffs", s.coeffs},
            {"lagrange_multiplier", s.lagrange_multiplier},
            {"objective", s.objective},
            {"kkt_residual", s.kkt_residual},
            {"constraint_error", s.constraint_error},
            {"condition_number", s.condition_number}};
}

Json to_json(const HdProblem& p) {
    return {{"schema", schema_id("hd_problem")},
            {"suppressed_freqs_hz", p.suppressed_freqs},
            {"duration_s", p.duration}};
}

HdProblem hd_problem_from_json(const Json& j) {
    Reader r(j, "hd_problem", "hd_problem");
    HdProblem p;
    p.suppressed_freqs = r.req<std::vector<double>>("suppressed_freqs_hz");
    p.duration = r.req<double>("duration_s");
    r.finish();
    p.validate();
    return p;
}

Json to_json(const HdSolution& s) {
    return {{"beta_even", s.beta_even}, {"d_coeffs", s.d_coeffs}};
}

Json to_json(const SpectrumReport& s) {
    Json bands = Json::array();
    for (const auto& b : s.bands) {
        bands.push_back({{"f_low_hz", b.band.f_low},
                         {"f_high_hz", b.band.f_high},
                         {"weight", b.band.weight},
                         {"energy", b.energy},
                         {"suppression_db", b.suppression_db}});
    }
    return {{"schema", schema_id("spectrum")},
            {"points", s.freqs.size()},
            {"f_min_hz", s.freqs.empty() ? 0.0 : s.freqs.front()},
            {"f_max_hz", s.freqs.empty() ? 0.0 : s.freqs.back()},
            {"bin_spacing_hz", s.bin_spacing},
            {"analytic", s.analytic},
            {"bands", bands}};
}

Json to_json(const PulseRecipe& r) {
    Json j{{"schema", schema_id("recipe")},
           {"method", std::string(to_string(r.method))},
           {"variant", std::string(to_string(r.variant))},
           {"gate_duration_s", r.gate_duration},
           {"t_d_s", r.t_d},
           {"theta", r.theta},
           {"sigma_ratio", r.sigma_ratio},
           {"subtract_offset", r.subtract_offset},
           {"rise_time_s", r.rise_time}};
    auto put = [&j](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    put("n_terms", r.n_terms);
    put("f_c_hz", r.f_c);
    put("w_ef", r.w_ef);
    put("f_l_ef_hz", r.f_l_ef);
    put("f_h_ef_hz", r.f_h_ef);
    put("f_h_2_hz", r.f_h_2);
    put("beta2_freq_hz", r.beta2_freq);
    return j;
}

PulseRecipe recipe_from_json(const Json& j) {
    Reader r(j, "pulse", "recipe");
    PulseRecipe p;
    p.method = pulse_method_from_string(r.req<std::string>("method"));
    p.variant = drag_variant_from_string(r.opt<std::string>("variant", "drag_l"));
    p.gate_duration = r.opt<double>("gate_duration_s", p.gate_duration);
    p.t_d = r.opt<double>("t_d_s", p.t_d);
    p.theta = r.opt<double>("theta", p.theta);
    p.n_terms = r.maybe<int>("n_terms");
    p.f_c = r.maybe<double>("f_c_hz");
    p.w_ef = r.maybe<double>("w_ef");
    p.f_l_ef = r.maybe<double>("f_l_ef_hz");
    p.f_h_ef = r.maybe<double>("f_h_ef_hz");
    p.f_h_2 = r.maybe<double>("f_h_2_hz");
    p.beta2_freq = r.maybe<double>("beta2_freq_hz");
    p.sigma_ratio = r.opt<double>("sigma_ratio", p.sigma_ratio);
    p.subtract_offset = r.opt<bool>("subtract_offset", p.subtract_offset);
    p.rise_time = r.opt<double>("rise_time_s", p.rise_time);
    r.finish();
    p.validate();
    return p;
}

Json to_json(const CalibrationConfig& c) {
    return {{"schema", schema_id("calibration_config")},
            {"max_loop_iters", c.max_loop_iters},
            {"rabi_points", c.rabi_points},
            {"qscale_points", c.qscale_points},
            {"qscale_min", c.qscale_min},
            {"qscale_max", c.qscale_max},
            {"beta_coarse_points", c.beta_coarse_points},
            {"beta_fine_points", c.beta_fine_points},
            {"virtual_z_points", c.virtual_z_points},
            {"virtual_z_span_rad", c.virtual_z_span},
            {"phase_amp_reps", c.phase_amp_reps},
            {"bangbang_reps", c.bangbang_reps},
            {"bangbang_points", c.bangbang_points},
            {"leakage_rb_lengths", c.leakage_rb_lengths},
            {"leakage_rb_sequences", c.leakage_rb_sequences},
            {"shots", c.shots},
            {"seed", c.seed},
            {"integrator_steps", c.integrator.steps}};
}

CalibrationConfig calibration_config_from_json(const Json& j) {
    Reader r(j, "calibration", "calibration_config");
    CalibrationConfig c;
    c.max_loop_iters = r.opt<int>("max_loop_iters", c.max_loop_iters);
    c.rabi_points = r.opt<int>("rabi_points", c.rabi_points);
    c.qscale_points = r.opt<int>("qscale_points", c.qscale_points);
    c.qscale_min = r.opt<double>("qscale_min", c.qscale_min);
    c.qscale_max = r.opt<double>("qscale_max", c.qscale_max);
    c.beta_coarse_points = r.opt<int>("beta_coarse_points", c.beta_coarse_points);
    c.beta_fine_points = r.opt<int>("beta_fine_points", c.beta_fine_points);
    c.virtual_z_points = r.opt<int>("virtual_z_points", c.virtual_z_points);
    c.virtual_z_span = r.opt<double>("virtual_z_span_rad", c.virtual_z_span);
    c.phase_amp_reps = r.opt<std::vector<int>>("phase_amp_reps", c.phase_amp_reps);
    c.bangbang_reps = r.opt<std::vector<int>>("bangbang_reps", c.bangbang_reps);
    c.bangbang_points = r.opt<int>("bangbang_points", c.bangbang_points);
    c.leakage_rb_lengths = r.opt<std::vector<int>>("leakage_rb_lengths", c.leakage_rb_lengths);
    c.leakage_rb_sequences = r.opt<int>("leakage_rb_sequences", c.leakage_rb_sequences);
    c.shots = r.opt<int>("shots", c.shots);
    c.seed = r.opt<std::uint64_t>("seed", c.seed);
    c.integrator.steps = r.opt<int>("integrator_steps", c.integrator.steps);
    r.finish();
    c.validate();
    return c;
}

Json to_json(const RbConfig& c) {
    return {{"schema", schema_id("rb_config")},
            {"lengths", c.lengths},
            {"n_sequences", c.n_sequences},
            {"seed", c.seed}};
}

RbConfig rb_config_from_json(const Json& j) {
    Reader r(j, "rb", "rb_config");
    RbConfig c;
    c.lengths = r.opt<std::vector<int>>("lengths", c.lengths);
    c.n_sequences = r.opt<int>("n_sequences", c.n_sequences);
    c.seed = r.opt<std::uint64_t>("seed", c.seed);
    r.finish();
    return c;
}

Json to_json(const ExperimentConfig& c) {
    return {{"schema", schema_id("experiment")},
            {"model", to_json(c.model)},
            {"pulse", to_json(c.pulse)},
            {"calibration", to_json(c.calibration)},
            {"run_rb", c.run_rb},
            {"rb", to_json(c.rb)}};
}

ExperimentConfig experiment_from_json(const Json& j) {
    Reader r(j, "experiment", "experiment");
    ExperimentConfig c;
    if (r.has("model")) c.model = model_from_json(r.raw("model"));
    c.pulse = recipe_from_json(r.raw("pulse"));
    if (r.has("calibration")) c.calibration = calibration_config_from_json(r.raw("calibration"));
    c.run_rb = r.opt<bool>("run_rb", false);
    if (r.has("rb")) c.rb = rb_config_from_json(r.raw("rb"));
    r.finish();
    return c;
}

Json to_json(const SweepConfig& c) {
    return {{"schema", schema_id("sweep")},
            {"axis", std::string(to_string(c.axis))},
            {"values", c.values},
            {"base", to_json(c.base)},
            {"seed", c.seed}};
}

SweepConfig sweep_from_json(const Json& j) {
    Reader r(j, "sweep", "sweep");
    SweepConfig c;
    c.axis = sweep_axis_from_string(r.req<std::string>("axis"));
    c.values = r.req<std::vector<double>>("values");
    c.base = experiment_from_json(r.raw("base"));
    c.seed = r.opt<std::uint64_t>("seed", c.seed);
    r.finish();
    c.validate();
    return c;
}

Json to_json(const AssignmentMatrix& a) {
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({a.beta(i, 0), a.beta(i, 1), a.beta(i, 2)});
    return {{"schema", schema_id("assignment")}, {"matrix", rows}};
}

AssignmentMatrix assignment_from_json(const Json& j) {
    Reader r(j, "assignment", "assignment");
    const auto rows = r.req<std::vector<std::vector<double>>>("matrix");
    r.finish();
    if (rows.size() != 3) throw ConfigError("assignment.matrix must have three rows");
    AssignmentMatrix a;
    for (int i = 0; i < 3; ++i) {
        if (rows[i].size() != 3) throw ConfigError("assignment.matrix rows need three entries");
        for (int k = 0; k < 3; ++k) a.beta(i, k) = rows[i][k];
    }
    a.validate();
    return a;
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON (" + e.what() + ")");
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

void write_waveform_csv(std::ostream& out, const SampledWaveform& w) {
    out << "t_ns,I,Q\n" << std::setprecision(17);
    for (std::size_t k = 0; k < w.size(); ++k) {
        out << w.time(k) * 1e9 << ',' << w.i_samples[k] << ',' << w.q_samples[k] << '\n';
    }
}

SampledWaveform read_waveform_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(source + ": empty waveform file");
    if (line.rfind("t_ns,I,Q", 0) != 0) throw ConfigError(source + ": header must be t_ns,I,Q");
    std::vector<double> t;
    SampledWaveform w;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        double vals[3];
        char comma = 0;
        if (!(ss >> vals[0] >> comma >> vals[1] >> comma >> vals[2])) {
            throw ConfigError(source + ": malformed row at line " + std::to_string(lineno));
        }
        t.push_back(vals[0] * 1e-9);
        w.i_samples.push_back(vals[1]);
        w.q_samples.push_back(vals[2]);
    }
    if (t.size() < 2) throw ConfigError(source + ": waveform needs at least two samples");
    w.start_time = t.front();
    w.dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (std::abs(t[k] - t[k - 1] - w.dt) > 1e-6 * w.dt) {
            throw ConfigError(source + ": samples are not uniformly spaced");
        }
    }
    w.validate();
    return w;
}

}  // namespace pulseforge

#include "pulseforge/experiment.hpp"

#include <cmath>
#include <limits>

#include "pulseforge/errors.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/units.hpp"
#include "parallel.hpp"

namespace pulseforge {

std::string_view to_string(PulseMethod m) {
    switch (m) {
        case PulseMethod::Fast: return "fast";
        case PulseMethod::Hd: return "hd";
        case PulseMethod::Cosine: return "cosine";
        case PulseMethod::Gaussian: return "gaussian";
        case PulseMethod::Slepian: return "slepian";
        case PulseMethod::SquareCosineRise: return "square_cosine_rise";
    }
    return "?";
}

PulseMethod pulse_method_from_string(std::string_view s) {
    for (PulseMethod m : {PulseMethod::Fast, PulseMethod::Hd, PulseMethod::Cosine, PulseMethod::Gaussian,
                          PulseMethod::Slepian, PulseMethod::SquareCosineRise}) {
        if (s == to_string(m)) return m;
    }
    throw ConfigError("unknown pulse method '" + std::string(s) +
                      "' (expected fast, hd, cosine, gaussian, slepian or square_cosine_rise)");
}

void PulseRecipe::validate() const {
    if (!(t_d >= 0.0)) throw ConfigError("t_d must be non-negative");
    if (!(gate_duration > t_d)) throw ConfigError("gate duration must exceed t_d");
    if (!std::isfinite(theta) || theta == 0.0) throw ConfigError("rotation angle must be finite and nonzero");
    if (n_terms && *n_terms < 1) throw ConfigError("n_terms must be >= 1");
    if (f_c && !(*f_c > 0.0)) throw ConfigError("f_c must be positive");
    if (w_ef && !(*w_ef > 0.0)) throw ConfigError("w_ef must be positive");
    if (beta2_freq && !(*beta2_freq > 0.0)) throw ConfigError("beta2_freq must be positive");
}

SuppressionProblem recipe_problem(const PulseRecipe& recipe, const TransmonModel& model) {
    recipe.validate();
    const double tp = recipe.pulse_duration();
    if (recipe.method == PulseMethod::Slepian) {
        const double fc = recipe.f_c.value_or(2.0 * std::abs(model.alpha) / kTwoPi);
        return slepian_problem(fc, recipe.theta, tp, recipe.n_terms.value_or(4),
                               recipe.f_h_2.value_or(1e9));
    }
    if (recipe.method != PulseMethod::Fast) throw ConfigError("recipe does not describe a FAST problem");
    HeuristicParams hp = heuristic_hyperparams(model.alpha, recipe.variant, recipe.f_h_2.value_or(1e9));
    if (recipe.n_terms) hp.n_terms = *recipe.n_terms;
    if (recipe.f_c) hp.f_c = *recipe.f_c;
    if (recipe.w_ef) hp.w_ef = *recipe.w_ef;
    if (recipe.f_l_ef) hp.f_l_ef = *recipe.f_l_ef;
    if (recipe.f_h_ef) hp.f_h_ef = *recipe.f_h_ef;
    if (recipe.f_h_2) hp.f_h_2 = *recipe.f_h_2;
    hp.f_h_2 = std::max(hp.f_h_2, 2.0 * hp.f_c);
    SuppressionProblem p = hp.to_problem(recipe.theta, tp);
    p.validate();
    return p;
}

PulseShape build_pulse(const PulseRecipe& recipe, const TransmonModel& model) {
    recipe.validate();
    model.validate();
    const double tp = recipe.pulse_duration();
    PulseShape shape;
    shape.variant = recipe.variant;
    shape.spec.duration = tp;
    shape.spec.rotation_angle = recipe.theta;
    switch (recipe.method) {
        case PulseMethod::Fast:
        case PulseMethod::Slepian: {
            const SuppressionProblem p = recipe_problem(recipe, model);
            shape.spec = fast_envelope_spec(solve_fast(p), p);
            break;
        }
        case PulseMethod::Hd: {
            HdProblem p;
            p.duration = tp;
            p.suppressed_freqs = {recipe.beta2_freq.value_or(std::abs(model.alpha) / kTwoPi)};
            shape.spec = hd_envelope_spec(solve_hd(p), 1.0, tp);
            shape.spec.rotation_angle = recipe.theta;
            break;
        }
        case PulseMethod::Cosine: shape.spec.shape = CosineShape{}; break;
        case PulseMethod::Gaussian:
            shape.spec.shape = GaussianShape{recipe.sigma_ratio, recipe.subtract_offset};
            break;
        case PulseMethod::SquareCosineRise:
            shape.spec.shape = SquareCosineRiseShape{recipe.rise_time};
            break;
    }
    shape.spec.validate();
    return shape;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const PulseShape shape = build_pulse(config.pulse, config.model);
    GateCalibration init = initial_calibration(config.model, shape);
    init.t_d = config.pulse.t_d;
    ExperimentResult r;
    r.calib = full_calibration(config.model, shape, config.calibration, &init).calib;
    const GateSimulator sim(config.model, shape, r.calib, config.calibration.integrator);
    r.cardinal = gate_error_cardinal(sim);
    if (config.run_rb) {
        const RbOutcome o = run_rb(SimulatedGateSet(sim), config.rb);
        r.rb = fit_rb(o);
        r.leakage_rb = fit_leakage_rb(o);
    }
    return r;
}

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::GateDuration: return "gate_duration";
        case SweepAxis::NTerms: return "n_terms";
        case SweepAxis::FC: return "f_c";
        case SweepAxis::WEf: return "w_ef";
        case SweepAxis::IntervalCenter: return "interval_center";
        case SweepAxis::IntervalWidth: return "interval_width";
        case SweepAxis::Beta2Freq: return "beta2_freq";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
    for (SweepAxis a : {SweepAxis::GateDuration, SweepAxis::NTerms, SweepAxis::FC, SweepAxis::WEf,
                        SweepAxis::IntervalCenter, SweepAxis::IntervalWidth, SweepAxis::Beta2Freq}) {
        if (s == to_string(a)) return a;
    }
    throw ConfigError("unknown sweep axis '" + std::string(s) + "'");
}

void SweepConfig::validate() const {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    const PulseMethod m = base.pulse.method;
    const bool fast = m == PulseMethod::Fast;
    switch (axis) {
        case SweepAxis::GateDuration: break;
        case SweepAxis::NTerms:
        case SweepAxis::FC:
            if (!fast && m != PulseMethod::Slepian) {
                throw ConfigError(std::string(to_string(axis)) + " sweeps need a fast or slepian pulse");
            }
            break;
        case SweepAxis::WEf:
        case SweepAxis::IntervalCenter:
        case SweepAxis::IntervalWidth:
            if (!fast) throw ConfigError(std::string(to_string(axis)) + " sweeps need a fast pulse");
            break;
        case SweepAxis::Beta2Freq:
            if (m != PulseMethod::Hd) throw ConfigError("beta2_freq sweeps need an hd pulse");
            break;
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    }
}

ExperimentConfig sweep_point(const SweepConfig& sweep, double value) {
    ExperimentConfig c = sweep.base;
    c.calibration.seed = sweep.seed;
    c.rb.seed = sweep.seed;
    PulseRecipe& p = c.pulse;
    const double fa = std::abs(c.model.alpha) / kTwoPi;
    const double lo = p.f_l_ef.value_or(0.95 * fa);
    const double hi = p.f_h_ef.value_or(1.05 * fa);
    switch (sweep.axis) {
        case SweepAxis::GateDuration: p.gate_duration = value; break;
        case SweepAxis::NTerms: p.n_terms = static_cast<int>(std::lround(value)); break;
        case SweepAxis::FC: p.f_c = value; break;
        case SweepAxis::WEf: p.w_ef = value; break;
        case SweepAxis::IntervalCenter:
            p.f_l_ef = value - 0.5 * (hi - lo);
            p.f_h_ef = value + 0.5 * (hi - lo);
            break;
        case SweepAxis::IntervalWidth:
            p.f_l_ef = 0.5 * (lo + hi) - 0.5 * value;
            p.f_h_ef = 0.5 * (lo + hi) + 0.5 * value;
            break;
        case SweepAxis::Beta2Freq: p.beta2_freq = value; break;
    }
    return c;
}

std::vector<SweepRow> run_sweep(const SweepConfig& sweep, int jobs) {
    sweep.validate();
    std::vector<SweepRow> rows(sweep.values.size());
    detail::parallel_for(rows.size(), jobs, [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.value = sweep.values[k];
        try {
            const ExperimentResult r = run_experiment(sweep_point(sweep, row.value));
            row.eps_g = r.rb ? r.rb->eps_g : r.cardinal.error;
            row.l_g = r.leakage_rb ? r.leakage_rb->l_g : r.cardinal.leakage;
            row.amplitude = r.calib.amplitude;
            row.beta = r.calib.beta;
            row.virtual_z = r.calib.virtual_z;
        } catch (const std::exception& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.eps_g = row.l_g = row.amplitude = row.beta = row.virtual_z = nan;
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace pulseforge

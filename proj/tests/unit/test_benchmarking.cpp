#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pulseforge/benchmarking.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;

namespace {

const double kAlpha = angular(-212e6);
const double kNg = 53.0 / 24.0;

PulseShape fast_shape(double tp, DragVariant v = DragVariant::DragL) {
    const SuppressionProblem p = heuristic_hyperparams(kAlpha, v).to_problem(kPi / 2, tp);
    return {fast_envelope_spec(solve_fast(p), p), v};
}

PulseShape cosine_shape(double tp, DragVariant v = DragVariant::DragL) {
    EnvelopeSpec spec;
    spec.duration = tp;
    return {spec, v};
}

GateCalibration area_calibration(const PulseShape& shape) {
    GateCalibration c;
    c.t_p = shape.spec.duration;
    c.amplitude = area_theorem_amplitude(shape, c.t_p);
    return c;
}

// `sequences` entries per length carrying the given populations.
RbOutcome synthetic(const std::vector<int>& lengths, auto&& pops, auto&& purity, int sequences = 1) {
    RbOutcome o;
    o.lengths = lengths;
    for (int n : lengths) {
        o.populations.emplace_back();
        o.purity.emplace_back();
        for (int s = 0; s < sequences; ++s) {
            o.populations.back().push_back(pops(n));
            o.purity.back().push_back(purity(n));
        }
    }
    return o;
}

const std::vector<int> kLengths{2, 8, 24, 60, 120, 240};

// Published to three decimals; the middle row sums to 0.999 and is renormalized.
Eigen::Matrix3d reference_assignment() {
    Eigen::Matrix3d b;
    b << 0.972, 0.025, 0.003, 0.095, 0.742, 0.162, 0.024, 0.126, 0.850;
    for (int i = 0; i < 3; ++i) b.row(i) /= b.row(i).sum();
    return b;
}

struct Calibrated {
    TransmonModel model;
    PulseShape shape;
    GateCalibration calib;
};

const Calibrated& calibrated(bool fast) {
    static const auto make = [](bool f) {
        Calibrated c;
        const double tp = 6.25e-9 - 0.41e-9;
        c.shape = f ? fast_shape(tp) : cosine_shape(tp);
        CalibrationConfig cfg;
        cfg.jobs = 4;
        c.calib = full_calibration(c.model, c.shape, cfg).calib;
        return c;
    };
    static const Calibrated f = make(true), c = make(false);
    return fast ? f : c;
}

}  // namespace

TEST_CASE("RB fits on exact synthetic data") {
    SUBCASE("standard RB") {
        const RbOutcome o = synthetic(kLengths, [](int n) { return std::array<double, 3>{0.5 + 0.5 * std::pow(0.99, n), 0.5 - 0.5 * std::pow(0.99, n), 0.0}; },
                                      [](int) { return 1.0; });
        const RbFit f = fit_rb(o);
        CHECK(f.eps_cl == doctest::Approx(5e-3).epsilon(1e-8));
        CHECK(f.eps_g == doctest::Approx(5e-3 / kNg).epsilon(1e-8));
        CHECK(f.eps_g == doctest::Approx(2.26e-3).epsilon(3e-3));
    }
    SUBCASE("flat data") {
        const RbOutcome o = synthetic(kLengths, [](int) { return std::array<double, 3>{1.0, 0.0, 0.0}; }, [](int) { return 1.0; });
        CHECK(fit_rb(o).eps_g == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(fit_leakage_rb(o).l_g == 0.0);
        CHECK(fit_purity_rb(o).eps_inc == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("leakage RB") {
        const RbOutcome o = synthetic(kLengths, [](int n) {
            const double pf = 0.01 * (1.0 - std::pow(0.995, n));
            return std::array<double, 3>{1.0 - pf, 0.0, pf};
        }, [](int) { return 1.0; });
        const LeakageFit f = fit_leakage_rb(o);
        CHECK(f.fit.p == doctest::Approx(0.995).epsilon(1e-9));
        CHECK(f.fit.a == doctest::Approx(0.01).epsilon(1e-7));
        CHECK(f.l_g == doctest::Approx(0.01 * 0.005 / kNg).epsilon(1e-6));
    }
    SUBCASE("purity RB") {
        const RbOutcome o = synthetic(kLengths, [](int) { return std::array<double, 3>{1.0, 0.0, 0.0}; },
                                      [](int n) { return std::pow(0.998, n); });
        const PurityFit f = fit_purity_rb(o);
        CHECK(f.u == doctest::Approx(0.998).epsilon(1e-9));
        CHECK(f.eps_inc == doctest::Approx(0.5 * (1.0 - std::sqrt(0.998)) / kNg).epsilon(1e-6));
    }
}

TEST_CASE("RB fit coverage under binomial noise") {
    std::mt19937_64 rng(2024);
    const double p_true = 0.985;
    int covered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const RbOutcome o = synthetic(kLengths, [&](int n) {
            std::binomial_distribution<int> draw(1000, 0.5 + 0.48 * std::pow(p_true, n));
            const double pg = draw(rng) / 1000.0;
            return std::array<double, 3>{pg, 1.0 - pg, 0.0};
        }, [](int) { return 1.0; }, 25);
        const RbFit f = fit_rb(o);
        if (std::abs(f.fit.p - p_true) <= 2.0 * f.fit.p_stderr) ++covered;
    }
    MESSAGE("covered " << covered << " of 100");
    CHECK(covered >= 90);
}

TEST_CASE("ideal gate sets") {
    RbConfig cfg;
    cfg.lengths = {2, 8, 24, 60, 120};
    cfg.n_sequences = 10;
    SUBCASE("perfect gates return to the ground state") {
        const RbOutcome o = run_rb(IdealGateSet(0.0), cfg);
        for (const auto& per_length : o.populations)
            for (const auto& p : per_length) CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("injected depolarizing error") {
        cfg.lengths = {2, 20, 60, 150, 300, 500};
        const RbFit f = fit_rb(run_rb(IdealGateSet(1e-3), cfg));
        CHECK(f.eps_g == doctest::Approx(1e-3).epsilon(0.2));
    }
    SUBCASE("seeded determinism") {
        const RbOutcome a = run_rb(IdealGateSet(2e-3), cfg), b = run_rb(IdealGateSet(2e-3), cfg);
        CHECK(a.populations == b.populations);
        CHECK(a.purity == b.purity);
        cfg.jobs = 4;
        const RbOutcome c = run_rb(IdealGateSet(2e-3), cfg);
        CHECK(a.populations == c.populations);
        cfg.seed = 99;
        CHECK(run_rb(IdealGateSet(2e-3), cfg).populations != a.populations);
    }
    SUBCASE("recovery closes every sequence") {
        const auto seqs = draw_sequences(cfg);
        const CliffordTable& t = CliffordTable::instance();
        for (const auto& per_length : seqs)
            for (const auto& s : per_length) {
                Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
                for (NativeGate g : rb_native_gates(s)) u = native_unitary(g) * u;
                CHECK(equal_up_to_phase(u, t.unitary(0)));
            }
    }
}

TEST_CASE("purity RB on simulated gates") {
    SUBCASE("pure dephasing matches the closed-form error per gate") {
        TransmonModel m;
        m.levels = 2;
        m.t1 = kInfiniteTime;
        m.n_bar = 0.0;
        m.t_phi = 20e-6;
        const PulseShape shape = cosine_shape(20e-9, DragVariant::NoDrag);
        const GateCalibration calib = area_calibration(shape);
        RbConfig cfg;
        cfg.lengths = {2, 20, 60, 150, 300};
        cfg.n_sequences = 8;
        const PurityFit f = fit_purity_rb(run_rb(SimulatedGateSet(m, shape, calib), cfg));
        const double expected = calib.gate_time() / (6.0 * m.t_phi);
        CHECK(f.eps_inc == doctest::Approx(expected).epsilon(0.2));
    }
    SUBCASE("coherent errors leave purity intact") {
        const TransmonModel m = TransmonModel{}.closed();
        const PulseShape shape = cosine_shape(10e-9, DragVariant::NoDrag);
        GateCalibration calib = area_calibration(shape);
        calib.amplitude *= 1.02;
        RbConfig cfg;
        cfg.lengths = {2, 8, 24, 60};
        cfg.n_sequences = 8;
        const RbOutcome o = run_rb(SimulatedGateSet(m, shape, calib), cfg);
        const RbFit rb = fit_rb(o);
        const PurityFit pu = fit_purity_rb(o);
        CHECK(rb.eps_g > 1e-4);
        CHECK(pu.eps_inc < 0.05 * rb.eps_g);
    }
}

TEST_CASE("readout correction") {
    AssignmentMatrix beta;
    const Eigen::Vector3d p(0.7, 0.2, 0.1);
    CHECK((correct_readout(p, beta).p - p).norm() == 0.0);

    beta.beta = reference_assignment();
    CHECK_NOTHROW(beta.validate());
    const Eigen::Vector3d e1 = beta.beta.transpose() * Eigen::Vector3d(1, 0, 0);
    CHECK((correct_readout(e1, beta).p - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
    const CorrectedPopulations u = correct_readout(Eigen::Vector3d::Constant(1.0 / 3.0), beta);
    CHECK(u.p.sum() == doctest::Approx(1.0).epsilon(1e-12));

    AssignmentMatrix singular;
    singular.beta << 0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(correct_readout(p, singular), NumericError);
    AssignmentMatrix bad;
    bad.beta(0, 0) = 0.9;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("calibrated FAST DRAG-L randomized benchmarking") {
    const Calibrated& c = calibrated(true);
    RbConfig cfg;
    cfg.lengths = {2, 8, 24, 60, 100, 160};
    cfg.n_sequences = 15;
    cfg.jobs = 4;
    const RbOutcome o = run_rb(SimulatedGateSet(c.model, c.shape, c.calib), cfg);
    double pg100 = 0.0;
    for (const auto& p : o.populations[4]) pg100 += p[0] / static_cast<double>(o.populations[4].size());
    CHECK(pg100 > 0.9);

    const RbFit rb = fit_rb(o);
    const PurityFit pu = fit_purity_rb(o);
    MESSAGE("eps_g = " << rb.eps_g << ", eps_inc = " << pu.eps_inc);
    // Coherent errors can only add to the incoherent part (1 sigma of the fit).
    const double sigma = rb.fit.p_stderr / 2.0 / kNg;
    CHECK(rb.eps_g + sigma >= pu.eps_inc);

    SUBCASE("SPAM robustness") {
        AssignmentMatrix beta;
        beta.beta = reference_assignment();
        const RbOutcome measured = apply_assignment(o, beta);
        const RbFit rb_m = fit_rb(measured);
        CHECK(rb_m.eps_g == doctest::Approx(rb.eps_g).epsilon(0.05));
        CHECK(std::abs(rb_m.fit.b - rb.fit.b) > 1e-3);

        const LeakageFit lk = fit_leakage_rb(o);
        const LeakageFit lk_m = fit_leakage_rb(measured);
        const LeakageFit lk_c = fit_leakage_rb(correct_outcome(measured, beta));
        MESSAGE("L_g true " << lk.l_g << ", measured " << lk_m.l_g << ", corrected " << lk_c.l_g);
        CHECK(std::abs(lk_m.l_g - lk.l_g) > 0.1 * lk.l_g);
        CHECK(lk_c.l_g == doctest::Approx(lk.l_g).epsilon(0.1));
    }
}

TEST_CASE("leakage RB agrees with the direct per-gate leakage") {
    const Calibrated& c = calibrated(false);
    RbConfig cfg;
    cfg.lengths = {2, 10, 30, 60, 100, 160, 240};
    cfg.n_sequences = 15;
    cfg.jobs = 4;
    const LeakageFit f = fit_leakage_rb(run_rb(SimulatedGateSet(c.model, c.shape, c.calib), cfg));
    const CardinalMetrics direct = gate_error_cardinal(c.model, c.calib, c.shape);
    // RB counts the idle identity as a gate; the direct number is per pulse.
    const double per_pulse = f.l_g * kNg / (kNg - 1.0 / 24.0);
    MESSAGE("leakage RB " << f.l_g << " (per pulse " << per_pulse << "), direct " << direct.leakage);
    CHECK(per_pulse == doctest::Approx(direct.leakage).epsilon(0.3));
}

TEST_CASE("distortion characterization circuits") {
    TransmonModel m;
    m.levels = 2;
    m = m.closed();
    const PulseShape shape = cosine_shape(8e-9, DragVariant::NoDrag);
    WaveformExperiment exp{m, shape, area_calibration(shape)};
    const std::vector<double> tds{1e-9, 3e-9, 6e-9, 10e-9, 16e-9, 24e-9};
    std::vector<double> phis;
    for (int k = -10; k <= 10; ++k) phis.push_back(k * 0.005);
    auto line = [](double a) { return DistortionModel{DistortionKind::Intra, {{a, 8e-9}}}; };

    SUBCASE("I-distortion axis shift") {
        for (const auto& s : i_distortion_characterization(exp, nullptr, tds, phis)) CHECK(std::abs(s.phi_s) < 5e-4);

        const DistortionModel l = line(-0.028);
        const auto scans = i_distortion_characterization(exp, &l, tds, phis);
        std::vector<double> x, y;
        for (const auto& s : scans) {
            x.push_back(s.t_d);
            y.push_back(s.phi_s);
        }
        const DecayFit fit = fit_decay(x, y);
        MESSAGE("tau = " << fit.tau);
        CHECK(fit.tau == doctest::Approx(8e-9).epsilon(0.2));
    }
    SUBCASE("axis shift is linear in the tail amplitude") {
        std::vector<double> a_values{-0.01, -0.02, -0.04}, shifts;
        for (double a : a_values) {
            const DistortionModel l = line(a);
            shifts.push_back(i_distortion_characterization(exp, &l, {3e-9}, phis).at(0).phi_s);
        }
        const LineFit f = fit_line(a_values, shifts);
        CHECK(f.r_squared > 0.99);
    }
    SUBCASE("C-distortion circuit") {
        const std::vector<int> reps{2, 6, 12};
        for (const auto& row : c_distortion_characterization(exp, nullptr, {2e-9, 8e-9}, reps))
            for (double p : row) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));
        const DistortionModel intra = line(-0.028);
        for (const auto& row : c_distortion_characterization(exp, &intra, {2e-9, 8e-9}, reps))
            for (double p : row) CHECK(std::abs(p - 0.5) < 0.02);
        const DistortionModel cross{DistortionKind::Cross, {{-0.028, 8e-9}}};
        const auto grid = c_distortion_characterization(exp, &cross, {2e-9}, reps);
        const auto& row = grid.at(0);
        CHECK(std::abs(row[0] - 0.5) < std::abs(row[1] - 0.5));
        CHECK(std::abs(row[1] - 0.5) < std::abs(row[2] - 0.5));
        CHECK(std::abs(row[2] - 0.5) > 0.01);
    }
}

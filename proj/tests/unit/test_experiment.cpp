#include <doctest.h>

#include <cmath>
#include <vector>

#include "pulseforge/errors.hpp"
#include "pulseforge/experiment.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;

namespace {

ExperimentConfig base(PulseMethod method, DragVariant variant = DragVariant::DragL) {
    ExperimentConfig c;
    c.pulse.method = method;
    c.pulse.variant = variant;
    c.calibration.jobs = 4;
    return c;
}

}  // namespace

TEST_CASE("recipes build pulses of the requested gate time and area") {
    const TransmonModel m;
    for (PulseMethod method : {PulseMethod::Fast, PulseMethod::Hd, PulseMethod::Cosine, PulseMethod::Gaussian,
                               PulseMethod::Slepian, PulseMethod::SquareCosineRise}) {
        CAPTURE(to_string(method));
        PulseRecipe r;
        r.method = method;
        r.gate_duration = 20e-9;
        r.rise_time = 4e-9;
        const PulseShape s = build_pulse(r, m);
        CHECK(s.spec.duration == doctest::Approx(20e-9 - r.t_d).epsilon(1e-14));
        CHECK(s.variant == r.variant);
        CHECK(pulse_method_from_string(to_string(method)) == method);
    }
    CHECK_THROWS_AS(pulse_method_from_string("triangle"), ConfigError);

    PulseRecipe bad;
    bad.gate_duration = 0.3e-9;
    CHECK_THROWS_AS(build_pulse(bad, m), ConfigError);
    bad = PulseRecipe{};
    bad.w_ef = -1.0;
    CHECK_THROWS_AS(build_pulse(bad, m), ConfigError);
}

TEST_CASE("recipe problems follow the heuristic unless overridden") {
    const TransmonModel m;
    PulseRecipe r;
    const SuppressionProblem p = recipe_problem(r, m);
    const SuppressionProblem h = heuristic_hyperparams(m.alpha, r.variant).to_problem(r.theta, r.pulse_duration());
    CHECK(p.n_terms == h.n_terms);
    REQUIRE(p.intervals.size() == h.intervals.size());
    for (std::size_t k = 0; k < p.intervals.size(); ++k) {
        CHECK(p.intervals[k].f_low == h.intervals[k].f_low);
        CHECK(p.intervals[k].f_high == h.intervals[k].f_high);
        CHECK(p.intervals[k].weight == h.intervals[k].weight);
    }
    r.n_terms = 7;
    CHECK(recipe_problem(r, m).n_terms == 7);
    r.method = PulseMethod::Cosine;
    CHECK_THROWS_AS(recipe_problem(r, m), ConfigError);
}

TEST_CASE("sweep points") {
    SweepConfig sw;
    sw.base = base(PulseMethod::Fast);
    sw.seed = 99;
    sw.values = {1.0};

    sw.axis = SweepAxis::GateDuration;
    ExperimentConfig c = sweep_point(sw, 9e-9);
    CHECK(c.pulse.gate_duration == 9e-9);
    CHECK(c.calibration.seed == 99);
    CHECK(c.rb.seed == 99);

    sw.axis = SweepAxis::NTerms;
    CHECK(*sweep_point(sw, 5.0).pulse.n_terms == 5);

    const double fa = std::abs(sw.base.model.alpha) / kTwoPi;
    sw.axis = SweepAxis::IntervalCenter;
    c = sweep_point(sw, 200e6);
    CHECK(0.5 * (*c.pulse.f_l_ef + *c.pulse.f_h_ef) == doctest::Approx(200e6));
    CHECK(*c.pulse.f_h_ef - *c.pulse.f_l_ef == doctest::Approx(0.1 * fa));
    sw.axis = SweepAxis::IntervalWidth;
    c = sweep_point(sw, 40e6);
    CHECK(0.5 * (*c.pulse.f_l_ef + *c.pulse.f_h_ef) == doctest::Approx(fa));
    CHECK(*c.pulse.f_h_ef - *c.pulse.f_l_ef == doctest::Approx(40e6));

    // Axes must exist in the base pulse.
    sw.base = base(PulseMethod::Cosine);
    sw.axis = SweepAxis::WEf;
    CHECK_THROWS_AS(sw.validate(), ConfigError);
    sw.axis = SweepAxis::Beta2Freq;
    CHECK_THROWS_AS(sw.validate(), ConfigError);
    sw.axis = SweepAxis::GateDuration;
    sw.values.clear();
    CHECK_THROWS_AS(sw.validate(), ConfigError);
    CHECK_THROWS_AS(sweep_axis_from_string("t1"), ConfigError);
}

TEST_CASE("single-value sweep matches a direct run, failures become NaN rows") {
    SweepConfig sw;
    sw.base = base(PulseMethod::Cosine);
    sw.base.model = sw.base.model.closed();
    sw.axis = SweepAxis::GateDuration;
    sw.values = {8e-9, 0.2e-9};
    sw.seed = 5;

    const std::vector<SweepRow> rows = run_sweep(sw, 2);
    REQUIRE(rows.size() == 2);
    const ExperimentResult direct = run_experiment(sweep_point(sw, 8e-9));
    CHECK(rows[0].error.empty());
    CHECK(rows[0].eps_g == direct.cardinal.error);
    CHECK(rows[0].l_g == direct.cardinal.leakage);
    CHECK(rows[0].amplitude == direct.calib.amplitude);
    CHECK(rows[0].beta == direct.calib.beta);
    CHECK(rows[0].virtual_z == direct.calib.virtual_z);

    CHECK(rows[1].value == 0.2e-9);
    CHECK_FALSE(rows[1].error.empty());
    CHECK(std::isnan(rows[1].eps_g));
    CHECK(std::isnan(rows[1].l_g));
}

TEST_CASE("FAST leaks less than the cosine pulse at short gate times") {
    SweepConfig fast;
    fast.base = base(PulseMethod::Fast);
    fast.axis = SweepAxis::GateDuration;
    fast.values = {6.25e-9, 9e-9};
    SweepConfig cosine = fast;
    cosine.base.pulse.method = PulseMethod::Cosine;

    const auto rf = run_sweep(fast, 2);
    const auto rc = run_sweep(cosine, 2);
    for (std::size_t k = 0; k < rf.size(); ++k) {
        CAPTURE(fast.values[k]);
        MESSAGE("L fast " << rf[k].l_g << ", cosine " << rc[k].l_g);
        REQUIRE(rf[k].error.empty());
        REQUIRE(rc[k].error.empty());
        CHECK(rf[k].l_g <= rc[k].l_g);
    }
}

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pulseforge/calibration.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/simulator.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;
using cd = std::complex<double>;

namespace {

const double kAlpha = angular(-212e6);

PulseShape fast_shape(double tp) {
    const SuppressionProblem p = heuristic_hyperparams(kAlpha, DragVariant::DragL).to_problem(kPi / 2, tp);
    return {fast_envelope_spec(solve_fast(p), p), DragVariant::DragL};
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

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DriveFunction drive_of(const PulseShape& shape, const GateCalibration& calib, const TransmonModel& model) {
    const auto [spec, drag] = calibrated_pulse(shape, calib, model);
    return [spec, drag](double t) { return apply_drag(spec, drag, t); };
}

}  // namespace

TEST_CASE("Hamiltonian") {
    TransmonModel m;
    SUBCASE("drive off is the Duffing ladder") {
        const Matrix h = build_hamiltonian(m, 0.0, 0.0, 0.0, 0.0, 0.0);
        Matrix expected = Matrix::Zero(4, 4);
        expected.diagonal() << 0.0, 0.0, m.alpha, 3.0 * m.alpha;
        CHECK((h - expected).norm() < 1e-6);
    }
    SUBCASE("frame phase rotates the quadratures") {
        const double omega = angular(40e6);
        CHECK((build_hamiltonian(m, omega, 0.0, kPi / 2, 0.0, 0.0) - build_hamiltonian(m, 0.0, -omega, 0.0, 0.0, 0.0)).norm() < 1e-6);
    }
    SUBCASE("ladder matrix elements") {
        const double omega = angular(40e6);
        const Matrix h = build_hamiltonian(m, omega, 0.0, 0.0, 0.0, 0.0);
        CHECK(std::abs(h(0, 1)) == doctest::Approx(omega / 2.0).epsilon(1e-14));
        CHECK(std::abs(h(1, 2)) == doctest::Approx(std::sqrt(2.0) * omega / 2.0).epsilon(1e-14));
        CHECK(std::abs(h(2, 3)) == doctest::Approx(std::sqrt(3.0) * omega / 2.0).epsilon(1e-14));
        CHECK((h - h.adjoint()).norm() == 0.0);
    }
    SUBCASE("invalid models") {
        TransmonModel bad = m;
        bad.levels = 6;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = m;
        bad.n_bar = 1.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = m;
        bad.t1 = -1.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("free evolution") {
    TransmonModel m;
    m.n_bar = 0.0;
    const DriveFunction off = [](double) { return IqSample{}; };
    SUBCASE("amplitude decay over T1") {
        const DensityMatrix rho = evolve(DensityMatrix::basis(4, 1), m, off, m.t1, 0.0, 0.0, 0.0, {4096});
        CHECK(rho.population(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4 / std::exp(-1.0)));
    }
    SUBCASE("property: trace preserved and decay monotone") {
        Vector psi = Vector::Zero(4);
        psi << 0.3, cd(0.5, 0.2), cd(0.1, -0.6), 0.4;
        DensityMatrix rho = DensityMatrix::from_ket(psi.normalized());
        double p_prev = 1.0 - rho.population(0);
        for (int k = 0; k < 10; ++k) {
            rho = evolve(rho, m, off, 10e-9, 0.0, 0.0, 0.0, {1024});
            CHECK(std::abs(rho.rho.trace().real() - 1.0) < 1e-9);
            CHECK_NOTHROW(rho.check());
            const double p = 1.0 - rho.population(0);
            CHECK(p < p_prev);
            p_prev = p;
        }
    }
}

TEST_CASE("step halving and convergence order") {
    const TransmonModel m;
    const PulseShape shape = fast_shape(5.84e-9);
    const GateCalibration calib = area_calibration(shape);
    const DriveFunction drive = drive_of(shape, calib, m);
    const DensityMatrix rho0 = DensityMatrix::basis(4, 0);
    auto run = [&](int steps) { return evolve(rho0, m, drive, calib.t_p, 0.0, 0.0, 0.0, {steps}).rho; };
    const Matrix r256 = run(256), r512 = run(512), r1024 = run(1024), r2048 = run(2048), r4096 = run(4096);
    CHECK(trace_distance(r2048, r4096) < 1e-8);
    const double e1 = trace_distance(r256, r512), e2 = trace_distance(r512, r1024);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("sequences") {
    const TransmonModel m;
    const PulseShape shape = fast_shape(5.84e-9);
    GateCalibration calib = area_calibration(shape);
    calib.beta = 1.0;
    calib.virtual_z = 0.013;

    SUBCASE("empty sequence") {
        const DensityMatrix rho0 = DensityMatrix::basis(4, 1);
        const SequenceResult r = run_sequence(rho0, m, shape, calib, {});
        CHECK(r.rho.rho == rho0.rho);
        CHECK(r.accumulated_phase == 0.0);
    }
    SUBCASE("accumulated virtual-Z phase") {
        const GateSimulator sim(m, shape, calib);
        const SequenceResult r = sim.run(DensityMatrix::basis(4, 0), std::vector<GateOp>(8, GateOp::x90()));
        CHECK(r.accumulated_phase == doctest::Approx(8.0 * calib.virtual_z).epsilon(1e-14));
        CHECK(r.elapsed == doctest::Approx(8.0 * calib.gate_time()).epsilon(1e-14));
    }
    SUBCASE("property: virtual Z equals a shifted drive phase") {
        const GateSimulator sim(m.closed(), shape, calib);
        const DensityMatrix rho0 = DensityMatrix::basis(4, 0);
        for (double phi : {0.3, -1.1, 2.5}) {
            const SequenceResult a = sim.run(rho0, {GateOp::vz(phi), GateOp::x90()});
            const SequenceResult b = sim.run(rho0, {GateOp{GateOp::Kind::Pulse, phi}});
            CHECK((a.rho.rho - b.rho.rho).norm() < 1e-10);
            CHECK(a.accumulated_phase == doctest::Approx(b.accumulated_phase + phi));
        }
    }
}

TEST_CASE("two-level limits") {
    TransmonModel m;
    m.levels = 2;
    m = m.closed();
    const PulseShape shape = cosine_shape(10e-9, DragVariant::NoDrag);
    const GateCalibration calib = area_calibration(shape);
    const GateSimulator sim(m, shape, calib);

    const SequenceResult one = sim.run(DensityMatrix::basis(2, 0), {GateOp::x90()});
    CHECK(one.rho.population(1) == doctest::Approx(0.5).epsilon(2e-4));
    const SequenceResult two = sim.run(DensityMatrix::basis(2, 0), {GateOp::x90(), GateOp::x90()});
    CHECK(std::abs(two.rho.population(1) - 1.0) < 1e-6);
    const CardinalMetrics cm = gate_error_cardinal(sim);
    CHECK(cm.leakage == 0.0);
    CHECK(cm.error < 1e-9);
}

TEST_CASE("closed-system leakage of FAST against cosine") {
    // Calibrated in a decoherence-free model so leakage is purely coherent.
    const TransmonModel m = TransmonModel{}.closed();
    CalibrationConfig cfg;
    cfg.jobs = 4;
    const double tp = 6.25e-9 - 0.41e-9;
    const CalibrationReport fast = full_calibration(m, fast_shape(tp), cfg);
    const CalibrationReport cos = full_calibration(m, cosine_shape(tp), cfg);
    const CardinalMetrics mf = gate_error_cardinal(m, fast.calib, fast_shape(tp));
    const CardinalMetrics mc = gate_error_cardinal(m, cos.calib, cosine_shape(tp));
    MESSAGE("FAST L = " << mf.leakage << ", cosine L = " << mc.leakage);
    CHECK(mf.leakage < 5e-5);
    CHECK(mc.leakage > 10.0 * mf.leakage);
}

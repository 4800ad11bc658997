#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <boost/rational.hpp>

#include "pulseforge/errors.hpp"
#include "pulseforge/fast_synth.hpp"
#include "pulseforge/hd_drag.hpp"
#include "pulseforge/spectrum.hpp"
#include "pulseforge/units.hpp"

using namespace pulseforge;
using cd = std::complex<double>;
using Rational = boost::rational<long long>;

namespace {

const double kAlpha = angular(-212e6);

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / r.denominator(); }

// Coefficients of prod_j (1 - u / r_j) in u = omega^2 / alpha^2 for rational roots r_j.
std::vector<Rational> expand_roots(const std::vector<Rational>& roots) {
    std::vector<Rational> poly{Rational(1)};
    for (const auto& r : roots) {
        std::vector<Rational> next(poly.size() + 1, Rational(0));
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= poly[k] / r;
        }
        poly = next;
    }
    return poly;
}

// Simpson quadrature of (I - iQ) exp(-i 2 pi f t).
cd iq_transform_quadrature(const EnvelopeSpec& spec, const DragConfig& drag, double f, int intervals = 20000) {
    const double h = spec.duration / intervals;
    cd sum = 0.0;
    for (int k = 0; k <= intervals; ++k) {
        const double t = k * h;
        const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const IqSample s = apply_drag(spec, drag, t);
        sum += w * cd(s.i, -s.q) * std::exp(cd(0.0, -kTwoPi * f * t));
    }
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("single zero at the anharmonicity") {
    const auto beta = solve_betas(hd_problem_for_anharmonicity(1, kAlpha, 6e-9));
    REQUIRE(beta.size() == 2);
    CHECK(beta[0] == 1.0);
    CHECK(beta[1] * kAlpha * kAlpha == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("confluent double zero matches rational expansion") {
    const auto beta = solve_betas(hd_problem_for_anharmonicity(2, kAlpha, 6e-9));
    REQUIRE(beta.size() == 3);
    // P(u) = (1 - u)^2 with u = omega^2 / alpha^2, so beta_2n alpha^2n = (-1)^n coefficient.
    const auto poly = expand_roots({Rational(1), Rational(1)});
    CHECK(poly[1] == Rational(-2));
    CHECK(poly[2] == Rational(1));
    const double a2 = kAlpha * kAlpha;
    CHECK(std::abs(beta[1] * a2 - to_double(-poly[1])) < 1e-14 * 2.0);
    CHECK(std::abs(beta[2] * a2 * a2 - to_double(poly[2])) < 1e-14);
}

TEST_CASE("higher multiplicities follow the binomial pattern") {
    for (int k = 3; k <= kMaxHdOrder; ++k) {
        CAPTURE(k);
        const auto beta = solve_betas(hd_problem_for_anharmonicity(k, kAlpha, 6e-9));
        const auto poly = expand_roots(std::vector<Rational>(k, Rational(1)));
        for (int n = 1; n <= k; ++n) {
            const double expected = to_double((n % 2 ? -1 : 1) * poly[n]);
            CHECK(beta[n] * std::pow(kAlpha * kAlpha, n) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(solve_betas(hd_problem_for_anharmonicity(kMaxHdOrder + 1, kAlpha, 6e-9)), ConfigError);
}

TEST_CASE("two distinct zeros") {
    HdProblem p;
    p.duration = 6e-9;
    p.suppressed_freqs = {212e6, 380e6};
    const auto beta = solve_betas(p);
    for (double f : p.suppressed_freqs) CHECK(std::abs(hd_polynomial(beta, f)) < 1e-10);
    // Vieta: 1 - b2 w^2 + b4 w^4 with roots w1^2, w2^2.
    const double w1 = std::pow(kTwoPi * 212e6, 2), w2 = std::pow(kTwoPi * 380e6, 2);
    CHECK(beta[1] == doctest::Approx(1.0 / w1 + 1.0 / w2).epsilon(1e-12));
    CHECK(beta[2] == doctest::Approx(1.0 / (w1 * w2)).epsilon(1e-12));
}

TEST_CASE("basis coefficients") {
    const auto d0 = solve_basis_coeffs(0);
    REQUIRE(d0.size() == 1);
    CHECK(d0[0] == doctest::Approx(1.0));
    const auto d1 = solve_basis_coeffs(1);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(d1[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("property: endpoint smoothness through order 2K+1") {
    for (int k = 1; k <= kMaxHdOrder; ++k) {
        CAPTURE(k);
        EnvelopeSpec spec;
        spec.shape = HdSeriesShape{solve_basis_coeffs(k), {1.0}};
        spec.duration = 6e-9;
        for (int order = 0; order <= 2 * k + 1; ++order) {
            CAPTURE(order);
            // Scale each derivative by its natural size (2 pi (K+1) / t_p)^order.
            const double scale = std::pow(kTwoPi * (k + 1) / spec.duration, order);
            CHECK(std::abs(eval_envelope_derivative(spec, 0.0, order)) < 1e-9 * scale);
            CHECK(std::abs(eval_envelope_derivative(spec, spec.duration, order)) < 1e-9 * scale);
        }
        // The next even order does not vanish.
        CHECK(std::abs(eval_envelope_derivative(spec, 0.0, 2 * k + 2)) >
              1e-3 * std::pow(kTwoPi / spec.duration, 2 * k + 2));
    }
}

TEST_CASE("double zero of the IQ spectrum") {
    const HdSolution sol = solve_hd(hd_problem_for_anharmonicity(1, kAlpha, 6e-9));
    EnvelopeSpec spec = hd_envelope_spec(sol, 1.0, 6e-9);
    const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
    double peak = 0.0;
    for (double f : linear_grid(-1e9, 1e9, 2001)) peak = std::max(peak, std::abs(analytic_iq_spectrum(spec, drag, f)));
    CHECK(std::abs(analytic_iq_spectrum(spec, drag, ordinary(kAlpha))) < 1e-12 * peak);
}

TEST_CASE("property: IQ spectrum factorizes as A P(f) D(f) g(f)") {
    const HdSolution sol = solve_hd(hd_problem_for_anharmonicity(2, kAlpha, 6e-9));
    const EnvelopeSpec spec = hd_envelope_spec(sol, 1.0, 6e-9);
    const DragConfig drag{1.0, kAlpha, DragVariant::DragL};
    const auto freqs = linear_grid(-1.2e9, 1.2e9, 512);
    std::vector<cd> numeric, product;
    double peak = 0.0;
    for (double f : freqs) {
        numeric.push_back(iq_transform_quadrature(spec, drag, f, 8000));
        cd g = 0.0;
        for (std::size_t k = 0; k < sol.d_coeffs.size(); ++k) g += sol.d_coeffs[k] * basis_ft(static_cast<int>(k + 1), spec.duration, f);
        const double d = 1.0 - kTwoPi * drag.beta * f / drag.alpha;
        product.push_back(spec.amplitude * hd_polynomial(sol.beta_even, f) * d * g);
        peak = std::max(peak, std::abs(product.back()));
    }
    for (std::size_t k = 0; k < freqs.size(); ++k) CHECK(std::abs(numeric[k] - product[k]) < 1e-9 * peak);
}

TEST_CASE("K=1 coincides with a two-term FAST pulse on a vanishing band") {
    const double tp = 6e-9;
    const double f1 = std::abs(kAlpha) / kTwoPi;
    SuppressionProblem p;
    p.n_terms = 2;
    p.duration = tp;
    p.intervals = {{f1 - 500.0, f1 + 500.0, 1.0}};
    const FastSolution fast = solve_fast(p);
    // g + beta_2 g'' as a cosine series: c_k = d_k (1 - beta_2 (2 pi k / t_p)^2).
    const HdSolution hd = solve_hd(hd_problem_for_anharmonicity(1, kAlpha, tp));
    const double b2 = hd.beta_even[1];
    const double c1 = hd.d_coeffs[0] * (1.0 - b2 * std::pow(kTwoPi / tp, 2));
    const double c2 = hd.d_coeffs[1] * (1.0 - b2 * std::pow(2.0 * kTwoPi / tp, 2));
    CHECK(fast.coeffs[1] / fast.coeffs[0] == doctest::Approx(c2 / c1).epsilon(1e-3));
}

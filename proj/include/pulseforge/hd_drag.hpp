#pragma once

#include <vector>

#include "pulseforge/envelopes.hpp"

namespace pulseforge {

inline constexpr int kMaxHdOrder = 4;

/// Baseband frequencies (Hz) where the in-phase spectrum must vanish. A frequency
/// listed m times becomes an m-fold zero. K is the total count.
struct HdProblem {
    std::vector<double> suppressed_freqs;
    double duration = 0.0;

    int order() const { return static_cast<int>(suppressed_freqs.size()); }
    void validate() const;
};

struct HdSolution {
    std::vector<double> beta_even;  // beta_0 = 1, beta_2, ..., beta_2K in s^(2n)
    std::vector<double> d_coeffs;   // d_1 ... d_{K+1}
};

/// K-fold zero at |alpha| / 2 pi (alpha in rad/s).
HdProblem hd_problem_for_anharmonicity(int k, double alpha, double duration);

/// Solves Sum_n beta_2n (-1)^n (2 pi f_j)^(2n) = 0 for every listed frequency, using
/// derivative conditions for repeated frequencies.
std::vector<double> solve_betas(const HdProblem& problem);

/// d_k with Sum d_k = 1 and Sum d_k k^(2n) = 0 for n = 1..K, so g vanishes at the
/// endpoints together with its derivatives through order 2K + 1.
std::vector<double> solve_basis_coeffs(int k);

HdSolution solve_hd(const HdProblem& problem);

/// P(f) = Sum_n beta_2n (-1)^n (2 pi f)^(2n).
double hd_polynomial(const std::vector<double>& beta_even, double f);

/// HdSeries envelope with amplitude A; rotation_angle is set to the resulting area.
EnvelopeSpec hd_envelope_spec(const HdSolution& solution, double amplitude, double duration);

}  // namespace pulseforge

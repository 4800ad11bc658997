#pragma once

#include <numbers>

namespace pulseforge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNano = 1e-9;
inline constexpr double kMicro = 1e-6;
inline constexpr double kMHz = 1e6;
inline constexpr double kGHz = 1e9;

/// Angular frequency (rad/s) from an ordinary frequency in Hz.
constexpr double angular(double hz) { return kTwoPi * hz; }

/// Ordinary frequency (Hz) from an angular frequency in rad/s.
constexpr double ordinary(double rad_per_s) { return rad_per_s / kTwoPi; }

}  // namespace pulseforge

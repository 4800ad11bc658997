#pragma once

#include <stdexcept>
#include <string>

namespace pulseforge {

/// Invalid user-supplied configuration (bad spec, malformed JSON, out-of-range parameter).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed: singular system, non-finite values, invariant drift.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulated calibration experiment produced no usable signal.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pulseforge

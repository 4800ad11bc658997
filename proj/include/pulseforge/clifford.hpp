#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/simulator.hpp"

namespace pulseforge {

enum class NativeGate { I, X90, Xm90, Y90, Ym90 };

const char* to_string(NativeGate g);

/// The 24 single-qubit Cliffords over {I, X90, X-90, Y90, Y-90}. Entry 0 is the identity,
/// realised as one idle gate. Sequences are in time order.
class CliffordTable {
public:
    static const CliffordTable& instance();

    static constexpr int kSize = 24;

    const std::vector<NativeGate>& sequence(int index) const;
    /// Product of the sequence's ideal rotations (first gate applied first).
    const Eigen::Matrix2cd& unitary(int index) const { return unitaries_.at(index); }
    double avg_gate_count() const { return avg_gate_count_; }

    /// Index of the Clifford equal to unitary(b) * unitary(a), i.e. a followed by b.
    int compose(int a, int b) const { return product_[a][b]; }
    int inverse(int index) const { return inverse_[index]; }
    /// Index of the element equal to `u` up to global phase, or -1.
    int find(const Eigen::Matrix2cd& u) const;

private:
    CliffordTable();

    std::array<std::vector<NativeGate>, kSize> sequences_;
    std::array<Eigen::Matrix2cd, kSize> unitaries_;
    std::array<std::array<int, kSize>, kSize> product_{};
    std::array<int, kSize> inverse_{};
    double avg_gate_count_ = 0.0;
};

/// Ideal 2x2 unitary of a native gate.
Eigen::Matrix2cd native_unitary(NativeGate g);

/// Gate operations for one Clifford. `idle_duration` is used for the identity. With
/// `y_as_virtual_z`, R_Y(+-pi/2) becomes Z(-pi/2) R_X(+-pi/2) Z(pi/2) in frame updates.
std::vector<GateOp> decompose_clifford(int index, double idle_duration, bool y_as_virtual_z = false);

/// True when `u` equals `v` up to a global phase within `tol` (Frobenius norm).
bool equal_up_to_phase(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v, double tol = 1e-10);

}  // namespace pulseforge

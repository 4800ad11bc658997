#include "pulseforge/clifford.hpp"

#include <cmath>
#include <complex>

#include "pulseforge/errors.hpp"
#include "pulseforge/units.hpp"

namespace pulseforge {

const char* to_string(NativeGate g) {
    switch (g) {
        case NativeGate::I: return "I";
        case NativeGate::X90: return "X90";
        case NativeGate::Xm90: return "X-90";
        case NativeGate::Y90: return "Y90";
        case NativeGate::Ym90: return "Y-90";
    }
    return "?";
}

Eigen::Matrix2cd native_unitary(NativeGate g) {
    switch (g) {
        case NativeGate::I: return Eigen::Matrix2cd::Identity();
        case NativeGate::X90: return ideal_pulse_unitary(0.0);
        case NativeGate::Xm90: return ideal_pulse_unitary(kPi);
        case NativeGate::Y90: return ideal_pulse_unitary(-0.5 * kPi);
        case NativeGate::Ym90: return ideal_pulse_unitary(0.5 * kPi);
    }
    return Eigen::Matrix2cd::Identity();
}

bool equal_up_to_phase(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v, double tol) {
    const std::complex<double> overlap = (v.adjoint() * u).trace();
    if (std::abs(overlap) < 1e-12) return false;
    const std::complex<double> phase = overlap / std::abs(overlap);
    return (u - phase * v).norm() < tol;
}

CliffordTable::CliffordTable() {
    using G = NativeGate;
    const G X = G::X90, mX = G::Xm90, Y = G::Y90, mY = G::Ym90;
    sequences_ = {{
        // Paulis
        {G::I},
        {X, X},
        {Y, Y},
        {Y, Y, X, X},
        // 2pi/3 rotations
        {X, Y},
        {X, mY},
        {mX, Y},
        {mX, mY},
        {Y, X},
        {Y, mX},
        {mY, X},
        {mY, mX},
        // pi/2 rotations
        {X},
        {mX},
        {Y},
        {mY},
        {mX, Y, X},
        {mX, mY, X},
        // Hadamard-like
        {X, X, Y},
        {X, X, mY},
        {Y, Y, X},
        {Y, Y, mX},
        {X, Y, X},
        {mX, Y, mX},
    }};

    std::size_t total = 0;
    for (int k = 0; k < kSize; ++k) {
        Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
        for (G g : sequences_[k]) u = native_unitary(g) * u;
        unitaries_[k] = u;
        total += sequences_[k].size();
    }
    avg_gate_count_ = static_cast<double>(total) / kSize;

    for (int a = 0; a < kSize; ++a) {
        for (int b = 0; b < kSize; ++b) {
            const int c = find(unitaries_[b] * unitaries_[a]);
            if (c < 0) throw NumericError("Clifford table is not closed under composition");
            product_[a][b] = c;
        }
    }
    for (int a = 0; a < kSize; ++a) {
        inverse_[a] = find(unitaries_[a].adjoint());
        if (inverse_[a] < 0) throw NumericError("Clifford table lacks an inverse");
    }
}

const CliffordTable& CliffordTable::instance() {
    static const CliffordTable table;
    return table;
}

const std::vector<NativeGate>& CliffordTable::sequence(int index) const {
    if (index < 0 || index >= kSize) throw ConfigError("Clifford index must be in [0, 23]");
    return sequences_[index];
}

int CliffordTable::find(const Eigen::Matrix2cd& u) const {
    for (int k = 0; k < kSize; ++k) {
        if (equal_up_to_phase(u, unitaries_[k], 1e-9)) return k;
    }
    return -1;
}

std::vector<GateOp> decompose_clifford(int index, double idle_duration, bool y_as_virtual_z) {
    const auto& seq = CliffordTable::instance().sequence(index);
    std::vector<GateOp> ops;
    ops.reserve(seq.size() + 2);
    for (NativeGate g : seq) {
        switch (g) {
            case NativeGate::I: ops.push_back(GateOp::idle(idle_duration)); break;
            case NativeGate::X90: ops.push_back(GateOp::x90()); break;
            case NativeGate::Xm90: ops.push_back(GateOp::xm90()); break;
            case NativeGate::Y90:
            case NativeGate::Ym90: {
                const bool plus = g == NativeGate::Y90;
                if (y_as_virtual_z) {
                    ops.push_back(GateOp::vz(-0.5 * kPi));
                    ops.push_back(plus ? GateOp::x90() : GateOp::xm90());
                    ops.push_back(GateOp::vz(0.5 * kPi));
                } else {
                    ops.push_back(plus ? GateOp::y90() : GateOp::ym90());
                }
                break;
            }
        }
    }
    return ops;
}

}  // namespace pulseforge

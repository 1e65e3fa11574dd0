#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/errors.hpp"

namespace qlab {

using amp_t = std::complex<double>;

enum class GateKind { H, X, Y, Z, S, T, RX, RY, RZ, Phase, Swap };

inline bool is_parameterized(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
           kind == GateKind::Phase;
}

/// Lowercase names used by the circuit file format.
inline std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "h";
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::S: return "s";
        case GateKind::T: return "t";
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::Phase: return "phase";
        case GateKind::Swap: return "swap";
    }
    return "?";
}

inline std::optional<GateKind> gate_from_name(std::string_view name) {
    static constexpr GateKind kinds[] = {
        GateKind::H,  GateKind::X,  GateKind::Y,  GateKind::Z,
        GateKind::S,  GateKind::T,  GateKind::RX, GateKind::RY,
        GateKind::RZ, GateKind::Phase, GateKind::Swap};
    for (GateKind k : kinds) {
        if (gate_name(k) == name) return k;
    }
    return std::nullopt;
}

/// One primitive operation: a named unitary with target qubits, any number of
/// control qubits and an angle for the rotation/phase kinds.
struct Gate {
    GateKind kind;
    std::vector<int> targets;
    std::vector<int> controls;
    double angle = 0.0;
};

inline int target_count(GateKind kind) { return kind == GateKind::Swap ? 2 : 1; }

/// Structural checks that do not need a qubit count: arity, duplicates,
/// target/control disjointness, non-negative indices.
inline void validate_gate_shape(const Gate& gate) {
    const int want = target_count(gate.kind);
    if (static_cast<int>(gate.targets.size()) != want) {
        throw InputError("gate '" + std::string(gate_name(gate.kind)) + "' takes " +
                         std::to_string(want) + " target(s), got " +
                         std::to_string(gate.targets.size()));
    }
    std::set<int> seen;
    for (int q : gate.targets) {
        if (q < 0) throw InputError("negative qubit index");
        if (!seen.insert(q).second) throw InputError("duplicate qubit index in gate");
    }
    for (int q : gate.controls) {
        if (q < 0) throw InputError("negative qubit index");
        if (!seen.insert(q).second) {
            throw InputError("control qubit collides with another gate operand");
        }
    }
}

inline void validate_gate(const Gate& gate, int num_qubits) {
    validate_gate_shape(gate);
    auto check = [&](int q) {
        if (q >= num_qubits) {
            throw InputError("qubit index " + std::to_string(q) +
                             " out of range for " + std::to_string(num_qubits) +
                             "-qubit state");
        }
    };
    for (int q : gate.targets) check(q);
    for (int q : gate.controls) check(q);
}

/// Returns the gate with extra control qubits attached.
inline Gate controlled(Gate gate, const std::vector<int>& extra_controls) {
    for (int q : extra_controls) gate.controls.push_back(q);
    validate_gate_shape(gate);
    return gate;
}

/// 2x2 unitary in row-major order: m[row][column].
struct Matrix2 {
    amp_t m00, m01, m10, m11;
};

inline Matrix2 single_qubit_matrix(GateKind kind, double angle) {
    using namespace std::complex_literals;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    switch (kind) {
        case GateKind::H: return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
        case GateKind::X: return {0, 1, 1, 0};
        case GateKind::Y: return {0, -1i, 1i, 0};
        case GateKind::Z: return {1, 0, 0, -1};
        case GateKind::S: return {1, 0, 0, 1i};
        case GateKind::T: return {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::RX: {
            const double c = std::cos(angle / 2), s = std::sin(angle / 2);
            return {c, -1i * s, -1i * s, c};
        }
        case GateKind::RY: {
            const double c = std::cos(angle / 2), s = std::sin(angle / 2);
            return {c, -s, s, c};
        }
        case GateKind::RZ:
            return {std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2)};
        case GateKind::Phase: return {1, 0, 0, std::polar(1.0, angle)};
        case GateKind::Swap: break;
    }
    throw InputError("swap gate has no single-qubit matrix");
}

/// Inverse of a gate within the same gate set. S and T invert to Phase gates.
inline Gate inverse(Gate gate) {
    switch (gate.kind) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::Swap:
            return gate;
        case GateKind::S:
            gate.kind = GateKind::Phase;
            gate.angle = -std::numbers::pi / 2;
            return gate;
        case GateKind::T:
            gate.kind = GateKind::Phase;
            gate.angle = -std::numbers::pi / 4;
            return gate;
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::Phase:
            gate.angle = -gate.angle;
            return gate;
    }
    throw InputError("unknown gate kind");
}

// Factories. Angles are radians.
namespace gates {

inline Gate h(int q) { return {GateKind::H, {q}, {}, 0.0}; }
inline Gate x(int q) { return {GateKind::X, {q}, {}, 0.0}; }
inline Gate y(int q) { return {GateKind::Y, {q}, {}, 0.0}; }
inline Gate z(int q) { return {GateKind::Z, {q}, {}, 0.0}; }
inline Gate s(int q) { return {GateKind::S, {q}, {}, 0.0}; }
inline Gate t(int q) { return {GateKind::T, {q}, {}, 0.0}; }
inline Gate rx(int q, double angle) { return {GateKind::RX, {q}, {}, angle}; }
inline Gate ry(int q, double angle) { return {GateKind::RY, {q}, {}, angle}; }
inline Gate rz(int q, double angle) { return {GateKind::RZ, {q}, {}, angle}; }
inline Gate phase(int q, double angle) { return {GateKind::Phase, {q}, {}, angle}; }
inline Gate swap(int a, int b) { return {GateKind::Swap, {a, b}, {}, 0.0}; }
inline Gate cx(int control, int target) { return {GateKind::X, {target}, {control}, 0.0}; }
inline Gate cz(int control, int target) { return {GateKind::Z, {target}, {control}, 0.0}; }
inline Gate cphase(int control, int target, double angle) {
    return {GateKind::Phase, {target}, {control}, angle};
}

} // namespace gates

} // namespace qlab

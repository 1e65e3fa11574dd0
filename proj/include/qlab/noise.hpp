#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/rng.hpp"
#include "qlab/state.hpp"

namespace qlab {

enum class ChannelKind { BitFlip, PhaseFlip, Depolarizing, AmplitudeDamping };

inline std::string_view channel_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::BitFlip: return "bit_flip";
        case ChannelKind::PhaseFlip: return "phase_flip";
        case ChannelKind::Depolarizing: return "depolarizing";
        case ChannelKind::AmplitudeDamping: return "amplitude_damping";
    }
    return "?";
}

inline std::optional<ChannelKind> channel_from_name(std::string_view name) {
    for (ChannelKind k : {ChannelKind::BitFlip, ChannelKind::PhaseFlip,
                          ChannelKind::Depolarizing, ChannelKind::AmplitudeDamping}) {
        if (channel_name(k) == name) return k;
    }
    return std::nullopt;
}

/// One single-qubit channel: a flip/depolarizing probability or a damping
/// rate, always in [0, 1].
struct Channel {
    ChannelKind kind;
    double strength;
};

inline void validate_channel(const Channel& channel) {
    if (!(channel.strength >= 0.0 && channel.strength <= 1.0)) {
        throw InputError("channel strength must lie in [0, 1]");
    }
}

/// Channel insertion rule: applies after every gate whose kind passes the
/// gate filter, once per target qubit passing the qubit filter. Empty
/// optionals mean "all".
struct GateNoise {
    std::optional<GateKind> gate;
    std::optional<std::vector<int>> qubits;
    Channel channel;

    bool matches_gate(GateKind kind) const { return !gate || *gate == kind; }
    bool matches_qubit(int q) const {
        if (!qubits) return true;
        for (int candidate : *qubits) {
            if (candidate == q) return true;
        }
        return false;
    }
};

struct NoiseModel {
    std::vector<GateNoise> after_gate;
    double readout_flip = 0.0;

    bool empty() const { return after_gate.empty() && readout_flip == 0.0; }
};

inline void validate_noise_model(const NoiseModel& model) {
    for (const GateNoise& rule : model.after_gate) {
        validate_channel(rule.channel);
        if (rule.qubits) {
            for (int q : *rule.qubits) {
                if (q < 0) throw InputError("negative qubit index in noise rule");
            }
        }
    }
    if (!(model.readout_flip >= 0.0 && model.readout_flip <= 1.0)) {
        throw InputError("readout_flip must lie in [0, 1]");
    }
}

/// One stochastic unraveling step of a channel on a single qubit.
///
/// Pauli channels draw the applied operator with state-independent
/// probabilities; depolarizing draws uniformly from {I, X, Y, Z} with
/// probability `strength` and applies identity otherwise. Amplitude damping
/// draws the Kraus branch with the state-dependent probability <psi|K1'K1|psi>
/// and renormalizes. Every call consumes exactly one uniform draw.
inline SparseState trajectory_step(const SparseState& state, const Channel& channel,
                                   int qubit, Rng& rng) {
    validate_channel(channel);
    if (qubit < 0 || qubit >= state.num_qubits()) {
        throw InputError("noise qubit index out of range");
    }

    const double u = rng.uniform();
    const double p = channel.strength;

    switch (channel.kind) {
        case ChannelKind::BitFlip:
            return u < p ? apply_gate(state, gates::x(qubit)) : state;
        case ChannelKind::PhaseFlip:
            return u < p ? apply_gate(state, gates::z(qubit)) : state;
        case ChannelKind::Depolarizing: {
            if (u >= p) return state;
            // u conditioned on u < p is uniform on [0, p); reuse it to pick
            // one of I, X, Y, Z.
            const int which = std::min(3, static_cast<int>(u / p * 4.0));
            switch (which) {
                case 0: return state;
                case 1: return apply_gate(state, gates::x(qubit));
                case 2: return apply_gate(state, gates::y(qubit));
                default: return apply_gate(state, gates::z(qubit));
            }
        }
        case ChannelKind::AmplitudeDamping: {
            const basis_t mask = qubit_bit(qubit);
            double excited = 0.0;
            for (const auto& [index, amp] : state.amplitudes()) {
                if (index & mask) excited += std::norm(amp);
            }
            const double p_decay = p * excited;
            SparseState::map_type next;
            if (u < p_decay || 1.0 - p_decay <= 0.0) {
                // K1 = sqrt(gamma) |0><1|
                const double scale = std::sqrt(p) / std::sqrt(p_decay);
                for (const auto& [index, amp] : state.amplitudes()) {
                    if (index & mask) next.emplace(index & ~mask, amp * scale);
                }
            } else {
                // K0 = diag(1, sqrt(1 - gamma))
                const double survive = std::sqrt(1.0 - p);
                const double scale = 1.0 / std::sqrt(1.0 - p_decay);
                for (const auto& [index, amp] : state.amplitudes()) {
                    next.emplace(index, (index & mask) ? amp * survive * scale
                                                       : amp * scale);
                }
            }
            return SparseState::from_amplitudes(state.num_qubits(), std::move(next));
        }
    }
    throw InputError("unknown channel kind");
}

/// First-order retention estimate for a depolarizing run: the probability
/// that no error fires across `gate_count` insertions, (1 - p)^gate_count.
inline double depolarizing_fidelity_estimate(double p, std::uint64_t gate_count) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability must lie in [0, 1]");
    return std::pow(1.0 - p, static_cast<double>(gate_count));
}

} // namespace qlab

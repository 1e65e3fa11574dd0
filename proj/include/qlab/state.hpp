#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/rng.hpp"

namespace qlab {

using basis_t = std::uint64_t;

/// Amplitudes below this magnitude are dropped after every gate so that exact
/// interference cancellations do not leave numeric dust in the map.
inline constexpr double kPruneThreshold = 1e-12;

/// Largest register that to_dense / from_dense will materialize.
inline constexpr int kMaxDenseQubits = 20;

/// Largest register representable with 64-bit basis keys.
inline constexpr int kMaxQubits = 64;

inline basis_t qubit_bit(int q) { return basis_t{1} << q; }

inline basis_t basis_mask(int num_qubits) {
    return num_qubits >= 64 ? ~basis_t{0} : (basis_t{1} << num_qubits) - 1;
}

/// Renders a basis index as a label, qubit 0 rightmost: index 5 over 4 qubits
/// is "0101".
inline std::string index_to_label(basis_t index, int num_qubits) {
    std::string label(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if (index & qubit_bit(q)) label[num_qubits - 1 - q] = '1';
    }
    return label;
}

inline basis_t label_to_index(std::string_view label) {
    if (label.empty() || label.size() > 64) {
        throw InputError("basis label must have 1..64 characters");
    }
    basis_t index = 0;
    for (char c : label) {
        if (c != '0' && c != '1') {
            throw InputError("basis label may contain only '0' and '1'");
        }
        index = (index << 1) | static_cast<basis_t>(c == '1');
    }
    return index;
}

namespace detail {

/// Packs the bits of `basis` found at the (ascending) qubit positions into a
/// compact value whose bit i corresponds to qubits[i].
inline basis_t gather_bits(basis_t basis, const std::vector<int>& qubits_ascending) {
    basis_t packed = 0;
    for (std::size_t i = 0; i < qubits_ascending.size(); ++i) {
        if (basis & qubit_bit(qubits_ascending[i])) packed |= basis_t{1} << i;
    }
    return packed;
}

/// Inverse of gather_bits: writes the compact bits back into `into`.
inline basis_t scatter_bits(basis_t packed, const std::vector<int>& qubits_ascending,
                            basis_t into) {
    for (std::size_t i = 0; i < qubits_ascending.size(); ++i) {
        const basis_t bit = qubit_bit(qubits_ascending[i]);
        if (packed & (basis_t{1} << i)) {
            into |= bit;
        } else {
            into &= ~bit;
        }
    }
    return into;
}

inline std::vector<int> sorted_unique_qubits(const std::vector<int>& qubits,
                                             int num_qubits) {
    std::vector<int> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputError("duplicate qubit index");
    }
    for (int q : sorted) {
        if (q < 0 || q >= num_qubits) {
            throw InputError("qubit index " + std::to_string(q) +
                             " out of range for " + std::to_string(num_qubits) +
                             "-qubit state");
        }
    }
    return sorted;
}

} // namespace detail

/// Sparse n-qubit state: an associative map from basis indices to complex
/// amplitudes. Basis keys follow the little-endian convention throughout the
/// library: qubit 0 is the lowest bit of the key and the rightmost character
/// of a label. Operations return new states; values are safe to share.
class SparseState {
public:
    using map_type = std::unordered_map<basis_t, amp_t>;

    /// |0...0> on `num_qubits` qubits.
    explicit SparseState(int num_qubits) : num_qubits_(checked_width(num_qubits)) {
        amps_.emplace(0, amp_t{1.0, 0.0});
    }

    static SparseState basis(int num_qubits, basis_t index) {
        SparseState state(num_qubits);
        if (index > basis_mask(num_qubits)) {
            throw InputError("basis index out of range");
        }
        state.amps_.clear();
        state.amps_.emplace(index, amp_t{1.0, 0.0});
        return state;
    }

    static SparseState basis(int num_qubits, std::string_view label) {
        if (static_cast<int>(label.size()) != num_qubits) {
            throw InputError("label '" + std::string(label) + "' has " +
                             std::to_string(label.size()) + " bits, expected " +
                             std::to_string(num_qubits));
        }
        return basis(num_qubits, label_to_index(label));
    }

    /// Builds a state from an explicit amplitude map. Entries below the prune
    /// threshold are dropped; no normalization is applied.
    static SparseState from_amplitudes(int num_qubits, map_type amplitudes) {
        SparseState state(num_qubits);
        state.amps_.clear();
        const basis_t mask = basis_mask(num_qubits);
        for (auto& [index, amp] : amplitudes) {
            if (index > mask) throw InputError("basis index out of range");
            if (std::abs(amp) >= kPruneThreshold) state.amps_.emplace(index, amp);
        }
        return state;
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t size() const { return amps_.size(); }
    const map_type& amplitudes() const { return amps_; }

    amp_t amplitude(basis_t index) const {
        auto it = amps_.find(index);
        return it == amps_.end() ? amp_t{0.0, 0.0} : it->second;
    }

    amp_t amplitude(std::string_view label) const {
        if (static_cast<int>(label.size()) != num_qubits_) {
            throw InputError("label width does not match state");
        }
        return amplitude(label_to_index(label));
    }

    double norm() const {
        double sum = 0.0;
        for (const auto& [index, amp] : amps_) sum += std::norm(amp);
        return std::sqrt(sum);
    }

private:
    static int checked_width(int num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw InputError("qubit count must be in [1, 64]");
        }
        return num_qubits;
    }

    friend SparseState apply_gate(const SparseState&, const Gate&);
    friend SparseState tensor(const SparseState&, const SparseState&);

    int num_qubits_;
    map_type amps_;
};

/// Computational basis state from a label, e.g. basis_state(2, "10").
inline SparseState basis_state(int num_qubits, std::string_view label) {
    return SparseState::basis(num_qubits, label);
}

inline bool is_diagonal(GateKind kind) {
    return kind == GateKind::Z || kind == GateKind::S || kind == GateKind::T ||
           kind == GateKind::RZ || kind == GateKind::Phase;
}

/// Applies one gate to the state and prunes sub-threshold amplitudes.
inline SparseState apply_gate(const SparseState& state, const Gate& gate) {
    validate_gate(gate, state.num_qubits());

    basis_t control_mask = 0;
    for (int c : gate.controls) control_mask |= qubit_bit(c);

    if (is_diagonal(gate.kind)) {
        // Diagonal kinds only scale amplitudes by unit phases: keys and
        // magnitudes are unchanged, so the map is updated in place and no
        // pruning pass is needed.
        const Matrix2 m = single_qubit_matrix(gate.kind, gate.angle);
        const basis_t tmask = qubit_bit(gate.targets[0]);
        SparseState::map_type scaled = state.amplitudes();
        for (auto& [b, amp] : scaled) {
            if ((b & control_mask) == control_mask) {
                amp *= (b & tmask) ? m.m11 : m.m00;
            }
        }
        SparseState result(state.num_qubits());
        result.amps_ = std::move(scaled);
        return result;
    }

    SparseState::map_type next;
    next.reserve(state.amplitudes().size() * 2);

    if (gate.kind == GateKind::Swap) {
        const basis_t m0 = qubit_bit(gate.targets[0]);
        const basis_t m1 = qubit_bit(gate.targets[1]);
        for (const auto& [b, amp] : state.amplitudes()) {
            basis_t nb = b;
            if ((b & control_mask) == control_mask) {
                const bool bit0 = (b & m0) != 0;
                const bool bit1 = (b & m1) != 0;
                if (bit0 != bit1) nb = b ^ (m0 | m1);
            }
            next[nb] += amp;
        }
    } else {
        const Matrix2 m = single_qubit_matrix(gate.kind, gate.angle);
        const basis_t tmask = qubit_bit(gate.targets[0]);
        const amp_t zero{0.0, 0.0};
        for (const auto& [b, amp] : state.amplitudes()) {
            if ((b & control_mask) != control_mask) {
                next[b] += amp;
                continue;
            }
            // Column of the 2x2 matrix selected by the current target bit.
            const bool one = (b & tmask) != 0;
            const amp_t to0 = one ? m.m01 : m.m00;
            const amp_t to1 = one ? m.m11 : m.m10;
            if (to0 != zero) next[b & ~tmask] += to0 * amp;
            if (to1 != zero) next[b | tmask] += to1 * amp;
        }
    }

    std::erase_if(next, [](const auto& entry) {
        return std::abs(entry.second) < kPruneThreshold;
    });

    SparseState result(state.num_qubits());
    result.amps_ = std::move(next);
    return result;
}

/// Outcome probabilities keyed by label, |amplitude|^2 each.
inline std::map<std::string, double> probabilities(const SparseState& state) {
    std::map<std::string, double> probs;
    for (const auto& [index, amp] : state.amplitudes()) {
        probs[index_to_label(index, state.num_qubits())] = std::norm(amp);
    }
    return probs;
}

/// <a|b> over the union of stored labels.
inline amp_t inner_product(const SparseState& a, const SparseState& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw InputError("inner product requires equal qubit counts");
    }
    const bool a_smaller = a.size() <= b.size();
    const SparseState& lhs = a_smaller ? a : b;
    const SparseState& rhs = a_smaller ? b : a;
    amp_t sum{0.0, 0.0};
    for (const auto& [index, amp] : lhs.amplitudes()) {
        const amp_t other = rhs.amplitude(index);
        sum += a_smaller ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return sum;
}

/// Composite register a (x) b; b's qubits become the low indices and the
/// labels concatenate as label(a) + label(b).
inline SparseState tensor(const SparseState& a, const SparseState& b) {
    if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
        throw CapacityError("tensor product exceeds 64 qubits");
    }
    SparseState result(a.num_qubits() + b.num_qubits());
    result.amps_.clear();
    result.amps_.reserve(a.size() * b.size());
    for (const auto& [ia, va] : a.amplitudes()) {
        for (const auto& [ib, vb] : b.amplitudes()) {
            const amp_t amp = va * vb;
            if (std::abs(amp) >= kPruneThreshold) {
                result.amps_.emplace((ia << b.num_qubits()) | ib, amp);
            }
        }
    }
    return result;
}

namespace detail {

/// Probability of each packed value of the given qubits, summed over the
/// remaining qubits. std::map keeps the walk order deterministic.
inline std::map<basis_t, double> marginal_probabilities(
    const SparseState& state, const std::vector<int>& qubits_ascending) {
    std::map<basis_t, double> marginal;
    for (const auto& [index, amp] : state.amplitudes()) {
        marginal[gather_bits(index, qubits_ascending)] += std::norm(amp);
    }
    return marginal;
}

/// Draws one key from an unnormalized distribution with a single uniform.
inline basis_t pick_outcome(const std::map<basis_t, double>& distribution,
                            double uniform01) {
    if (distribution.empty()) {
        throw InputError("cannot sample from a state with no amplitudes");
    }
    double total = 0.0;
    for (const auto& [key, p] : distribution) total += p;
    const double u = uniform01 * total;
    double cumulative = 0.0;
    basis_t picked = distribution.begin()->first;
    for (const auto& [key, p] : distribution) {
        cumulative += p;
        picked = key;
        if (u < cumulative) break;
    }
    return picked;
}

} // namespace detail

/// Outcome probabilities of a qubit subset, marginalized over the rest.
/// Keys are labels over the subset, lowest qubit index rightmost.
inline std::map<std::string, double> marginal_probabilities(
    const SparseState& state, const std::vector<int>& qubits) {
    const auto qs = detail::sorted_unique_qubits(qubits, state.num_qubits());
    std::map<std::string, double> out;
    for (const auto& [value, p] : detail::marginal_probabilities(state, qs)) {
        out[index_to_label(value, static_cast<int>(qs.size()))] = p;
    }
    return out;
}

/// Result of measuring a subset of qubits: the observed bits (rightmost
/// character = lowest measured qubit index) and the collapsed state.
struct Outcome {
    std::string bits;
    SparseState post_state;
};

/// Born-rule measurement of a qubit subset. Consumes one uniform draw.
inline Outcome measure_collapse(const SparseState& state,
                                const std::vector<int>& qubits, Rng& rng) {
    if (qubits.empty()) throw InputError("measurement requires at least one qubit");
    const auto qs = detail::sorted_unique_qubits(qubits, state.num_qubits());

    const auto marginal = detail::marginal_probabilities(state, qs);
    const basis_t outcome = detail::pick_outcome(marginal, rng.uniform());
    const double prob = marginal.at(outcome);

    SparseState::map_type kept;
    const double scale = 1.0 / std::sqrt(prob);
    for (const auto& [index, amp] : state.amplitudes()) {
        if (detail::gather_bits(index, qs) == outcome) {
            kept.emplace(index, amp * scale);
        }
    }
    return Outcome{index_to_label(outcome, static_cast<int>(qs.size())),
                   SparseState::from_amplitudes(state.num_qubits(), std::move(kept))};
}

/// Repeated full-register measurement without collapse carry-over; counts are
/// keyed by label and sum to `shots`. Consumes one uniform per shot.
inline std::map<std::string, std::uint64_t> sample_counts(const SparseState& state,
                                                          std::uint64_t shots,
                                                          Rng& rng) {
    if (shots == 0) throw InputError("shots must be >= 1");

    std::map<basis_t, double> distribution;
    for (const auto& [index, amp] : state.amplitudes()) {
        distribution[index] += std::norm(amp);
    }

    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        const basis_t outcome = detail::pick_outcome(distribution, rng.uniform());
        ++counts[index_to_label(outcome, state.num_qubits())];
    }
    return counts;
}

/// Dense column vector indexed by basis value; guarded at 20 qubits.
inline std::vector<amp_t> to_dense(const SparseState& state) {
    if (state.num_qubits() > kMaxDenseQubits) {
        throw CapacityError("dense conversion limited to " +
                            std::to_string(kMaxDenseQubits) + " qubits");
    }
    std::vector<amp_t> dense(std::size_t{1} << state.num_qubits(), amp_t{0.0, 0.0});
    for (const auto& [index, amp] : state.amplitudes()) dense[index] = amp;
    return dense;
}

inline SparseState from_dense(int num_qubits, const std::vector<amp_t>& dense) {
    if (num_qubits > kMaxDenseQubits) {
        throw CapacityError("dense conversion limited to " +
                            std::to_string(kMaxDenseQubits) + " qubits");
    }
    if (dense.size() != (std::size_t{1} << num_qubits)) {
        throw InputError("dense vector length must be 2^num_qubits");
    }
    SparseState::map_type amps;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        amps.emplace(static_cast<basis_t>(i), dense[i]);
    }
    return SparseState::from_amplitudes(num_qubits, std::move(amps));
}

} // namespace qlab

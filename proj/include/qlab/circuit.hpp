#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlab/dense.hpp"
#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/noise.hpp"
#include "qlab/rng.hpp"
#include "qlab/state.hpp"

namespace qlab {

/// Widest register a permutation table may span (2^20 entries).
inline constexpr int kMaxPermutationQubits = 20;

struct GateOp {
    Gate gate;
};

struct MeasureOp {
    std::vector<int> qubits;
};

/// A named basis relabeling on a declared register, optionally with a unit
/// phase per register value: |x> -> phase[x] |table[x]>. Used for arithmetic
/// oracles (modular multiplication) and diagonal +-1 phase oracles. The table
/// is verified to be a bijection at construction, so applying the op is a
/// pure relabeling of map keys and preserves the norm exactly.
class PermutationOp {
public:
    PermutationOp(std::string name, std::vector<int> register_qubits,
                  std::vector<basis_t> table, std::vector<amp_t> phases = {})
        : name_(std::move(name)),
          qubits_(std::move(register_qubits)),
          table_(std::move(table)),
          phases_(std::move(phases)) {
        if (qubits_.empty() || qubits_.size() > kMaxPermutationQubits) {
            throw InputError("permutation register must span 1.." +
                             std::to_string(kMaxPermutationQubits) + " qubits");
        }
        std::vector<int> sorted = qubits_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InputError("permutation register has duplicate qubits");
        }
        const std::size_t domain = std::size_t{1} << qubits_.size();
        if (table_.size() != domain) {
            throw InputError("permutation table must have 2^k entries");
        }
        std::vector<bool> hit(domain, false);
        for (basis_t value : table_) {
            if (value >= domain || hit[value]) {
                throw InputError("permutation table is not a bijection");
            }
            hit[value] = true;
        }
        if (!phases_.empty()) {
            if (phases_.size() != domain) {
                throw InputError("phase table must have 2^k entries");
            }
            for (const amp_t& phase : phases_) {
                if (std::abs(std::abs(phase) - 1.0) > 1e-12) {
                    throw InputError("permutation phases must have unit magnitude");
                }
            }
        }
    }

    /// Identity relabeling with phases only.
    static PermutationOp diagonal(std::string name, std::vector<int> register_qubits,
                                  std::vector<amp_t> phases) {
        std::vector<basis_t> table(std::size_t{1} << register_qubits.size());
        for (std::size_t i = 0; i < table.size(); ++i) table[i] = i;
        return PermutationOp(std::move(name), std::move(register_qubits),
                             std::move(table), std::move(phases));
    }

    const std::string& name() const { return name_; }
    const std::vector<int>& qubits() const { return qubits_; }
    const std::vector<basis_t>& table() const { return table_; }
    const std::vector<amp_t>& phases() const { return phases_; }

    SparseState apply(const SparseState& state) const {
        for (int q : qubits_) {
            if (q < 0 || q >= state.num_qubits()) {
                throw InputError("permutation register out of range");
            }
        }
        SparseState::map_type next;
        next.reserve(state.amplitudes().size());
        for (const auto& [index, amp] : state.amplitudes()) {
            const basis_t value = detail_gather(index);
            const basis_t relabeled = detail_scatter(table_[value], index);
            next.emplace(relabeled, phases_.empty() ? amp : amp * phases_[value]);
        }
        return SparseState::from_amplitudes(state.num_qubits(), std::move(next));
    }

    PermutationOp inverse() const {
        std::vector<basis_t> inv_table(table_.size());
        for (std::size_t x = 0; x < table_.size(); ++x) inv_table[table_[x]] = x;
        std::vector<amp_t> inv_phases;
        if (!phases_.empty()) {
            inv_phases.resize(phases_.size());
            for (std::size_t x = 0; x < table_.size(); ++x) {
                inv_phases[table_[x]] = std::conj(phases_[x]);
            }
        }
        return PermutationOp(name_ + "_inv", qubits_, std::move(inv_table),
                             std::move(inv_phases));
    }

private:
    // Register bit i lives at circuit qubit qubits_[i] (not necessarily
    // ascending, unlike detail::gather_bits).
    basis_t detail_gather(basis_t index) const {
        basis_t value = 0;
        for (std::size_t i = 0; i < qubits_.size(); ++i) {
            if (index & qubit_bit(qubits_[i])) value |= basis_t{1} << i;
        }
        return value;
    }

    basis_t detail_scatter(basis_t value, basis_t into) const {
        for (std::size_t i = 0; i < qubits_.size(); ++i) {
            const basis_t bit = qubit_bit(qubits_[i]);
            if (value & (basis_t{1} << i)) {
                into |= bit;
            } else {
                into &= ~bit;
            }
        }
        return into;
    }

    std::string name_;
    std::vector<int> qubits_;
    std::vector<basis_t> table_;
    std::vector<amp_t> phases_;
};

using CircuitOp = std::variant<GateOp, MeasureOp, PermutationOp>;

/// Ordered gate/permutation/measurement program on a fixed register.
/// Measurement is terminal per qubit: once a qubit is measured no later op
/// may touch it, and it cannot be measured again.
class Circuit {
public:
    explicit Circuit(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw InputError("circuit qubit count must be in [1, 64]");
        }
        measured_.assign(static_cast<std::size_t>(num_qubits), false);
    }

    int num_qubits() const { return num_qubits_; }
    const std::vector<CircuitOp>& ops() const { return ops_; }

    bool has_measurement() const { return !measured_qubits_.empty(); }

    /// Union of all measured qubits, ascending.
    const std::vector<int>& measured_qubits() const { return measured_qubits_; }

    Circuit& append(CircuitOp op) {
        if (const auto* gate_op = std::get_if<GateOp>(&op)) {
            validate_gate(gate_op->gate, num_qubits_);
            require_unmeasured(gate_op->gate.targets);
            require_unmeasured(gate_op->gate.controls);
        } else if (const auto* measure_op = std::get_if<MeasureOp>(&op)) {
            if (measure_op->qubits.empty()) {
                throw InputError("measurement requires at least one qubit");
            }
            const auto qs =
                detail::sorted_unique_qubits(measure_op->qubits, num_qubits_);
            require_unmeasured(qs);
            for (int q : qs) measured_[static_cast<std::size_t>(q)] = true;
            measured_qubits_.clear();
            for (int q = 0; q < num_qubits_; ++q) {
                if (measured_[static_cast<std::size_t>(q)]) {
                    measured_qubits_.push_back(q);
                }
            }
        } else {
            const auto& perm = std::get<PermutationOp>(op);
            for (int q : perm.qubits()) {
                if (q < 0 || q >= num_qubits_) {
                    throw InputError("permutation register out of range");
                }
            }
            require_unmeasured(perm.qubits());
        }
        ops_.push_back(std::move(op));
        return *this;
    }

    Circuit& gate(Gate g) { return append(GateOp{std::move(g)}); }
    Circuit& measure(std::vector<int> qubits) {
        return append(MeasureOp{std::move(qubits)});
    }
    Circuit& permutation(PermutationOp op) { return append(std::move(op)); }

private:
    void require_unmeasured(const std::vector<int>& qubits) const {
        for (int q : qubits) {
            if (q >= 0 && q < num_qubits_ && measured_[static_cast<std::size_t>(q)]) {
                throw InputError("qubit " + std::to_string(q) +
                                 " already measured; measurement is terminal");
            }
        }
    }

    int num_qubits_;
    std::vector<CircuitOp> ops_;
    std::vector<bool> measured_;
    std::vector<int> measured_qubits_;
};

/// Copy of the circuit with all measurement ops removed.
inline Circuit without_measurements(const Circuit& circuit) {
    Circuit out(circuit.num_qubits());
    for (const CircuitOp& op : circuit.ops()) {
        if (!std::holds_alternative<MeasureOp>(op)) out.append(op);
    }
    return out;
}

/// Reversed circuit with every op inverted. Measurements are not invertible.
inline Circuit inverse(const Circuit& circuit) {
    if (circuit.has_measurement()) {
        throw ModeError("cannot invert a circuit with measurements");
    }
    Circuit out(circuit.num_qubits());
    for (auto it = circuit.ops().rbegin(); it != circuit.ops().rend(); ++it) {
        if (const auto* gate_op = std::get_if<GateOp>(&*it)) {
            out.gate(inverse(gate_op->gate));
        } else {
            out.permutation(std::get<PermutationOp>(*it).inverse());
        }
    }
    return out;
}

namespace detail {

/// Applies gate and permutation ops in order, skipping measurements. When a
/// noise model is given, inserts one trajectory step per matching rule and
/// matching target qubit after each gate.
inline SparseState evolve(const Circuit& circuit, const NoiseModel* noise,
                          Rng* rng) {
    SparseState state(circuit.num_qubits());
    for (const CircuitOp& op : circuit.ops()) {
        if (const auto* gate_op = std::get_if<GateOp>(&op)) {
            state = apply_gate(state, gate_op->gate);
            if (noise) {
                for (const GateNoise& rule : noise->after_gate) {
                    if (!rule.matches_gate(gate_op->gate.kind)) continue;
                    for (int target : gate_op->gate.targets) {
                        if (rule.matches_qubit(target)) {
                            state = trajectory_step(state, rule.channel, target, *rng);
                        }
                    }
                }
            }
        } else if (const auto* perm = std::get_if<PermutationOp>(&op)) {
            state = perm->apply(state);
        }
    }
    return state;
}

} // namespace detail

/// Exact statevector of a measurement-free circuit: |0...0> through all ops.
inline SparseState run_state(const Circuit& circuit) {
    if (circuit.has_measurement()) {
        throw ModeError("run_state requires a circuit without measurements");
    }
    return detail::evolve(circuit, nullptr, nullptr);
}

/// Shot counts over the measured bits. `shots` keys are labels over the
/// measured qubits only, ordered by qubit index with the lowest index
/// rightmost.
struct Counts {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
};

/// Samples the circuit shot by shot. Each shot evolves its own trajectory
/// (noise inserted after matching gates), measures the union of measured
/// qubits, then flips each readout bit independently with the model's
/// readout probability. Shot i draws from a generator seeded with
/// derive_seed(seed, i), so the merged counts do not depend on evaluation
/// order. Noiseless circuits evolve once and only the sampling varies.
inline Counts run_shots(const Circuit& circuit, std::uint64_t shots,
                        std::uint64_t seed, const NoiseModel* noise = nullptr) {
    if (!circuit.has_measurement()) {
        throw ModeError("run_shots requires at least one measurement");
    }
    if (shots == 0) throw InputError("shots must be >= 1");
    if (noise) validate_noise_model(*noise);

    const std::vector<int>& measured = circuit.measured_qubits();
    const int width = static_cast<int>(measured.size());
    const bool noiseless = noise == nullptr || noise->empty();
    const double flip = noise ? noise->readout_flip : 0.0;

    Counts result;
    result.shots = shots;

    std::map<basis_t, double> fixed_distribution;
    if (noiseless) {
        const SparseState final_state = detail::evolve(circuit, nullptr, nullptr);
        fixed_distribution = detail::marginal_probabilities(final_state, measured);
    }

    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        Rng rng(derive_seed(seed, shot));
        basis_t outcome;
        if (noiseless) {
            outcome = detail::pick_outcome(fixed_distribution, rng.uniform());
        } else {
            const SparseState state = detail::evolve(circuit, noise, &rng);
            const auto marginal = detail::marginal_probabilities(state, measured);
            outcome = detail::pick_outcome(marginal, rng.uniform());
            if (flip > 0.0) {
                for (int bit = 0; bit < width; ++bit) {
                    if (rng.uniform() < flip) outcome ^= basis_t{1} << bit;
                }
            }
        }
        ++result.counts[index_to_label(outcome, width)];
    }
    return result;
}

/// Ordered product of all op unitaries; rejects measured circuits and
/// registers above the dense limit.
inline DenseMatrix circuit_unitary(const Circuit& circuit) {
    if (circuit.has_measurement()) {
        throw ModeError("circuit_unitary requires a circuit without measurements");
    }
    if (circuit.num_qubits() > kMaxUnitaryQubits) {
        throw CapacityError("dense unitary limited to " +
                            std::to_string(kMaxUnitaryQubits) + " qubits");
    }
    const std::size_t dim = std::size_t{1} << circuit.num_qubits();
    DenseMatrix u = DenseMatrix::identity(dim);
    for (const CircuitOp& op : circuit.ops()) {
        if (const auto* gate_op = std::get_if<GateOp>(&op)) {
            u = gate_unitary(gate_op->gate, circuit.num_qubits()) * u;
        } else {
            const auto& perm = std::get<PermutationOp>(op);
            DenseMatrix pu(dim);
            for (basis_t col = 0; col < dim; ++col) {
                const SparseState moved =
                    perm.apply(SparseState::basis(circuit.num_qubits(), col));
                for (const auto& [row, amp] : moved.amplitudes()) {
                    pu.at(row, col) = amp;
                }
            }
            u = pu * u;
        }
    }
    return u;
}

} // namespace qlab

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlab/circuit.hpp"
#include "qlab/errors.hpp"
#include "qlab/numtheory.hpp"
#include "qlab/rng.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Bell states

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// 2-qubit circuit preparing the selected Bell state (up to global phase):
/// basis flips on |00>, then H on the control and CNOT onto the target.
inline Circuit bell_circuit(BellState which) {
    Circuit circuit(2);
    if (which == BellState::PhiMinus || which == BellState::PsiMinus) {
        circuit.gate(gates::x(0));
    }
    if (which == BellState::PsiPlus || which == BellState::PsiMinus) {
        circuit.gate(gates::x(1));
    }
    circuit.gate(gates::h(0));
    circuit.gate(gates::cx(0, 1));
    return circuit;
}

// ---------------------------------------------------------------------------
// Phase kickback

/// Control qubit 0 in superposition, target qubit 1 prepared in |1>, then a
/// controlled phase. The target is an eigenstate, so the phase lands on the
/// control: (|0> + e^{i theta} |1>)/sqrt(2).
inline Circuit phase_kickback_circuit(double theta) {
    Circuit circuit(2);
    circuit.gate(gates::x(1));
    circuit.gate(gates::h(0));
    circuit.gate(gates::cphase(0, 1, theta));
    return circuit;
}

// ---------------------------------------------------------------------------
// Deutsch-Jozsa

/// Boolean oracle for Deutsch-Jozsa: a full truth table over n input bits,
/// required to be constant or exactly balanced.
struct DjOracle {
    int num_input_qubits;
    std::vector<std::uint8_t> truth_table;  // size 2^n, entries 0/1
};

inline void validate_dj_oracle(const DjOracle& oracle) {
    const int n = oracle.num_input_qubits;
    if (n < 1 || n > kMaxPermutationQubits - 1) {
        throw InputError("oracle input size out of range");
    }
    const std::size_t domain = std::size_t{1} << n;
    if (oracle.truth_table.size() != domain) {
        throw InputError("truth table must have 2^n entries");
    }
    std::size_t ones = 0;
    for (std::uint8_t v : oracle.truth_table) {
        if (v > 1) throw InputError("truth table entries must be 0 or 1");
        ones += v;
    }
    if (ones != 0 && ones != domain && ones != domain / 2) {
        throw InputError("oracle must be constant or balanced");
    }
}

/// |x>|y> -> |x>|y xor f(x)> on input register 0..n-1 plus ancilla n.
inline PermutationOp dj_oracle_op(const DjOracle& oracle) {
    const int n = oracle.num_input_qubits;
    const std::size_t domain = std::size_t{1} << n;
    std::vector<basis_t> table(domain * 2);
    std::vector<int> reg(static_cast<std::size_t>(n) + 1);
    for (int q = 0; q <= n; ++q) reg[static_cast<std::size_t>(q)] = q;
    for (std::size_t v = 0; v < table.size(); ++v) {
        const std::size_t x = v & (domain - 1);
        const basis_t y = v >> n;
        table[v] = x | ((y ^ oracle.truth_table[x]) << n);
    }
    return PermutationOp("dj_oracle", std::move(reg), std::move(table));
}

/// Standard Deutsch-Jozsa construction; measures the input register.
inline Circuit dj_circuit(const DjOracle& oracle) {
    validate_dj_oracle(oracle);
    const int n = oracle.num_input_qubits;
    Circuit circuit(n + 1);
    circuit.gate(gates::x(n));
    for (int q = 0; q <= n; ++q) circuit.gate(gates::h(q));
    circuit.permutation(dj_oracle_op(oracle));
    for (int q = 0; q < n; ++q) circuit.gate(gates::h(q));
    std::vector<int> inputs(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) inputs[static_cast<std::size_t>(q)] = q;
    circuit.measure(inputs);
    return circuit;
}

enum class DjVerdict { Constant, Balanced };

/// CONSTANT iff every shot produced the all-zeros input register.
inline DjVerdict dj_classify(const Counts& counts) {
    if (counts.counts.empty() || counts.shots == 0) {
        throw InputError("cannot classify empty counts");
    }
    const std::string zeros(counts.counts.begin()->first.size(), '0');
    const auto it = counts.counts.find(zeros);
    const bool all_zero = it != counts.counts.end() && it->second == counts.shots;
    return all_zero ? DjVerdict::Constant : DjVerdict::Balanced;
}

// ---------------------------------------------------------------------------
// Grover search

/// Marked-set search oracle over n qubits.
struct GroverOracle {
    int num_qubits;
    std::vector<basis_t> marked;  // distinct basis values in [0, 2^n)
};

inline GroverOracle make_grover_oracle(int num_qubits,
                                       const std::vector<std::string>& marked_labels) {
    GroverOracle oracle{num_qubits, {}};
    for (const std::string& label : marked_labels) {
        if (static_cast<int>(label.size()) != num_qubits) {
            throw InputError("marked label width must equal the qubit count");
        }
        oracle.marked.push_back(label_to_index(label));
    }
    return oracle;
}

inline void validate_grover_oracle(const GroverOracle& oracle) {
    if (oracle.num_qubits < 1 || oracle.num_qubits > kMaxPermutationQubits) {
        throw InputError("oracle size out of range");
    }
    if (oracle.marked.empty()) throw InputError("marked set must be nonempty");
    const basis_t domain = basis_t{1} << oracle.num_qubits;
    std::vector<bool> seen(domain, false);
    for (basis_t m : oracle.marked) {
        if (m >= domain) throw InputError("marked value out of range");
        if (seen[m]) throw InputError("duplicate marked value");
        seen[m] = true;
    }
    if (oracle.marked.size() == domain) {
        throw InputError("marked set must be a proper subset of the domain");
    }
}

/// Uniform initialization followed by `iterations` rounds of phase oracle
/// (-1 on marked labels) and the inversion-about-the-mean diffusion
/// H^n (2|0><0| - I) H^n, both realized as diagonal permutation ops.
inline Circuit grover_circuit(const GroverOracle& oracle, int iterations) {
    validate_grover_oracle(oracle);
    if (iterations < 0) throw InputError("iterations must be >= 0");

    const int n = oracle.num_qubits;
    const std::size_t domain = std::size_t{1} << n;
    std::vector<int> reg(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) reg[static_cast<std::size_t>(q)] = q;

    std::vector<amp_t> oracle_phases(domain, amp_t{1.0, 0.0});
    for (basis_t m : oracle.marked) oracle_phases[m] = amp_t{-1.0, 0.0};

    // 2|0><0| - I
    std::vector<amp_t> reflect_phases(domain, amp_t{-1.0, 0.0});
    reflect_phases[0] = amp_t{1.0, 0.0};

    Circuit circuit(n);
    for (int q = 0; q < n; ++q) circuit.gate(gates::h(q));
    for (int k = 0; k < iterations; ++k) {
        circuit.permutation(PermutationOp::diagonal("grover_oracle", reg, oracle_phases));
        for (int q = 0; q < n; ++q) circuit.gate(gates::h(q));
        circuit.permutation(PermutationOp::diagonal("reflect_zero", reg, reflect_phases));
        for (int q = 0; q < n; ++q) circuit.gate(gates::h(q));
    }
    return circuit;
}

/// floor((pi/4) sqrt(N/M)).
inline int grover_optimal_iterations(std::uint64_t domain_size,
                                     std::uint64_t marked_count) {
    if (marked_count < 1 || marked_count > domain_size) {
        throw InputError("marked count must lie in [1, N]");
    }
    return static_cast<int>(std::floor(
        std::numbers::pi / 4.0 *
        std::sqrt(static_cast<double>(domain_size) /
                  static_cast<double>(marked_count))));
}

/// sin^2((2k+1) asin(sqrt(M/N))).
inline double grover_success_probability(std::uint64_t domain_size,
                                         std::uint64_t marked_count, int iterations) {
    if (marked_count < 1 || marked_count > domain_size) {
        throw InputError("marked count must lie in [1, N]");
    }
    const double theta = std::asin(std::sqrt(static_cast<double>(marked_count) /
                                             static_cast<double>(domain_size)));
    const double s = std::sin((2.0 * iterations + 1.0) * theta);
    return s * s;
}

/// Mean queries of a classical linear scan over a uniformly shuffled domain
/// until the first marked item, averaged over `trials` simulated scans.
inline double classical_search_baseline(std::uint64_t domain_size,
                                        std::uint64_t marked_count,
                                        std::uint64_t trials, Rng& rng) {
    if (marked_count < 1 || marked_count > domain_size) {
        throw InputError("marked count must lie in [1, N]");
    }
    if (trials == 0) throw InputError("trials must be >= 1");
    std::uint64_t total_queries = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::uint64_t remaining = domain_size;
        // Scanning a random permutation == drawing without replacement.
        while (true) {
            ++total_queries;
            if (rng.below(remaining) < marked_count) break;
            --remaining;
        }
    }
    return static_cast<double>(total_queries) / static_cast<double>(trials);
}

// ---------------------------------------------------------------------------
// Quantum Fourier transform

/// Standard H + controlled-phase ladder with final qubit-order swaps. The
/// resulting unitary is the DFT matrix F[k][j] = w^{jk} / sqrt(2^n) with
/// w = e^{2 pi i / 2^n} under the little-endian index map.
inline Circuit qft_circuit(int n, bool inverted = false) {
    if (n < 1 || n > kMaxQubits) throw InputError("qubit count out of range");
    std::vector<Gate> sequence;
    for (int i = n - 1; i >= 0; --i) {
        sequence.push_back(gates::h(i));
        for (int j = i - 1; j >= 0; --j) {
            sequence.push_back(
                gates::cphase(j, i, std::numbers::pi / static_cast<double>(
                                        std::uint64_t{1} << (i - j))));
        }
    }
    for (int i = 0; i < n / 2; ++i) sequence.push_back(gates::swap(i, n - 1 - i));

    Circuit circuit(n);
    if (inverted) {
        for (auto it = sequence.rbegin(); it != sequence.rend(); ++it) {
            circuit.gate(inverse(*it));
        }
    } else {
        for (const Gate& g : sequence) circuit.gate(g);
    }
    return circuit;
}

// ---------------------------------------------------------------------------
// Phase estimation

/// Estimates a phase in [0, 1) with t counting qubits (0..t-1) against a
/// one-qubit eigenstate register (qubit t) prepared in |1>. The controlled
/// phase ladder writes 2 pi phase 2^j onto counting qubit j, then the inverse
/// QFT concentrates the counting register on round(phase * 2^t).
inline Circuit phase_estimation_circuit(double phase, int t) {
    if (t < 1 || t > kMaxQubits - 1) throw InputError("counting width out of range");
    if (!(phase >= 0.0 && phase < 1.0)) {
        throw InputError("phase must lie in [0, 1)");
    }
    Circuit circuit(t + 1);
    circuit.gate(gates::x(t));
    for (int j = 0; j < t; ++j) circuit.gate(gates::h(j));
    for (int j = 0; j < t; ++j) {
        // Angle reduced mod 1 turn before scaling; keeps dyadic phases exact.
        const double turns =
            phase * static_cast<double>(std::uint64_t{1} << j);
        const double frac = turns - std::floor(turns);
        circuit.gate(gates::cphase(j, t, 2.0 * std::numbers::pi * frac));
    }
    const Circuit iqft = qft_circuit(t, true);
    for (const CircuitOp& op : iqft.ops()) circuit.append(op);
    std::vector<int> counting(static_cast<std::size_t>(t));
    for (int j = 0; j < t; ++j) counting[static_cast<std::size_t>(j)] = j;
    circuit.measure(counting);
    return circuit;
}

// ---------------------------------------------------------------------------
// Order finding and factorization

inline int ceil_log2(std::uint64_t n) {
    int bits = 0;
    while ((std::uint64_t{1} << bits) < n) ++bits;
    return bits;
}

/// Default counting-register width for order finding: 2 ceil(log2 N) + 1.
inline int default_counting_qubits(std::uint64_t modulus) {
    return 2 * ceil_log2(modulus) + 1;
}

/// Controlled modular-multiplication permutation on [control] + work register:
/// when the control bit is set, x -> multiplier * x mod modulus for x in
/// [0, modulus) and identity on the unused tail of the register.
inline PermutationOp controlled_mod_mul_op(std::uint64_t multiplier,
                                           std::uint64_t modulus, int control,
                                           const std::vector<int>& work_qubits,
                                           const std::string& name) {
    const std::size_t width = work_qubits.size();
    std::vector<int> reg = work_qubits;
    reg.push_back(control);
    const std::size_t domain = std::size_t{1} << (width + 1);
    const basis_t control_bit = basis_t{1} << width;
    std::vector<basis_t> table(domain);
    for (basis_t v = 0; v < domain; ++v) {
        const basis_t x = v & (control_bit - 1);
        if ((v & control_bit) && x < modulus) {
            table[v] = mod_mul(multiplier, x, modulus) | control_bit;
        } else {
            table[v] = v;
        }
    }
    return PermutationOp(name, std::move(reg), std::move(table));
}

/// Phase-estimation circuit for the order of `a` modulo `modulus`: t counting
/// qubits, a ceil(log2 N)-bit work register initialized to |1>, controlled
/// multiplications by a^(2^j), inverse QFT, counting register measured.
inline Circuit order_finding_circuit(std::uint64_t a, std::uint64_t modulus, int t) {
    const int w = ceil_log2(modulus);
    if (t < 1 || t + w > 28) throw CapacityError("order-finding register too wide");
    Circuit circuit(t + w);
    std::vector<int> work(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) work[static_cast<std::size_t>(i)] = t + i;

    circuit.gate(gates::x(t));  // work register = |1>
    for (int j = 0; j < t; ++j) circuit.gate(gates::h(j));
    std::uint64_t multiplier = a % modulus;
    for (int j = 0; j < t; ++j) {
        circuit.permutation(controlled_mod_mul_op(
            multiplier, modulus, j, work,
            "mod_mul_a2e" + std::to_string(j)));
        multiplier = mod_mul(multiplier, multiplier, modulus);
    }
    const Circuit iqft = qft_circuit(t, true);
    for (const CircuitOp& op : iqft.ops()) circuit.append(op);
    std::vector<int> counting(static_cast<std::size_t>(t));
    for (int j = 0; j < t; ++j) counting[static_cast<std::size_t>(j)] = j;
    circuit.measure(counting);
    return circuit;
}

/// Runs one order-finding sample and post-processes it with continued
/// fractions. Returns the smallest convergent denominator r with
/// a^r = 1 (mod modulus), validated classically, or nullopt when the sampled
/// outcome carries no usable information.
inline std::optional<std::uint64_t> find_order(std::uint64_t a, std::uint64_t modulus,
                                               int t, Rng& rng) {
    if (modulus < 3) throw InputError("modulus must be >= 3");
    a %= modulus;
    if (std::gcd(a, modulus) != 1) {
        throw InputError("base must be coprime to the modulus");
    }

    const Circuit circuit = order_finding_circuit(a, modulus, t);
    const SparseState state = run_state(without_measurements(circuit));
    const Outcome outcome = measure_collapse(state, circuit.measured_qubits(), rng);
    const std::uint64_t m = label_to_index(outcome.bits);
    if (m == 0) {
        return a == 1 ? std::optional<std::uint64_t>{1} : std::nullopt;
    }

    for (const Fraction& convergent :
         continued_fractions(m, std::uint64_t{1} << t, modulus)) {
        const std::uint64_t r = convergent.denominator;
        if (r >= 1 && mod_pow(a, r, modulus) == 1) return r;
    }
    return std::nullopt;
}

/// Factor pair, smaller first.
using FactorPair = std::pair<std::uint64_t, std::uint64_t>;

/// Shor's algorithm at desk scale (n <= 64). Classical screens first: even
/// numbers, perfect powers, lucky gcd draws. Otherwise repeated order finding
/// with the standard rejections (odd order, a^(r/2) = -1). Returns nullopt
/// after max_attempts quantum attempts.
inline std::optional<FactorPair> shor_factor(std::uint64_t n, Rng& rng,
                                             int max_attempts = 50) {
    if (n < 4 || n > 64) throw InputError("shor_factor handles 4 <= n <= 64");
    if (is_prime(n)) throw InputError("cannot factor a prime");

    auto ordered = [](std::uint64_t p, std::uint64_t q) {
        return FactorPair{std::min(p, q), std::max(p, q)};
    };

    if (n % 2 == 0) return ordered(2, n / 2);
    if (const auto power = perfect_power(n)) {
        return ordered(power->first, n / power->first);
    }

    const int t = default_counting_qubits(n);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t a = 2 + rng.below(n - 3);  // [2, n-2]
        const std::uint64_t g = std::gcd(a, n);
        if (g > 1) return ordered(g, n / g);

        const auto r = find_order(a, n, t, rng);
        if (!r || *r % 2 != 0) continue;
        const std::uint64_t half = mod_pow(a, *r / 2, n);
        if (half == n - 1 || half == 1) continue;
        const std::uint64_t p = std::gcd(half - 1, n);
        const std::uint64_t q = std::gcd(half + 1, n);
        if (p > 1 && q > 1 && p * q == n) return ordered(p, q);
    }
    return std::nullopt;
}

} // namespace qlab

// Acceptance suite: one check per release criterion, one [PASS]/[FAIL] line
// each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/qlab.hpp"
#include "test_helpers.hpp"

using namespace qlab;

namespace {

int g_failures = 0;

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

void check(const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::cout << "[PASS] " << name << "\n";
    } catch (const std::exception& e) {
        std::cout << "[FAIL] " << name << ": " << e.what() << "\n";
        ++g_failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::vector<int> all_qubits(int n) {
    std::vector<int> qs(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) qs[static_cast<std::size_t>(q)] = q;
    return qs;
}

// ---------------------------------------------------------------------------

void criterion_sparse_dense_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20250809);
    std::uniform_int_distribution<int> pick_n(1, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = pick_n(rng);
        const Circuit circuit = testutil::random_circuit(n, 20, rng);
        const auto sparse_route = to_dense(run_state(circuit));
        std::vector<amp_t> e0(std::size_t{1} << n, amp_t{0.0, 0.0});
        e0[0] = 1.0;
        const auto dense_route = circuit_unitary(circuit).apply(e0);
        for (std::size_t i = 0; i < sparse_route.size(); ++i) {
            worst = std::max(worst, std::abs(sparse_route[i] - dense_route[i]));
        }
    }
    require(worst <= 1e-9, "max deviation " + std::to_string(worst));
    const double elapsed = seconds_since(start);
    require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
}

void criterion_deutsch_jozsa() {
    auto zeros_probability = [](const DjOracle& oracle) {
        const SparseState state =
            run_state(without_measurements(dj_circuit(oracle)));
        const auto marginal = marginal_probabilities(
            state, all_qubits(oracle.num_input_qubits));
        const std::string zeros(
            static_cast<std::size_t>(oracle.num_input_qubits), '0');
        const auto it = marginal.find(zeros);
        return it == marginal.end() ? 0.0 : it->second;
    };

    std::uint64_t seed = 0;
    auto classify_sampled = [&seed](const DjOracle& oracle) {
        return dj_classify(run_shots(dj_circuit(oracle), 256, 17000 + seed++));
    };

    for (std::uint8_t value : {0, 1}) {
        const DjOracle oracle{3, std::vector<std::uint8_t>(8, value)};
        require(zeros_probability(oracle) >= 1.0 - 1e-9,
                "constant oracle not exact");
        require(classify_sampled(oracle) == DjVerdict::Constant,
                "constant oracle misclassified");
    }

    int tested = 0;
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
        if (std::popcount(mask) != 4 || (mask & 1u)) continue;
        DjOracle oracle{3, std::vector<std::uint8_t>(8, 0)};
        for (int x = 0; x < 8; ++x) {
            oracle.truth_table[static_cast<std::size_t>(x)] =
                static_cast<std::uint8_t>((mask >> x) & 1u);
        }
        require(zeros_probability(oracle) <= 1e-9, "balanced oracle not exact");
        require(classify_sampled(oracle) == DjVerdict::Balanced,
                "balanced oracle misclassified");
        ++tested;
    }
    require(tested == 35, "expected 35 balanced oracles");
}

void criterion_grover() {
    for (int n = 1; n <= 4; ++n) {
        const std::uint64_t domain = std::uint64_t{1} << n;
        for (std::uint64_t m : {std::uint64_t{1}, std::uint64_t{2}}) {
            if (m >= domain) continue;
            GroverOracle oracle{n, {0}};
            if (m == 2) oracle.marked.push_back(domain - 1);
            for (int k = 0; k <= 6; ++k) {
                const SparseState state = run_state(grover_circuit(oracle, k));
                double p = 0.0;
                for (basis_t marked : oracle.marked) {
                    p += std::norm(state.amplitude(marked));
                }
                const double predicted = grover_success_probability(domain, m, k);
                require(std::abs(p - predicted) <= 1e-9,
                        "closed form mismatch at n=" + std::to_string(n) +
                            " M=" + std::to_string(m) + " k=" + std::to_string(k));
            }
        }
    }

    Circuit sampled = grover_circuit(make_grover_oracle(3, {"101"}), 2);
    sampled.measure({0, 1, 2});
    const Counts counts = run_shots(sampled, 10000, 90210);
    const double hit = static_cast<double>(counts.counts.at("101")) / 10000.0;
    require(std::abs(hit - 0.9453) <= 0.03,
            "sampled success " + std::to_string(hit));
}

void criterion_qft() {
    for (int n = 1; n <= 5; ++n) {
        const double dev =
            circuit_unitary(qft_circuit(n)).max_abs_diff(testutil::dense_dft(n));
        require(dev <= 1e-9, "DFT deviation " + std::to_string(dev));

        Circuit round_trip = qft_circuit(n);
        const Circuit inverse_qft = qft_circuit(n, true);
        for (const CircuitOp& op : inverse_qft.ops()) round_trip.append(op);
        const double identity_dev =
            circuit_unitary(round_trip)
                .max_abs_diff(DenseMatrix::identity(std::size_t{1} << n));
        require(identity_dev <= 1e-9,
                "inverse deviation " + std::to_string(identity_dev));
    }
}

void criterion_phase_estimation() {
    for (int t = 1; t <= 5; ++t) {
        const std::uint64_t denom = std::uint64_t{1} << t;
        for (std::uint64_t k = 0; k < denom; ++k) {
            const double phase =
                static_cast<double>(k) / static_cast<double>(denom);
            const SparseState state =
                run_state(without_measurements(phase_estimation_circuit(phase, t)));
            const auto marginal = marginal_probabilities(state, all_qubits(t));
            const auto it = marginal.find(index_to_label(k, t));
            require(it != marginal.end() && std::abs(it->second - 1.0) <= 1e-9,
                    "dyadic phase " + std::to_string(k) + "/" +
                        std::to_string(denom) + " not exact");
        }
    }

    const SparseState state = run_state(
        without_measurements(phase_estimation_circuit(1.0 / 3.0, 4)));
    const auto marginal = marginal_probabilities(state, all_qubits(4));
    std::string modal;
    double modal_p = -1.0;
    for (const auto& [label, p] : marginal) {
        if (p > modal_p) {
            modal = label;
            modal_p = p;
        }
    }
    require(modal == "0101", "modal outcome " + modal + " is not 5/16");
}

void criterion_shor() {
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t n : {15ULL, 21ULL, 33ULL, 35ULL}) {
        Rng rng(271828 + n);
        const auto factors = shor_factor(n, rng, 50);
        require(factors.has_value(), "no factors for " + std::to_string(n));
        require(factors->first > 1 && factors->second > 1 &&
                    factors->first * factors->second == n,
                "bad factor pair for " + std::to_string(n));
    }
    const double elapsed = seconds_since(start);
    require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
}

void criterion_noise() {
    Circuit circuit(1);
    circuit.gate(gates::x(0));
    circuit.measure({0});
    NoiseModel model;
    model.after_gate.push_back(GateNoise{
        std::nullopt, std::nullopt, Channel{ChannelKind::BitFlip, 0.1}});
    const Counts counts = run_shots(circuit, 100000, 8675309, &model);
    const double flipped =
        static_cast<double>(counts.counts.at("0")) / 100000.0;
    require(std::abs(flipped - 0.1) <= 0.005,
            "bit-flip fraction " + std::to_string(flipped));

    Rng rng(1984);
    int decayed = 0;
    for (int i = 0; i < 10000; ++i) {
        const SparseState after = trajectory_step(
            basis_state(1, "1"), Channel{ChannelKind::AmplitudeDamping, 0.3}, 0,
            rng);
        if (std::abs(after.amplitude("0")) > 0.5) ++decayed;
    }
    const double decay_fraction = decayed / 10000.0;
    require(std::abs(decay_fraction - 0.3) <= 0.015,
            "decay fraction " + std::to_string(decay_fraction));
}

void criterion_grader() {
    const auto solutions =
        std::filesystem::path(QLAB_REPO_DIR) / "labs" / "solutions";
    const std::vector<LabSpec>& labs = builtin_labs();
    require(labs.size() == 8, "expected eight built-in labs");

    // Shipped reference solutions all pass.
    for (const LabSpec& lab : labs) {
        const auto file =
            solutions / (lab.id + (lab.mode() == LabMode::Classifier ? ".txt"
                                                                     : ".json"));
        const GradeReport report = run_lab(lab, file);
        require(report.verdict == Verdict::Pass,
                lab.id + " reference solution: " + report.detail);
    }

    // Disjoint-support submissions fail.
    testutil::TempDir dir;
    for (const LabSpec& lab : labs) {
        std::filesystem::path file;
        if (const auto* ref = std::get_if<DistributionReference>(&lab.reference)) {
            const std::size_t width = ref->probabilities.begin()->first.size();
            std::string outside;
            for (basis_t v = 0; v < (basis_t{1} << width); ++v) {
                const std::string label = index_to_label(v, static_cast<int>(width));
                if (!ref->probabilities.contains(label)) {
                    outside = label;
                    break;
                }
            }
            if (outside.empty()) continue;  // reference covers the whole space
            Counts counts;
            counts.shots = lab.shots_required;
            counts.counts[outside] = lab.shots_required;
            file = dir.write(lab.id + "_disjoint.json", serialize_counts(counts));
        } else if (std::holds_alternative<StateReference>(lab.reference)) {
            // Orthogonal preparation: flip every qubit of |0...0> instead.
            const auto& ref = std::get<StateReference>(lab.reference);
            Circuit orthogonal(ref.circuit.num_qubits());
            for (int q = 0; q < orthogonal.num_qubits(); ++q) {
                orthogonal.gate(gates::x(q));
            }
            file = dir.write(lab.id + "_orth.json", serialize_circuit(orthogonal));
        } else {
            file = dir.write(lab.id + "_wrong.txt", "CONSTANT\n");
        }
        const GradeReport report = run_lab(lab, file);
        require(report.verdict == Verdict::Fail,
                lab.id + " disjoint submission gave " +
                    std::string(verdict_name(report.verdict)));
    }

    // Malformed submissions are INVALID and exit 2 through the CLI.
    const auto malformed = dir.write("malformed.json", "{\"qubits\": }");
    for (const LabSpec& lab : labs) {
        require(run_lab(lab, malformed).verdict == Verdict::Invalid,
                lab.id + " malformed submission not INVALID");
    }
    const auto cli = testutil::run_cli("grade lab2 " + malformed.string());
    require(cli.exit_code == 2,
            "CLI exit " + std::to_string(cli.exit_code) + " for malformed file");

    // Correct submissions pass at least 99 percent of seeded resamples.
    for (const LabSpec& lab : labs) {
        const auto* ref = std::get_if<DistributionReference>(&lab.reference);
        if (ref == nullptr) continue;
        std::map<basis_t, double> distribution;
        std::size_t width = 0;
        for (const auto& [label, p] : ref->probabilities) {
            distribution[label_to_index(label)] = p;
            width = label.size();
        }
        int passes = 0;
        for (int resample = 0; resample < 1000; ++resample) {
            Rng rng(derive_seed(987654321,
                                static_cast<std::uint64_t>(resample) * 8 +
                                    lab.id.back()));
            Counts counts;
            counts.shots = lab.shots_required;
            for (std::uint64_t shot = 0; shot < lab.shots_required; ++shot) {
                const basis_t outcome =
                    detail::pick_outcome(distribution, rng.uniform());
                ++counts.counts[index_to_label(outcome, static_cast<int>(width))];
            }
            if (grade_distribution(counts, ref->probabilities, lab.tolerance,
                                   lab.shots_required)
                    .verdict == Verdict::Pass) {
                ++passes;
            }
        }
        require(passes >= 990, lab.id + " pass rate " + std::to_string(passes) +
                                   "/1000");
    }
}

void criterion_cli_determinism_and_fuzz() {
    testutil::TempDir dir;
    const auto bell = dir.write(
        "bell.json",
        R"({"qubits":2,"ops":[{"gate":"h","targets":[0]},)"
        R"({"gate":"x","targets":[1],"controls":[0]},{"measure":[0,1]}]})");

    const auto first =
        testutil::run_cli("run " + bell.string() + " --shots 400 --seed 12");
    const auto second =
        testutil::run_cli("run " + bell.string() + " --shots 400 --seed 12");
    require(first.exit_code == 0 && first.output == second.output,
            "run output not byte-identical");

    const auto demo1 = testutil::run_cli("demo grover --n 3 --marked 101 --seed 4");
    const auto demo2 = testutil::run_cli("demo grover --n 3 --marked 101 --seed 4");
    require(demo1.exit_code == 0 && demo1.output == demo2.output,
            "demo output not byte-identical");

    // Parser fuzz: structured errors only, no crashes.
    const std::string valid_circuit =
        R"({"qubits":2,"ops":[{"gate":"h","targets":[0]},{"measure":[0,1]}]})";
    const std::string valid_noise =
        R"({"after_gate":[{"gate":"all","qubits":"all","kind":"bit_flip","strength":0.1}],"readout_flip":0.02})";
    const std::string valid_manifest = serialize_lab_manifest(builtin_labs()[4]);
    const std::string tokens = "{}[]\",:0123456789.eE+-truefalsngb \n\t";

    std::mt19937_64 rng(0xF0221);
    auto random_bytes = [&rng](std::size_t length) {
        std::string s(length, '\0');
        for (char& c : s) c = static_cast<char>(rng() & 0xff);
        return s;
    };
    auto random_tokens = [&rng, &tokens](std::size_t length) {
        std::string s(length, '\0');
        for (char& c : s) c = tokens[rng() % tokens.size()];
        return s;
    };
    auto mutate = [&rng](std::string base) {
        const std::size_t edits = 1 + rng() % 6;
        for (std::size_t e = 0; e < edits && !base.empty(); ++e) {
            const std::size_t at = rng() % base.size();
            switch (rng() % 3) {
                case 0: base[at] = static_cast<char>(rng() & 0xff); break;
                case 1: base.erase(at, 1); break;
                default: base.insert(at, 1, static_cast<char>(rng() & 0x7f));
            }
        }
        return base;
    };

    for (int i = 0; i < 100000; ++i) {
        std::string input;
        switch (i % 10) {
            case 0:
            case 1:
            case 2:
            case 3: input = random_bytes(1 + rng() % 64); break;
            case 4:
            case 5:
            case 6: input = random_tokens(1 + rng() % 96); break;
            case 7: input = mutate(valid_circuit); break;
            case 8: input = mutate(valid_noise); break;
            default: input = mutate(valid_manifest); break;
        }
        try {
            switch (i % 3) {
                case 0: parse_circuit(input); break;
                case 1: parse_noise_model(input); break;
                default: parse_lab_manifest(input); break;
            }
        } catch (const InputError&) {
            // structured rejection is the expected path
        } catch (const std::exception& e) {
            throw std::runtime_error("fuzz input escaped as " +
                                     std::string(e.what()));
        }
    }
}

void criterion_classical_baseline() {
    Rng rng(6174);
    const double mean = classical_search_baseline(8, 1, 100000, rng);
    require(std::abs(mean - 4.5) <= 0.05, "mean queries " + std::to_string(mean));

    const auto report = testutil::run_cli("demo grover --n 10 --seed 77");
    require(report.exit_code == 0, "grover demo failed");
    require(report.output.find("optimal iterations k = 25") != std::string::npos,
            "demo does not show 25 iterations");

    const std::string needle = "classical baseline mean queries: ";
    const std::size_t at = report.output.find(needle);
    require(at != std::string::npos, "demo does not show the baseline");
    const double shown = std::stod(report.output.substr(at + needle.size()));
    require(std::abs(shown - 512.5) <= 3.0,
            "baseline " + std::to_string(shown) + " far from 512.5");
}

} // namespace

int main() {
    check("1. sparse/dense oracle equivalence (100 random circuits, <10 s)",
          criterion_sparse_dense_equivalence);
    check("2. deutsch-jozsa exactness (exact + 256-shot classification)",
          criterion_deutsch_jozsa);
    check("3. grover closed form (grid to 1e-9, sampled 0.9453 +- 0.03)",
          criterion_grover);
    check("4. qft unitary matches DFT; inverse composes to identity",
          criterion_qft);
    check("5. phase estimation exact on dyadics; 1/3 modal at 5/16",
          criterion_phase_estimation);
    check("6. shor factors 15, 21, 33, 35 (<60 s)", criterion_shor);
    check("7. noise statistics (bit flip 0.1, damping 0.3)", criterion_noise);
    check("8. grader soundness and self-consistency", criterion_grader);
    check("9. CLI determinism and parser fuzz (100k inputs)",
          criterion_cli_determinism_and_fuzz);
    check("10. classical baseline 4.5; demo reports 25 vs ~512.5",
          criterion_classical_baseline);

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}

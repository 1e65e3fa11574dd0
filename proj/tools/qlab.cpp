// qlab command-line tool: run circuit files, execute algorithm demos, grade
// lab submissions. All sampling subcommands require an explicit seed so that
// runs are reproducible.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qlab/qlab.hpp"

namespace {

using namespace qlab;

__attribute__((format(printf, 1, 2)))
std::string fmt(const char* format, ...) {
    char buffer[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

std::vector<LabSpec> active_labs() {
    const char* dir = std::getenv("QLAB_LAB_DIR");
    if (dir != nullptr && *dir != '\0') return load_lab_dir(dir);
    return builtin_labs();
}

/// Observed frequency of a label in the counts (0 when absent).
double observed_freq(const Counts& counts, const std::string& label) {
    const auto it = counts.counts.find(label);
    if (it == counts.counts.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(counts.shots);
}

void print_expected_vs_observed(const std::map<std::string, double>& expected,
                                const Counts& observed) {
    std::map<std::string, double> all = expected;
    for (const auto& [label, count] : observed.counts) all.try_emplace(label, 0.0);
    std::cout << "  outcome  expected  observed\n";
    for (const auto& [label, p] : all) {
        std::cout << fmt("  %-8s %.4f    %.4f\n", label.c_str(), p,
                         observed_freq(observed, label));
    }
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string circuit_file;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::string noise_file;
    std::string out_file;
};

int cmd_run(const RunArgs& args) {
    Circuit circuit(1);
    try {
        circuit = parse_circuit(read_file(args.circuit_file));
    } catch (const Error& e) {
        std::cerr << args.circuit_file << ": " << e.what() << "\n";
        return 1;
    }

    std::optional<NoiseModel> noise;
    if (!args.noise_file.empty()) {
        try {
            noise = parse_noise_model(read_file(args.noise_file));
        } catch (const Error& e) {
            std::cerr << args.noise_file << ": " << e.what() << "\n";
            return 1;
        }
    }

    Counts counts;
    try {
        counts = run_shots(circuit, args.shots, args.seed,
                           noise ? &*noise : nullptr);
    } catch (const Error& e) {
        std::cerr << args.circuit_file << ": " << e.what() << "\n";
        return 1;
    }

    if (!args.out_file.empty()) {
        try {
            write_file(args.out_file, serialize_counts(counts));
        } catch (const Error& e) {
            std::cerr << args.out_file << ": " << e.what() << "\n";
            return 1;
        }
    } else {
        std::cout << render_histogram(counts);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct DemoArgs {
    std::string name;
    int n = -1;
    std::string marked;
    double theta = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::uint64_t> seed;
};

std::uint64_t require_seed(const DemoArgs& args) {
    if (!args.seed) throw InputError("this demo samples; pass --seed");
    return *args.seed;
}

int demo_bell(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const Circuit circuit = bell_circuit(BellState::PhiPlus);
    std::cout << "bell: H(0) then CNOT(0->1) prepares (|00> + |11>)/sqrt(2)\n";
    std::cout << "exact probabilities:\n";
    const auto exact = probabilities(run_state(circuit));
    Circuit measured = circuit;
    measured.measure({0, 1});
    const Counts counts = run_shots(measured, 4096, seed);
    print_expected_vs_observed(exact, counts);
    std::cout << "sampled histogram (4096 shots, seed " << seed << "):\n";
    std::cout << render_histogram(counts);
    return 0;
}

int demo_kickback(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const double theta =
        std::isnan(args.theta) ? std::numbers::pi : args.theta;
    std::cout << fmt("phase kickback with theta = %.6f\n", theta);

    const SparseState state = run_state(phase_kickback_circuit(theta));
    std::cout << "control-qubit amplitudes (target fixed at |1>):\n";
    for (const auto& [label, p] : probabilities(state)) {
        const amp_t amp = state.amplitude(label);
        std::cout << fmt("  %s  %+.6f%+.6fi   p=%.6f\n", label.c_str(),
                         amp.real(), amp.imag(), p);
    }

    Circuit interfered = phase_kickback_circuit(theta);
    interfered.gate(gates::h(0));
    interfered.measure({0});
    const double expected = std::pow(std::sin(theta / 2.0), 2);
    const Counts counts = run_shots(interfered, 4096, seed);
    std::cout << "after H on the control, P(measure 1) reveals the phase:\n";
    std::cout << fmt("  expected %.6f  observed %.6f\n", expected,
                     observed_freq(counts, "1"));
    return 0;
}

int demo_dj(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const int n = args.n < 0 ? 3 : args.n;
    if (n < 1 || n > 10) throw InputError("dj demo supports --n 1..10");
    const std::size_t domain = std::size_t{1} << n;

    struct Case {
        const char* name;
        DjOracle oracle;
        DjVerdict truth;
    };
    std::vector<Case> cases;
    cases.push_back({"constant-0",
                     DjOracle{n, std::vector<std::uint8_t>(domain, 0)},
                     DjVerdict::Constant});
    cases.push_back({"constant-1",
                     DjOracle{n, std::vector<std::uint8_t>(domain, 1)},
                     DjVerdict::Constant});
    DjOracle parity{n, std::vector<std::uint8_t>(domain, 0)};
    for (std::size_t x = 0; x < domain; ++x) {
        parity.truth_table[x] = static_cast<std::uint8_t>(std::popcount(x) % 2);
    }
    cases.push_back({"balanced-parity", std::move(parity), DjVerdict::Balanced});

    std::cout << "deutsch-jozsa on " << n << " input qubits, 256 shots each:\n";
    std::uint64_t case_index = 0;
    for (const Case& c : cases) {
        const Circuit circuit = dj_circuit(c.oracle);
        // Exact mode: probability of the all-zeros input register.
        const SparseState state = run_state(without_measurements(circuit));
        const auto marginal =
            marginal_probabilities(state, circuit.measured_qubits());
        const std::string zeros(static_cast<std::size_t>(n), '0');
        const auto it = marginal.find(zeros);
        const double exact = it == marginal.end() ? 0.0 : it->second;

        const Counts counts =
            run_shots(circuit, 256, derive_seed(seed, case_index++));
        const DjVerdict verdict = dj_classify(counts);
        const auto name = [](DjVerdict v) {
            return v == DjVerdict::Constant ? "CONSTANT" : "BALANCED";
        };
        std::cout << fmt("  %-16s P(zeros) exact %.6f  expected %-8s classified %-8s %s\n",
                         c.name, exact, name(c.truth), name(verdict),
                         verdict == c.truth ? "ok" : "MISMATCH");
    }
    return 0;
}

int demo_grover(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const int n = args.n < 0 ? 3 : args.n;
    if (n < 1 || n > 12) throw InputError("grover demo supports --n 1..12");
    const std::string marked_label =
        args.marked.empty() ? std::string(static_cast<std::size_t>(n), '1')
                            : args.marked;
    const GroverOracle oracle = make_grover_oracle(n, {marked_label});

    const std::uint64_t domain = std::uint64_t{1} << n;
    const int k = grover_optimal_iterations(domain, 1);
    const double predicted = grover_success_probability(domain, 1, k);

    std::cout << fmt("grover search: N = %llu, marked = %s\n",
                     static_cast<unsigned long long>(domain),
                     marked_label.c_str());
    std::cout << fmt("optimal iterations k = %d\n", k);
    std::cout << fmt("closed-form success probability: %.6f\n", predicted);

    const Circuit circuit = grover_circuit(oracle, k);
    const SparseState state = run_state(circuit);
    const double exact = std::norm(state.amplitude(marked_label));
    std::cout << fmt("exact statevector probability:   %.6f\n", exact);

    Circuit measured = circuit;
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) all[static_cast<std::size_t>(q)] = q;
    measured.measure(all);
    const Counts counts = run_shots(measured, 4096, seed);
    std::cout << fmt("sampled frequency (4096 shots):  %.6f\n",
                     observed_freq(counts, marked_label));

    Rng rng(derive_seed(seed, 0xba5e11e));
    const double classical = classical_search_baseline(domain, 1, 100000, rng);
    std::cout << fmt("quantum queries (iterations):    %d\n", k);
    std::cout << fmt("classical baseline mean queries: %.2f\n", classical);
    return 0;
}

int demo_qft(const DemoArgs& args) {
    const int n = args.n < 0 ? 2 : args.n;
    if (n < 1 || n > kMaxUnitaryQubits) {
        throw InputError("qft demo supports --n 1.." +
                         std::to_string(kMaxUnitaryQubits));
    }
    const DenseMatrix u = circuit_unitary(qft_circuit(n));
    const std::size_t dim = u.dim();

    std::cout << "qft unitary on " << n << " qubit(s):\n";
    for (std::size_t row = 0; row < dim; ++row) {
        std::string line = " ";
        for (std::size_t col = 0; col < dim; ++col) {
            line += fmt(" %+.3f%+.3fi", u.at(row, col).real(), u.at(row, col).imag());
        }
        std::cout << line << "\n";
    }

    // Expected entries from the DFT formula.
    double worst = 0.0;
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) {
            const double angle = 2.0 * std::numbers::pi *
                                 static_cast<double>(row * col) /
                                 static_cast<double>(dim);
            const amp_t expected =
                std::polar(1.0 / std::sqrt(static_cast<double>(dim)), angle);
            worst = std::max(worst, std::abs(u.at(row, col) - expected));
        }
    }
    std::cout << fmt("max deviation from DFT matrix:  %.3e\n", worst);

    Circuit round_trip = qft_circuit(n);
    const Circuit iqft = qft_circuit(n, true);
    for (const CircuitOp& op : iqft.ops()) round_trip.append(op);
    const double identity_dev = circuit_unitary(round_trip)
                                    .max_abs_diff(DenseMatrix::identity(dim));
    std::cout << fmt("max deviation of QFT.QFT^-1 from identity: %.3e\n",
                     identity_dev);
    return 0;
}

int demo_qpe(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const int t = args.n < 0 ? 4 : args.n;
    if (t < 1 || t > 12) throw InputError("qpe demo supports --n 1..12");
    const double phase = std::isnan(args.theta) ? 0.25 : args.theta;

    const Circuit circuit = phase_estimation_circuit(phase, t);
    const SparseState state = run_state(without_measurements(circuit));
    const auto marginal = marginal_probabilities(state, circuit.measured_qubits());

    std::string modal;
    double modal_p = -1.0;
    for (const auto& [label, p] : marginal) {
        if (p > modal_p) {
            modal = label;
            modal_p = p;
        }
    }
    const std::uint64_t modal_value = label_to_index(modal);
    const double estimate = static_cast<double>(modal_value) /
                            static_cast<double>(std::uint64_t{1} << t);

    std::cout << fmt("phase estimation: phase = %.6f, %d counting qubits\n", phase, t);
    std::cout << fmt("modal outcome %s = %llu/%llu -> estimate %.6f (p = %.6f)\n",
                     modal.c_str(), static_cast<unsigned long long>(modal_value),
                     static_cast<unsigned long long>(std::uint64_t{1} << t),
                     estimate, modal_p);

    const Counts counts = run_shots(circuit, 4096, seed);
    std::cout << "sampled histogram (4096 shots):\n";
    std::cout << render_histogram(counts);
    return 0;
}

int demo_shor(const DemoArgs& args) {
    const std::uint64_t seed = require_seed(args);
    const std::uint64_t n = args.n < 0 ? 15 : static_cast<std::uint64_t>(args.n);
    Rng rng(seed);
    std::cout << "shor factorization of " << n << ":\n";
    const auto factors = shor_factor(n, rng);
    if (!factors) {
        std::cout << "no factors found within the attempt budget\n";
        return 1;
    }
    std::cout << fmt("factors: %llu x %llu\n",
                     static_cast<unsigned long long>(factors->first),
                     static_cast<unsigned long long>(factors->second));
    return 0;
}

int cmd_demo(const DemoArgs& args) {
    try {
        if (args.name == "bell") return demo_bell(args);
        if (args.name == "kickback") return demo_kickback(args);
        if (args.name == "dj") return demo_dj(args);
        if (args.name == "grover") return demo_grover(args);
        if (args.name == "qft") return demo_qft(args);
        if (args.name == "qpe") return demo_qpe(args);
        if (args.name == "shor") return demo_shor(args);
        std::cerr << "unknown demo '" << args.name
                  << "'; available: bell kickback dj grover qft qpe shor\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "demo " << args.name << ": " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------

int cmd_grade(const std::string& lab_id, const std::string& submission) {
    std::vector<LabSpec> labs;
    try {
        labs = active_labs();
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    const LabSpec* lab = find_lab(labs, lab_id);
    if (lab == nullptr) {
        std::cerr << "unknown lab '" << lab_id << "'; available:";
        for (const LabSpec& candidate : labs) std::cerr << " " << candidate.id;
        std::cerr << "\n";
        return 2;
    }
    const GradeReport report = run_lab(*lab, submission);
    std::cout << serialize_report(report);
    return verdict_exit_code(report.verdict);
}

int cmd_labs() {
    std::vector<LabSpec> labs;
    try {
        labs = active_labs();
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    for (const LabSpec& lab : labs) {
        std::cout << fmt("%-6s %-13s %s\n", lab.id.c_str(),
                         std::string(lab_mode_name(lab.mode())).c_str(),
                         lab.title.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlab - sparse quantum circuit simulator and lab grader"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run a circuit file and sample shots");
    run->add_option("circuit", run_args.circuit_file, "Circuit JSON file")
        ->required();
    run->add_option("--shots", run_args.shots, "Number of shots (>= 1)")
        ->required()
        ->check(CLI::Range(std::uint64_t{1},
                           std::numeric_limits<std::uint64_t>::max()));
    run->add_option("--seed", run_args.seed, "RNG seed")->required();
    run->add_option("--noise", run_args.noise_file, "Noise model JSON file");
    run->add_option("--out", run_args.out_file, "Write counts JSON here");

    DemoArgs demo_args;
    CLI::App* demo = app.add_subcommand("demo", "Run an algorithm demo");
    demo->add_option("name", demo_args.name,
                     "One of: bell kickback dj grover qft qpe shor")
        ->required();
    demo->add_option("--n", demo_args.n, "Size parameter (qubits, or the number to factor)")
        ->check(CLI::NonNegativeNumber);
    demo->add_option("--marked", demo_args.marked, "Marked bitstring (grover)");
    demo->add_option("--theta", demo_args.theta,
                     "Angle in radians (kickback) or phase in [0,1) (qpe)");
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = demo->add_option("--seed", seed_value, "RNG seed");

    std::string grade_lab, grade_submission;
    CLI::App* grade = app.add_subcommand("grade", "Grade a lab submission");
    grade->add_option("lab_id", grade_lab, "Lab identifier")->required();
    grade->add_option("submission", grade_submission, "Submission file")->required();

    CLI::App* labs = app.add_subcommand("labs", "List available labs");
    CLI::App* version = app.add_subcommand("version", "Print the version");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(run)) return cmd_run(run_args);
    if (app.got_subcommand(demo)) {
        if (seed_opt->count() > 0) demo_args.seed = seed_value;
        return cmd_demo(demo_args);
    }
    if (app.got_subcommand(grade)) return cmd_grade(grade_lab, grade_submission);
    if (app.got_subcommand(labs)) return cmd_labs();
    if (app.got_subcommand(version)) {
        std::cout << "qlab " << qlab::kVersion << "\n";
        return 0;
    }
    return 1;
}

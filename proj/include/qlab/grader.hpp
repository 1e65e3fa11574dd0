#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "qlab/algorithms.hpp"
#include "qlab/circuit.hpp"
#include "qlab/errors.hpp"
#include "qlab/io.hpp"
#include "qlab/state.hpp"

namespace qlab {

enum class LabMode { State, Distribution, Classifier };
enum class Verdict { Pass, Fail, Invalid };

inline std::string_view lab_mode_name(LabMode mode) {
    switch (mode) {
        case LabMode::State: return "state";
        case LabMode::Distribution: return "distribution";
        case LabMode::Classifier: return "classifier";
    }
    return "?";
}

inline std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Invalid: return "INVALID";
    }
    return "?";
}

/// Process exit code contract for the grade subcommand.
inline int verdict_exit_code(Verdict verdict) {
    switch (verdict) {
        case Verdict::Pass: return 0;
        case Verdict::Fail: return 1;
        case Verdict::Invalid: return 2;
    }
    return 2;
}

struct StateReference {
    Circuit circuit;
};

struct DistributionReference {
    std::map<std::string, double> probabilities;
};

struct ClassifierReference {
    std::string expected;
    std::vector<std::string> label_set;
};

/// One gradeable lab: a reference to compare against, a tolerance and (for
/// distribution labs) a minimum shot count.
struct LabSpec {
    std::string id;
    std::string title;
    std::variant<StateReference, DistributionReference, ClassifierReference>
        reference = ClassifierReference{};
    double tolerance = 0.05;
    std::uint64_t shots_required = 0;

    LabMode mode() const {
        switch (reference.index()) {
            case 0: return LabMode::State;
            case 1: return LabMode::Distribution;
            default: return LabMode::Classifier;
        }
    }
};

struct GradeReport {
    std::string lab_id;
    Verdict verdict = Verdict::Invalid;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string detail;
};

namespace grader_detail {

inline std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

} // namespace grader_detail

/// Global-phase-insensitive state comparison: statistic |<ref|sub>|,
/// PASS iff it reaches 1 - tol.
inline GradeReport grade_state(const SparseState& submitted,
                               const SparseState& reference, double tol,
                               const std::string& lab_id = "") {
    GradeReport report;
    report.lab_id = lab_id;
    report.threshold = 1.0 - tol;
    if (submitted.num_qubits() != reference.num_qubits()) {
        report.verdict = Verdict::Invalid;
        report.detail = "submission has " + std::to_string(submitted.num_qubits()) +
                        " qubits, reference has " +
                        std::to_string(reference.num_qubits());
        return report;
    }
    report.statistic = std::abs(inner_product(reference, submitted));
    report.verdict = report.statistic >= report.threshold ? Verdict::Pass
                                                          : Verdict::Fail;
    report.detail = "overlap " + grader_detail::format_number(report.statistic) +
                    " vs required " + grader_detail::format_number(report.threshold);
    return report;
}

/// Total variation distance between observed frequencies and the expected
/// distribution; PASS iff TVD <= tol. Reports per-outcome residuals.
inline GradeReport grade_distribution(const Counts& observed,
                                      const std::map<std::string, double>& expected,
                                      double tol_tvd,
                                      std::uint64_t shots_required = 0,
                                      const std::string& lab_id = "") {
    GradeReport report;
    report.lab_id = lab_id;
    report.threshold = tol_tvd;
    if (observed.shots == 0 || observed.shots < shots_required) {
        report.verdict = Verdict::Invalid;
        report.detail = "needs >= " + std::to_string(std::max<std::uint64_t>(
                                          shots_required, 1)) +
                        " shots, got " + std::to_string(observed.shots);
        return report;
    }

    std::map<std::string, double> residuals;
    for (const auto& [label, probability] : expected) residuals[label] -= probability;
    for (const auto& [label, count] : observed.counts) {
        residuals[label] += static_cast<double>(count) /
                            static_cast<double>(observed.shots);
    }
    double tvd = 0.0;
    for (const auto& [label, residual] : residuals) tvd += std::abs(residual);
    tvd /= 2.0;

    report.statistic = tvd;
    report.verdict = tvd <= tol_tvd ? Verdict::Pass : Verdict::Fail;

    std::string detail = "tvd " + grader_detail::format_number(tvd) + "; residuals:";
    std::size_t listed = 0;
    for (const auto& [label, residual] : residuals) {
        if (listed++ == 8) {
            detail += " ...";
            break;
        }
        detail += " " + label + ":" +
                  (residual >= 0 ? "+" : "") + grader_detail::format_number(residual);
    }
    report.detail = detail;
    return report;
}

/// Exact label match; labels outside the declared set are INVALID.
inline GradeReport grade_classifier(const std::string& submitted,
                                    const std::string& expected,
                                    const std::vector<std::string>& label_set,
                                    const std::string& lab_id = "") {
    GradeReport report;
    report.lab_id = lab_id;
    report.threshold = 1.0;
    const bool known =
        std::find(label_set.begin(), label_set.end(), submitted) != label_set.end();
    if (!known) {
        report.verdict = Verdict::Invalid;
        report.detail = "label '" + submitted + "' is not in the declared label set";
        return report;
    }
    report.statistic = submitted == expected ? 1.0 : 0.0;
    report.verdict = submitted == expected ? Verdict::Pass : Verdict::Fail;
    report.detail = "submitted '" + submitted + "', expected '" + expected + "'";
    return report;
}

/// Inverts the per-bit readout confusion matrix [[1-p, p], [p, 1-p]] on the
/// observed frequencies, clips negatives to zero and renormalizes.
inline std::map<std::string, double> readout_mitigate(const Counts& counts,
                                                      double flip_prob) {
    if (!(flip_prob >= 0.0 && flip_prob < 0.5)) {
        throw InputError("readout mitigation requires 0 <= p < 0.5");
    }
    if (counts.shots == 0 || counts.counts.empty()) {
        throw InputError("cannot mitigate empty counts");
    }
    const std::size_t width = counts.counts.begin()->first.size();
    if (width > static_cast<std::size_t>(kMaxDenseQubits)) {
        throw CapacityError("readout mitigation limited to " +
                            std::to_string(kMaxDenseQubits) + " bits");
    }

    std::vector<double> freq(std::size_t{1} << width, 0.0);
    for (const auto& [label, count] : counts.counts) {
        if (label.size() != width) {
            throw InputError("count labels must all have the same width");
        }
        freq[label_to_index(label)] +=
            static_cast<double>(count) / static_cast<double>(counts.shots);
    }

    // Inverse confusion matrix applied independently per bit.
    const double denom = 1.0 - 2.0 * flip_prob;
    for (std::size_t bit = 0; bit < width; ++bit) {
        const std::size_t mask = std::size_t{1} << bit;
        for (std::size_t i = 0; i < freq.size(); ++i) {
            if (i & mask) continue;
            const double f0 = freq[i];
            const double f1 = freq[i | mask];
            freq[i] = ((1.0 - flip_prob) * f0 - flip_prob * f1) / denom;
            freq[i | mask] = ((1.0 - flip_prob) * f1 - flip_prob * f0) / denom;
        }
    }

    double total = 0.0;
    for (double& f : freq) {
        if (f < 0.0) f = 0.0;
        total += f;
    }
    std::map<std::string, double> corrected;
    for (std::size_t i = 0; i < freq.size(); ++i) {
        if (freq[i] > 0.0 || total == 0.0) {
            corrected[index_to_label(i, static_cast<int>(width))] =
                total > 0.0 ? freq[i] / total : 0.0;
        }
    }
    return corrected;
}

/// Grades a submission file against a lab. State labs expect a circuit file,
/// distribution labs a counts file, classifier labs a plain-text label.
/// Malformed input never escapes as an exception; it becomes INVALID.
inline GradeReport run_lab(const LabSpec& lab,
                           const std::filesystem::path& submission_path) {
    auto invalid = [&](const std::string& why) {
        GradeReport report;
        report.lab_id = lab.id;
        report.verdict = Verdict::Invalid;
        report.detail = why;
        return report;
    };

    std::string text;
    try {
        text = read_file(submission_path);
    } catch (const Error& e) {
        return invalid(e.what());
    }

    try {
        if (const auto* ref = std::get_if<StateReference>(&lab.reference)) {
            // Grade the pre-measurement state; trailing measurements on
            // either side are ignored.
            const Circuit submitted = without_measurements(parse_circuit(text));
            return grade_state(run_state(submitted),
                               run_state(without_measurements(ref->circuit)),
                               lab.tolerance, lab.id);
        }
        if (const auto* ref = std::get_if<DistributionReference>(&lab.reference)) {
            return grade_distribution(parse_counts(text), ref->probabilities,
                                      lab.tolerance, lab.shots_required, lab.id);
        }
        const auto& ref = std::get<ClassifierReference>(lab.reference);
        std::string label = text;
        while (!label.empty() && (label.back() == '\n' || label.back() == '\r' ||
                                  label.back() == ' ' || label.back() == '\t')) {
            label.pop_back();
        }
        while (!label.empty() && (label.front() == ' ' || label.front() == '\t')) {
            label.erase(label.begin());
        }
        return grade_classifier(label, ref.expected, ref.label_set, lab.id);
    } catch (const Error& e) {
        return invalid(e.what());
    }
}

// ---------------------------------------------------------------------------
// Lab manifests

inline LabSpec parse_lab_manifest(const std::string& text) {
    using io_detail::json;
    const json doc = io_detail::parse_document(text);
    if (!doc.is_object()) throw InputError("manifest must be an object");
    io_detail::reject_unknown_keys(
        doc, {"id", "title", "mode", "reference", "tolerance", "shots_required"}, "");

    LabSpec lab;
    lab.id = io_detail::require_string(io_detail::require_field(doc, "id", ""), "id: ");
    lab.title = io_detail::require_string(io_detail::require_field(doc, "title", ""),
                                          "title: ");
    const std::string mode = io_detail::require_string(
        io_detail::require_field(doc, "mode", ""), "mode: ");
    const json& reference = io_detail::require_field(doc, "reference", "");
    if (!reference.is_object()) throw InputError("reference must be an object");

    if (doc.contains("tolerance")) {
        lab.tolerance = io_detail::require_number(doc.at("tolerance"), "tolerance: ");
    }
    if (!(lab.tolerance > 0.0)) throw InputError("tolerance must be > 0");
    if (doc.contains("shots_required")) {
        const std::int64_t shots =
            io_detail::require_int(doc.at("shots_required"), "shots_required: ");
        if (shots < 0) throw InputError("shots_required must be >= 0");
        lab.shots_required = static_cast<std::uint64_t>(shots);
    }

    if (mode == "state") {
        io_detail::reject_unknown_keys(reference, {"circuit"}, "reference: ");
        lab.reference = StateReference{parse_circuit(
            io_detail::require_field(reference, "circuit", "reference: ").dump())};
    } else if (mode == "distribution") {
        io_detail::reject_unknown_keys(reference, {"probabilities"}, "reference: ");
        const json& table =
            io_detail::require_field(reference, "probabilities", "reference: ");
        if (!table.is_object()) {
            throw InputError("reference probabilities must be an object");
        }
        DistributionReference ref;
        double total = 0.0;
        for (const auto& [label, value] : table.items()) {
            label_to_index(label);
            const double p = io_detail::require_number(value, "probabilities: ");
            if (p < 0.0) throw InputError("probabilities must be non-negative");
            ref.probabilities[label] = p;
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw InputError("reference probabilities must sum to 1");
        }
        lab.reference = std::move(ref);
    } else if (mode == "classifier") {
        io_detail::reject_unknown_keys(reference, {"label", "label_set"},
                                       "reference: ");
        ClassifierReference ref;
        ref.expected = io_detail::require_string(
            io_detail::require_field(reference, "label", "reference: "),
            "reference: ");
        const json& labels =
            io_detail::require_field(reference, "label_set", "reference: ");
        if (!labels.is_array() || labels.empty()) {
            throw InputError("label_set must be a nonempty array");
        }
        for (const json& item : labels) {
            ref.label_set.push_back(io_detail::require_string(item, "label_set: "));
        }
        if (std::find(ref.label_set.begin(), ref.label_set.end(), ref.expected) ==
            ref.label_set.end()) {
            throw InputError("expected label must be in the label set");
        }
        lab.reference = std::move(ref);
    } else {
        throw InputError("mode must be state, distribution or classifier");
    }
    return lab;
}

inline std::string serialize_lab_manifest(const LabSpec& lab) {
    using io_detail::json;
    json reference;
    if (const auto* ref = std::get_if<StateReference>(&lab.reference)) {
        reference["circuit"] = json::parse(serialize_circuit(ref->circuit));
    } else if (const auto* ref = std::get_if<DistributionReference>(&lab.reference)) {
        json table = json::object();
        for (const auto& [label, p] : ref->probabilities) table[label] = p;
        reference["probabilities"] = std::move(table);
    } else {
        const auto& classifier = std::get<ClassifierReference>(lab.reference);
        reference["label"] = classifier.expected;
        reference["label_set"] = classifier.label_set;
    }
    const json doc{{"id", lab.id},
                   {"title", lab.title},
                   {"mode", std::string(lab_mode_name(lab.mode()))},
                   {"reference", std::move(reference)},
                   {"tolerance", lab.tolerance},
                   {"shots_required", lab.shots_required}};
    return doc.dump(2) + "\n";
}

inline std::string serialize_report(const GradeReport& report) {
    using io_detail::json;
    const json doc{{"lab_id", report.lab_id},
                   {"verdict", std::string(verdict_name(report.verdict))},
                   {"statistic", report.statistic},
                   {"threshold", report.threshold},
                   {"detail", report.detail}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Built-in labs, one per curriculum topic.

inline const std::vector<LabSpec>& builtin_labs() {
    static const std::vector<LabSpec> labs = [] {
        std::vector<LabSpec> all;

        {
            LabSpec lab;
            lab.id = "lab1";
            lab.title = "Single-qubit superposition";
            Circuit plus(1);
            plus.gate(gates::h(0));
            lab.reference = StateReference{std::move(plus)};
            lab.tolerance = 1e-6;
            all.push_back(std::move(lab));
        }
        {
            LabSpec lab;
            lab.id = "lab2";
            lab.title = "Bell state preparation";
            lab.reference = StateReference{bell_circuit(BellState::PhiPlus)};
            lab.tolerance = 1e-6;
            all.push_back(std::move(lab));
        }
        {
            LabSpec lab;
            lab.id = "lab3";
            lab.title = "Phase kickback";
            lab.reference = StateReference{phase_kickback_circuit(std::numbers::pi)};
            lab.tolerance = 1e-6;
            all.push_back(std::move(lab));
        }
        {
            LabSpec lab;
            lab.id = "lab4";
            lab.title = "Deutsch-Jozsa classification";
            lab.reference = ClassifierReference{"BALANCED", {"CONSTANT", "BALANCED"}};
            lab.tolerance = 0.5;
            all.push_back(std::move(lab));
        }
        {
            // Grover on 3 qubits, marked "101", 2 iterations: the peak
            // probability is exactly 121/128, the rest spread uniformly.
            LabSpec lab;
            lab.id = "lab5";
            lab.title = "Grover search distribution";
            DistributionReference ref;
            for (basis_t v = 0; v < 8; ++v) {
                ref.probabilities[index_to_label(v, 3)] =
                    v == 0b101 ? 121.0 / 128.0 : 1.0 / 128.0;
            }
            lab.reference = std::move(ref);
            lab.tolerance = 0.05;
            lab.shots_required = 4096;
            all.push_back(std::move(lab));
        }
        {
            // X gate followed by a p = 0.1 bit flip.
            LabSpec lab;
            lab.id = "lab6";
            lab.title = "Noisy measurement distribution";
            lab.reference =
                DistributionReference{{{"0", 0.1}, {"1", 0.9}}};
            lab.tolerance = 0.05;
            lab.shots_required = 4096;
            all.push_back(std::move(lab));
        }
        {
            LabSpec lab;
            lab.id = "lab7";
            lab.title = "Quantum Fourier transform state";
            Circuit qft_input(3);
            qft_input.gate(gates::x(0));
            const Circuit qft3 = qft_circuit(3);
            for (const CircuitOp& op : qft3.ops()) qft_input.append(op);
            lab.reference = StateReference{std::move(qft_input)};
            lab.tolerance = 1e-6;
            all.push_back(std::move(lab));
        }
        {
            // Counting-register distribution of order finding for a = 7,
            // N = 15 with t = 9: four exact peaks at multiples of 2^9 / 4.
            LabSpec lab;
            lab.id = "lab8";
            lab.title = "Order-finding distribution";
            DistributionReference ref;
            for (basis_t peak : {basis_t{0}, basis_t{128}, basis_t{256}, basis_t{384}}) {
                ref.probabilities[index_to_label(peak, 9)] = 0.25;
            }
            lab.reference = std::move(ref);
            lab.tolerance = 0.05;
            lab.shots_required = 4096;
            all.push_back(std::move(lab));
        }
        return all;
    }();
    return labs;
}

/// Loads every *.json manifest from a directory, sorted by id.
inline std::vector<LabSpec> load_lab_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw InputError("lab directory '" + dir.string() + "' does not exist");
    }
    std::vector<LabSpec> labs;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            labs.push_back(parse_lab_manifest(read_file(file)));
        } catch (const Error& e) {
            throw InputError("manifest '" + file.string() + "': " + e.what());
        }
    }
    std::sort(labs.begin(), labs.end(),
              [](const LabSpec& a, const LabSpec& b) { return a.id < b.id; });
    return labs;
}

inline const LabSpec* find_lab(const std::vector<LabSpec>& labs,
                               const std::string& id) {
    for (const LabSpec& lab : labs) {
        if (lab.id == id) return &lab;
    }
    return nullptr;
}

} // namespace qlab

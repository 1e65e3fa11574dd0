#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qlab/circuit.hpp"
#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/noise.hpp"

namespace qlab {

namespace io_detail {

using nlohmann::json;

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(e.what());
    }
}

inline const json& require_field(const json& obj, const char* key,
                                 const std::string& context) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InputError(context + "missing field '" + key + "'");
    }
    return obj.at(key);
}

inline std::int64_t require_int(const json& value, const std::string& context) {
    if (!value.is_number_integer()) {
        throw InputError(context + "expected an integer");
    }
    return value.get<std::int64_t>();
}

inline double require_number(const json& value, const std::string& context) {
    if (!value.is_number()) {
        throw InputError(context + "expected a number");
    }
    return value.get<double>();
}

inline std::string require_string(const json& value, const std::string& context) {
    if (!value.is_string()) {
        throw InputError(context + "expected a string");
    }
    return value.get<std::string>();
}

inline std::vector<int> require_index_list(const json& value,
                                           const std::string& context) {
    if (!value.is_array()) {
        throw InputError(context + "expected an array of qubit indices");
    }
    std::vector<int> indices;
    indices.reserve(value.size());
    for (const json& item : value) {
        const std::int64_t q = require_int(item, context);
        if (q < 0 || q > kMaxQubits) {
            throw InputError(context + "qubit index out of range");
        }
        indices.push_back(static_cast<int>(q));
    }
    return indices;
}

inline void reject_unknown_keys(const json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* candidate : allowed) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) throw InputError(context + "unknown field '" + key + "'");
    }
}

} // namespace io_detail

// ---------------------------------------------------------------------------
// Circuit files: {"qubits": int, "ops": [{"gate":...} | {"measure":[...]}]}

inline Circuit parse_circuit(const std::string& text) {
    using io_detail::json;
    const json doc = io_detail::parse_document(text);
    if (!doc.is_object()) throw InputError("circuit document must be an object");
    io_detail::reject_unknown_keys(doc, {"qubits", "ops"}, "");

    const std::int64_t qubits =
        io_detail::require_int(io_detail::require_field(doc, "qubits", ""), "qubits: ");
    if (qubits < 1 || qubits > kMaxQubits) {
        throw InputError("qubits must lie in [1, 64]");
    }
    const json& ops = io_detail::require_field(doc, "ops", "");
    if (!ops.is_array()) throw InputError("ops must be an array");

    Circuit circuit(static_cast<int>(qubits));
    std::size_t index = 0;
    for (const json& op : ops) {
        const std::string context = "ops[" + std::to_string(index++) + "]: ";
        if (!op.is_object()) throw InputError(context + "op must be an object");
        try {
            if (op.contains("gate")) {
                io_detail::reject_unknown_keys(
                    op, {"gate", "targets", "controls", "angle"}, context);
                const std::string name =
                    io_detail::require_string(op.at("gate"), context);
                const auto kind = gate_from_name(name);
                if (!kind) {
                    throw InputError(context + "unknown gate '" + name + "'");
                }
                Gate gate{*kind, {}, {}, 0.0};
                gate.targets = io_detail::require_index_list(
                    io_detail::require_field(op, "targets", context), context);
                if (op.contains("controls")) {
                    gate.controls =
                        io_detail::require_index_list(op.at("controls"), context);
                }
                if (is_parameterized(*kind)) {
                    gate.angle = io_detail::require_number(
                        io_detail::require_field(op, "angle", context), context);
                } else if (op.contains("angle")) {
                    throw InputError(context + "gate '" + name +
                                     "' does not take an angle");
                }
                circuit.gate(std::move(gate));
            } else if (op.contains("measure")) {
                io_detail::reject_unknown_keys(op, {"measure"}, context);
                circuit.measure(
                    io_detail::require_index_list(op.at("measure"), context));
            } else {
                throw InputError(context + "op needs a 'gate' or 'measure' field");
            }
        } catch (const InputError& e) {
            const std::string what = e.what();
            throw what.starts_with(context) ? e : InputError(context + what);
        }
    }
    return circuit;
}

/// Serializes a gate/measure circuit. Permutation ops have no file
/// representation and are rejected.
inline std::string serialize_circuit(const Circuit& circuit) {
    using io_detail::json;
    json ops = json::array();
    for (const CircuitOp& op : circuit.ops()) {
        if (const auto* gate_op = std::get_if<GateOp>(&op)) {
            json entry;
            entry["gate"] = std::string(gate_name(gate_op->gate.kind));
            entry["targets"] = gate_op->gate.targets;
            if (!gate_op->gate.controls.empty()) {
                entry["controls"] = gate_op->gate.controls;
            }
            if (is_parameterized(gate_op->gate.kind)) {
                entry["angle"] = gate_op->gate.angle;
            }
            ops.push_back(std::move(entry));
        } else if (const auto* measure_op = std::get_if<MeasureOp>(&op)) {
            ops.push_back(json{{"measure", measure_op->qubits}});
        } else {
            throw InputError(
                "permutation ops are not representable in the circuit file format");
        }
    }
    const json doc{{"qubits", circuit.num_qubits()}, {"ops", std::move(ops)}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Counts files: {"shots": int, "counts": {bitstring: int}}

inline Counts parse_counts(const std::string& text) {
    using io_detail::json;
    const json doc = io_detail::parse_document(text);
    if (!doc.is_object()) throw InputError("counts document must be an object");
    io_detail::reject_unknown_keys(doc, {"shots", "counts"}, "");

    const std::int64_t shots =
        io_detail::require_int(io_detail::require_field(doc, "shots", ""), "shots: ");
    if (shots < 1) throw InputError("shots must be >= 1");
    const json& table = io_detail::require_field(doc, "counts", "");
    if (!table.is_object()) throw InputError("counts must be an object");

    Counts counts;
    counts.shots = static_cast<std::uint64_t>(shots);
    std::size_t width = 0;
    std::uint64_t total = 0;
    for (const auto& [label, value] : table.items()) {
        label_to_index(label);  // validates the characters
        if (width == 0) {
            width = label.size();
        } else if (label.size() != width) {
            throw InputError("count labels must all have the same width");
        }
        const std::int64_t count = io_detail::require_int(value, "counts: ");
        if (count < 0) throw InputError("counts must be non-negative");
        counts.counts[label] = static_cast<std::uint64_t>(count);
        total += static_cast<std::uint64_t>(count);
    }
    if (total != counts.shots) {
        throw InputError("counts sum to " + std::to_string(total) +
                         " but shots is " + std::to_string(counts.shots));
    }
    return counts;
}

inline std::string serialize_counts(const Counts& counts) {
    using io_detail::json;
    json table = json::object();
    for (const auto& [label, count] : counts.counts) table[label] = count;
    const json doc{{"shots", counts.shots}, {"counts", std::move(table)}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Noise files:
// {"after_gate": [{"gate": "all"|name, "qubits": "all"|[int],
//                  "kind": channel, "strength": float}],
//  "readout_flip": float}

inline NoiseModel parse_noise_model(const std::string& text) {
    using io_detail::json;
    const json doc = io_detail::parse_document(text);
    if (!doc.is_object()) throw InputError("noise document must be an object");
    io_detail::reject_unknown_keys(doc, {"after_gate", "readout_flip"}, "");

    NoiseModel model;
    if (doc.contains("after_gate")) {
        const json& rules = doc.at("after_gate");
        if (!rules.is_array()) throw InputError("after_gate must be an array");
        std::size_t index = 0;
        for (const json& rule : rules) {
            const std::string context =
                "after_gate[" + std::to_string(index++) + "]: ";
            if (!rule.is_object()) {
                throw InputError(context + "rule must be an object");
            }
            io_detail::reject_unknown_keys(
                rule, {"gate", "qubits", "kind", "strength"}, context);

            GateNoise entry{std::nullopt, std::nullopt, Channel{}};
            if (rule.contains("gate")) {
                const std::string name =
                    io_detail::require_string(rule.at("gate"), context);
                if (name != "all") {
                    const auto kind = gate_from_name(name);
                    if (!kind) {
                        throw InputError(context + "unknown gate '" + name + "'");
                    }
                    entry.gate = *kind;
                }
            }
            if (rule.contains("qubits") &&
                !(rule.at("qubits").is_string() &&
                  rule.at("qubits").get<std::string>() == "all")) {
                entry.qubits = io_detail::require_index_list(rule.at("qubits"), context);
            }
            const std::string kind_name = io_detail::require_string(
                io_detail::require_field(rule, "kind", context), context);
            const auto kind = channel_from_name(kind_name);
            if (!kind) {
                throw InputError(context + "unknown channel '" + kind_name + "'");
            }
            entry.channel.kind = *kind;
            entry.channel.strength = io_detail::require_number(
                io_detail::require_field(rule, "strength", context), context);
            try {
                validate_channel(entry.channel);
            } catch (const InputError& e) {
                throw InputError(context + e.what());
            }
            model.after_gate.push_back(std::move(entry));
        }
    }
    if (doc.contains("readout_flip")) {
        model.readout_flip =
            io_detail::require_number(doc.at("readout_flip"), "readout_flip: ");
    }
    validate_noise_model(model);
    return model;
}

inline std::string serialize_noise_model(const NoiseModel& model) {
    using io_detail::json;
    json rules = json::array();
    for (const GateNoise& rule : model.after_gate) {
        json entry;
        entry["gate"] = rule.gate ? std::string(gate_name(*rule.gate)) : "all";
        if (rule.qubits) {
            entry["qubits"] = *rule.qubits;
        } else {
            entry["qubits"] = "all";
        }
        entry["kind"] = std::string(channel_name(rule.channel.kind));
        entry["strength"] = rule.channel.strength;
        rules.push_back(std::move(entry));
    }
    const json doc{{"after_gate", std::move(rules)},
                   {"readout_flip", model.readout_flip}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file '" + path.string() + "'");
    out << text;
}

} // namespace qlab

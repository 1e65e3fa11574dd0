#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "qlab/io.hpp"
#include "test_helpers.hpp"

using namespace qlab;
using Catch::Approx;

TEST_CASE("parse_circuit accepts the documented format") {
    const std::string text = R"({"qubits":2,"ops":[
        {"gate":"h","targets":[0]},
        {"gate":"x","targets":[1],"controls":[0]},
        {"measure":[0,1]}]})";
    const Circuit circuit = parse_circuit(text);
    REQUIRE(circuit.num_qubits() == 2);
    REQUIRE(circuit.ops().size() == 3);

    const auto& first = std::get<GateOp>(circuit.ops()[0]);
    REQUIRE(first.gate.kind == GateKind::H);
    REQUIRE(first.gate.targets == std::vector<int>{0});

    const auto& second = std::get<GateOp>(circuit.ops()[1]);
    REQUIRE(second.gate.kind == GateKind::X);
    REQUIRE(second.gate.controls == std::vector<int>{0});

    REQUIRE(std::get<MeasureOp>(circuit.ops()[2]).qubits ==
            std::vector<int>{0, 1});
}

TEST_CASE("parse_circuit reads angles in radians") {
    const Circuit circuit = parse_circuit(
        R"({"qubits":1,"ops":[{"gate":"rz","targets":[0],"angle":0.7853981633974483}]})");
    const auto& op = std::get<GateOp>(circuit.ops()[0]);
    REQUIRE(op.gate.kind == GateKind::RZ);
    REQUIRE(op.gate.angle == Approx(0.7853981633974483).margin(0.0));
}

TEST_CASE("parse_circuit rejects malformed documents with context") {
    auto error_of = [](const std::string& text) {
        try {
            parse_circuit(text);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("(no error)");
    };

    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"frobnicate","targets":[0]}]})")
                .find("unknown gate 'frobnicate'") != std::string::npos);
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"frobnicate","targets":[0]}]})")
                .find("ops[0]") != std::string::npos);
    REQUIRE(error_of(R"({"qubits":2,"ops":[{"gate":"h","targets":[5]}]})")
                .find("ops[0]") != std::string::npos);
    REQUIRE(error_of("") != "(no error)");
    REQUIRE(error_of("{") != "(no error)");
    REQUIRE(error_of("[]") != "(no error)");
    REQUIRE(error_of(R"({"qubits":0,"ops":[]})") != "(no error)");
    REQUIRE(error_of(R"({"qubits":1})") != "(no error)");
    REQUIRE(error_of(R"({"qubits":1,"ops":[{}]})") != "(no error)");
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"h"}]})") != "(no error)");
    // Angle presence must match the gate kind.
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"rz","targets":[0]}]})") !=
            "(no error)");
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"h","targets":[0],"angle":1.0}]})") !=
            "(no error)");
    // Unknown fields are rejected.
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"h","targets":[0],"blah":1}]})") !=
            "(no error)");
    // Gate after measurement violates terminality.
    REQUIRE(error_of(
                R"({"qubits":1,"ops":[{"measure":[0]},{"gate":"h","targets":[0]}]})") !=
            "(no error)");
    // Fractional qubit counts and indices are not integers.
    REQUIRE(error_of(R"({"qubits":1.5,"ops":[]})") != "(no error)");
    REQUIRE(error_of(R"({"qubits":1,"ops":[{"gate":"h","targets":[0.5]}]})") !=
            "(no error)");
}

TEST_CASE("serialize then parse is the identity on the op list") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        Circuit circuit = testutil::random_circuit(4, 15, rng);
        if (trial % 2 == 0) circuit.measure({0, 2});
        const std::string text = serialize_circuit(circuit);
        const Circuit parsed = parse_circuit(text);

        REQUIRE(parsed.num_qubits() == circuit.num_qubits());
        REQUIRE(parsed.ops().size() == circuit.ops().size());
        for (std::size_t i = 0; i < circuit.ops().size(); ++i) {
            if (const auto* gate_op = std::get_if<GateOp>(&circuit.ops()[i])) {
                const auto& round = std::get<GateOp>(parsed.ops()[i]);
                REQUIRE(round.gate.kind == gate_op->gate.kind);
                REQUIRE(round.gate.targets == gate_op->gate.targets);
                REQUIRE(round.gate.controls == gate_op->gate.controls);
                if (is_parameterized(gate_op->gate.kind)) {
                    REQUIRE(round.gate.angle == gate_op->gate.angle);
                }
            } else {
                REQUIRE(std::get<MeasureOp>(parsed.ops()[i]).qubits ==
                        std::get<MeasureOp>(circuit.ops()[i]).qubits);
            }
        }
        // Serialized form is a fixed point.
        REQUIRE(serialize_circuit(parsed) == text);
    }
}

TEST_CASE("permutation ops cannot be serialized") {
    Circuit circuit(1);
    circuit.permutation(PermutationOp("id", {0}, {0, 1}));
    REQUIRE_THROWS_AS(serialize_circuit(circuit), InputError);
}

TEST_CASE("counts files round trip and validate") {
    Counts counts;
    counts.shots = 10;
    counts.counts = {{"00", 4}, {"11", 6}};
    const std::string text = serialize_counts(counts);
    const Counts parsed = parse_counts(text);
    REQUIRE(parsed.shots == 10);
    REQUIRE(parsed.counts == counts.counts);

    REQUIRE_THROWS_AS(parse_counts(R"({"shots":5,"counts":{"00":4}})"), InputError);
    REQUIRE_THROWS_AS(parse_counts(R"({"shots":4,"counts":{"00":4,"111":0}})"),
                      InputError);
    REQUIRE_THROWS_AS(parse_counts(R"({"shots":4,"counts":{"0x":4}})"), InputError);
    REQUIRE_THROWS_AS(parse_counts(R"({"shots":0,"counts":{}})"), InputError);
    REQUIRE_THROWS_AS(parse_counts(R"({"counts":{}})"), InputError);
    REQUIRE_THROWS_AS(parse_counts("nonsense"), InputError);
}

TEST_CASE("noise files parse the documented format") {
    const std::string text = R"({
        "after_gate": [
            {"gate": "all", "qubits": "all", "kind": "bit_flip", "strength": 0.1},
            {"gate": "x", "qubits": [0, 2], "kind": "amplitude_damping", "strength": 0.3}
        ],
        "readout_flip": 0.02})";
    const NoiseModel model = parse_noise_model(text);
    REQUIRE(model.after_gate.size() == 2);
    REQUIRE_FALSE(model.after_gate[0].gate.has_value());
    REQUIRE_FALSE(model.after_gate[0].qubits.has_value());
    REQUIRE(model.after_gate[0].channel.kind == ChannelKind::BitFlip);
    REQUIRE(model.after_gate[0].channel.strength == Approx(0.1));
    REQUIRE(model.after_gate[1].gate == GateKind::X);
    REQUIRE(model.after_gate[1].qubits == std::vector<int>{0, 2});
    REQUIRE(model.readout_flip == Approx(0.02));

    // Round trip through the serializer.
    const NoiseModel again = parse_noise_model(serialize_noise_model(model));
    REQUIRE(again.after_gate.size() == 2);
    REQUIRE(again.readout_flip == model.readout_flip);

    const NoiseModel empty = parse_noise_model("{}");
    REQUIRE(empty.empty());
}

TEST_CASE("noise files reject invalid inputs") {
    REQUIRE_THROWS_AS(
        parse_noise_model(
            R"({"after_gate":[{"kind":"bit_flip","strength":1.5}]})"),
        InputError);
    REQUIRE_THROWS_AS(
        parse_noise_model(R"({"after_gate":[{"kind":"sideways","strength":0.1}]})"),
        InputError);
    REQUIRE_THROWS_AS(
        parse_noise_model(R"({"after_gate":[{"strength":0.1}]})"), InputError);
    REQUIRE_THROWS_AS(parse_noise_model(R"({"readout_flip":-0.1})"), InputError);
    REQUIRE_THROWS_AS(parse_noise_model(R"({"readout":0.1})"), InputError);
    REQUIRE_THROWS_AS(parse_noise_model("["), InputError);
}

TEST_CASE("read_file reports missing files") {
    REQUIRE_THROWS_AS(read_file("/nonexistent/qlab/file.json"), InputError);
}

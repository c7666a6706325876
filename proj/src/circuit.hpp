#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gf2.hpp"

namespace morphbb {

enum class Op : uint8_t {
    CX,
    MX,
    MZ,
    RX,
    RZ,
    TICK,
    X_ERROR,
    Z_ERROR,
    DEPOLARIZE2,
    DETECTOR,
    OBSERVABLE_INCLUDE,
};

const char* op_name(Op op);

struct Instruction {
    Op op;
    double p = 0.0;          // channel strength / measurement flip probability
    int64_t index = -1;      // observable index for OBSERVABLE_INCLUDE
    std::vector<uint32_t> qubits;  // targets; interpreted pairwise for CX/DEPOLARIZE2
    std::vector<int32_t> recs;     // negative measurement back-references

    bool operator==(const Instruction& o) const {
        return op == o.op && p == o.p && index == o.index && qubits == o.qubits && recs == o.recs;
    }
};

// Timed instruction list with deterministic text serialization. Measurement
// records are numbered in target order across MX/MZ instructions.
struct Circuit {
    std::size_t n_qubits = 0;
    std::vector<std::string> qubit_labels;  // empty or size n_qubits
    std::vector<Instruction> instructions;

    void ensure_qubits(std::size_t n) { if (n > n_qubits) n_qubits = n; }
    void cx(uint32_t c, uint32_t t) { instructions.push_back({Op::CX, 0, -1, {c, t}, {}}); ensure_qubits(std::max(c, t) + 1); }
    void tick() { instructions.push_back({Op::TICK, 0, -1, {}, {}}); }
    void append(Op op, std::vector<uint32_t> qs, double p = 0.0);
    void detector(std::vector<int32_t> recs) { instructions.push_back({Op::DETECTOR, 0, -1, {}, std::move(recs)}); }
    void observable(int64_t idx, std::vector<int32_t> recs) {
        instructions.push_back({Op::OBSERVABLE_INCLUDE, 0, idx, {}, std::move(recs)});
    }

    std::size_t count_measurements() const;
    std::size_t count_detectors() const;
    std::size_t count_observables() const;  // 1 + max index, 0 if none

    // Number of TICK-delimited layers containing at least one CX.
    std::size_t cx_layer_count() const;

    // Reset-basis discipline: a measured qubit must be reset before it is
    // used again by a gate or measurement; rec refs must point backwards in range.
    void validate() const;

    std::string to_text() const;
    static Circuit from_text(const std::string& text);

    bool operator==(const Circuit& o) const {
        return n_qubits == o.n_qubits && instructions == o.instructions;
    }
};

}  // namespace morphbb

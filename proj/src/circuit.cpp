#include "circuit.hpp"

#include <cstdio>
#include <sstream>

#include "util.hpp"

namespace morphbb {

const char* op_name(Op op) {
    switch (op) {
        case Op::CX: return "CX";
        case Op::MX: return "MX";
        case Op::MZ: return "MZ";
        case Op::RX: return "RX";
        case Op::RZ: return "RZ";
        case Op::TICK: return "TICK";
        case Op::X_ERROR: return "X_ERROR";
        case Op::Z_ERROR: return "Z_ERROR";
        case Op::DEPOLARIZE2: return "DEPOLARIZE2";
        case Op::DETECTOR: return "DETECTOR";
        case Op::OBSERVABLE_INCLUDE: return "OBSERVABLE_INCLUDE";
    }
    return "?";
}

void Circuit::append(Op op, std::vector<uint32_t> qs, double p) {
    Instruction ins{op, p, -1, std::move(qs), {}};
    for (uint32_t q : ins.qubits) ensure_qubits(q + 1);
    instructions.push_back(std::move(ins));
}

std::size_t Circuit::count_measurements() const {
    std::size_t n = 0;
    for (const auto& ins : instructions)
        if (ins.op == Op::MX || ins.op == Op::MZ) n += ins.qubits.size();
    return n;
}

std::size_t Circuit::count_detectors() const {
    std::size_t n = 0;
    for (const auto& ins : instructions)
        if (ins.op == Op::DETECTOR) n++;
    return n;
}

std::size_t Circuit::count_observables() const {
    int64_t mx = -1;
    for (const auto& ins : instructions)
        if (ins.op == Op::OBSERVABLE_INCLUDE) mx = std::max(mx, ins.index);
    return static_cast<std::size_t>(mx + 1);
}

std::size_t Circuit::cx_layer_count() const {
    std::size_t layers = 0;
    bool layer_has_cx = false;
    for (const auto& ins : instructions) {
        if (ins.op == Op::TICK) {
            if (layer_has_cx) layers++;
            layer_has_cx = false;
        } else if (ins.op == Op::CX) {
            layer_has_cx = true;
        }
    }
    if (layer_has_cx) layers++;
    return layers;
}

void Circuit::validate() const {
    std::vector<uint8_t> awaiting_reset(n_qubits, 0);
    std::size_t n_meas = 0;
    for (const auto& ins : instructions) {
        switch (ins.op) {
            case Op::CX:
            case Op::DEPOLARIZE2:
                if (ins.qubits.size() % 2 != 0) throw error("two-qubit op needs an even target count");
                for (uint32_t q : ins.qubits)
                    if (awaiting_reset[q])
                        throw invalid_state_error("qubit " + std::to_string(q) + " reused without reset");
                break;
            case Op::MX:
            case Op::MZ:
                for (uint32_t q : ins.qubits) {
                    if (awaiting_reset[q])
                        throw invalid_state_error("qubit " + std::to_string(q) + " measured twice without reset");
                    awaiting_reset[q] = 1;
                }
                n_meas += ins.qubits.size();
                break;
            case Op::RX:
            case Op::RZ:
                for (uint32_t q : ins.qubits) awaiting_reset[q] = 0;
                break;
            case Op::X_ERROR:
            case Op::Z_ERROR:
            case Op::TICK:
                break;
            case Op::DETECTOR:
            case Op::OBSERVABLE_INCLUDE:
                for (int32_t r : ins.recs)
                    if (r >= 0 || static_cast<std::size_t>(-r) > n_meas)
                        throw error("rec reference out of range");
                break;
        }
    }
}

static std::string format_prob(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", p);
    return buf;
}

std::string Circuit::to_text() const {
    std::ostringstream out;
    if (!qubit_labels.empty()) {
        for (std::size_t q = 0; q < qubit_labels.size(); q++)
            out << "# qubit " << q << " " << qubit_labels[q] << "\n";
    }
    for (const auto& ins : instructions) {
        out << op_name(ins.op);
        if (ins.op == Op::OBSERVABLE_INCLUDE) out << "(" << ins.index << ")";
        else if (ins.p != 0.0) out << "(" << format_prob(ins.p) << ")";
        for (uint32_t q : ins.qubits) out << " " << q;
        for (int32_t r : ins.recs) out << " rec[" << r << "]";
        out << "\n";
    }
    return out.str();
}

Circuit Circuit::from_text(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::size_t i = 0;
        while (i < line.size() && isspace(static_cast<unsigned char>(line[i]))) i++;
        if (i >= line.size()) continue;
        if (line[i] == '#') {
            // "# qubit <idx> <label>" comments restore the qubit map
            std::istringstream cs(line.substr(i + 1));
            std::string word;
            if (cs >> word && word == "qubit") {
                std::size_t idx;
                std::string label;
                if (cs >> idx && cs >> label) {
                    if (c.qubit_labels.size() <= idx) c.qubit_labels.resize(idx + 1);
                    c.qubit_labels[idx] = label;
                    c.ensure_qubits(idx + 1);
                }
            }
            continue;
        }
        std::string name;
        while (i < line.size() && (isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
            name += line[i++];
        Instruction ins;
        ins.op = Op::TICK;
        bool found = false;
        for (Op op : {Op::CX, Op::MX, Op::MZ, Op::RX, Op::RZ, Op::TICK, Op::X_ERROR, Op::Z_ERROR,
                      Op::DEPOLARIZE2, Op::DETECTOR, Op::OBSERVABLE_INCLUDE}) {
            if (name == op_name(op)) { ins.op = op; found = true; break; }
        }
        if (!found) throw parse_error("line " + std::to_string(lineno) + ": unknown instruction '" + name + "'");
        ins.p = 0.0;
        ins.index = -1;
        if (i < line.size() && line[i] == '(') {
            std::size_t close = line.find(')', i);
            if (close == std::string::npos) throw parse_error("line " + std::to_string(lineno) + ": missing ')'");
            std::string arg = line.substr(i + 1, close - i - 1);
            if (ins.op == Op::OBSERVABLE_INCLUDE) ins.index = std::stoll(arg);
            else ins.p = std::stod(arg);
            i = close + 1;
        }
        std::istringstream rest(line.substr(i));
        std::string tok;
        while (rest >> tok) {
            if (tok.rfind("rec[", 0) == 0) {
                if (tok.back() != ']') throw parse_error("line " + std::to_string(lineno) + ": bad rec token");
                ins.recs.push_back(static_cast<int32_t>(std::stol(tok.substr(4, tok.size() - 5))));
            } else {
                ins.qubits.push_back(static_cast<uint32_t>(std::stoul(tok)));
            }
        }
        for (uint32_t q : ins.qubits) c.ensure_qubits(q + 1);
        if (ins.op == Op::OBSERVABLE_INCLUDE && ins.index < 0)
            throw parse_error("line " + std::to_string(lineno) + ": OBSERVABLE_INCLUDE needs an index");
        c.instructions.push_back(std::move(ins));
    }
    if (!c.qubit_labels.empty()) c.qubit_labels.resize(c.n_qubits);
    return c;
}

}  // namespace morphbb

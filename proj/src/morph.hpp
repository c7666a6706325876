#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bga.hpp"
#include "circuit.hpp"
#include "group.hpp"
#include "tableau.hpp"

namespace morphbb {

enum class Variant { standard, reverse_round3, reverse_round2 };

Variant parse_variant(const std::string& s);
const char* variant_name(Variant v);

struct ContractingSets {
    uint32_t a1 = 0, b1 = 0;
    GroupSubset gx1, gz1, gx2, gz2;
};

// a1/b1 are the elements of A/B that f maps to the opposite value from the
// other elements; the contracting cosets follow from them.
ContractingSets contracting_sets(const BgaCode& code, const Homomorphism& hom);

struct CriteriaReport {
    bool x_ok = false, xz_ok = false, z_ok = false;
    std::string first_counterexample;
    bool all_ok() const { return x_ok && xz_ok && z_ok; }
};

// The three sufficient conditions for simultaneous contraction: no contracting
// X-stabilizer may expand another contracting X (X-criterion), no contracting
// X may clash with a contracting Z (XZ-criterion), and dually (Z-criterion).
// The a1/b1 labels in `sets` fix the contraction circuit structure being tested.
CriteriaReport check_contract_criteria(const BgaCode& code, const ContractingSets& sets);

struct NoiseParams {
    double p = 0.0;
};

struct MeasureSite {
    uint32_t qubit;   // global qubit index
    bool x_basis;
};

using CnotRound = std::vector<std::pair<uint32_t, uint32_t>>;

struct MorphingProtocol {
    BgaCode code;
    Homomorphism hom;
    Variant variant = Variant::standard;
    uint32_t a1 = 0, b1 = 0;
    std::vector<uint32_t> a_rest, b_rest;  // (a2, a3, ...), (b2, b3, ...) in spec order
    GroupSubset kernel, cokernel;
    ContractingSets sets;
    CnotRound rounds[2][8];  // rounds[i-1][r]: CNOT layer r of F_{i}
    std::size_t n_rounds = 0;
    std::vector<MeasureSite> m_sites[2];  // M_1, M_2
    bool measures_left = false;           // reverse_round3 measures the left qubits

    std::size_t n_qubits() const { return code.n; }
    Circuit f_circuit(int index) const;  // CX+TICK fragment for F_index
    std::vector<uint32_t> data_qubits(int index) const;
    const std::vector<MeasureSite>& measure_sites(int index) const { return m_sites[index - 1]; }
    std::string summary_json() const;
};

MorphingProtocol build_protocol(const BgaCode& code, const Homomorphism& hom, Variant variant);

struct VerifyReport {
    bool ok = false;
    std::string detail;  // failure description, empty when ok
    std::size_t end_cycle_rank[2] = {0, 0};
};

// Checks, for both contraction circuits: every contracting stabilizer lands on
// a single qubit measured in the matching basis; every expanding stabilizer
// commutes with all measurements; the end-cycle group has rank n~ - k.
VerifyReport verify_contraction(const MorphingProtocol& protocol);

struct EndCycleCode {
    int index = 1;
    bool on_right = false;
    std::vector<GroupSubset> x_gen_support, z_gen_support;  // parent labels on the data side
    std::size_t n_tilde = 0, k_tilde = 0;

    // data-qubit ordering: kernel block first, then the r-shifted block
    std::vector<std::size_t> qubit_map;  // local data index -> protocol qubit index
    BitMat hx, hz;                       // generators in local ordering

    // 2BGA rewriting over the kernel subgroup (standard / reverse_round3)
    bool has_2bga = false;
    SubgroupDecomposition kdec;
    uint32_t relabel_r = 0;
    GroupSubset a_tilde, b_tilde;  // subsets of kdec.sub
    BgaCode rebuilt;

    CssCode css() const;
};

EndCycleCode end_cycle_code(const MorphingProtocol& protocol, int index);

// Pushes a mid-cycle (possibly trivial) logical operator through M_i o F_i.
// The operator must satisfy the mid-cycle logical condition (BP + AQ = 0 for
// X-type, A^-1 P + B^-1 Q = 0 for Z-type).
PauliOperator propagate_logical_mid_to_end(const MorphingProtocol& protocol, int index,
                                           const PauliOperator& op);

// c_i = max weight of F_i^dag P F_i over single-qubit Paulis P off the
// measured qubits; the end-cycle distance obeys d~ >= d / c_i.
int distance_bound_factor(const MorphingProtocol& protocol, int index);

// One QEC round from C~_i to C~_{i+1}: R_i, F_i^dag, F_{i+1}, M_{i+1},
// with TICK-separated CNOT layers and the uniform depolarizing model inserted
// when noise is given.
Circuit qec_round_circuit(const MorphingProtocol& protocol, int start_index,
                          const std::optional<NoiseParams>& noise);

enum class ShiftType { A, B };

struct ShiftCircuit {
    Circuit circuit;
    uint32_t shift_element = 0;  // a_i a_j^-1 or b_i b_j^-1
    bool advances_index = false; // shift element lies in K^c
};

// Fault-tolerant relabeling q(L,g) -> q(L, a_i a_j^-1 g) (A-type) or
// b_i b_j^-1 (B-type) built from two SWAP layers over connectivity edges.
// Each SWAP is realized as two CNOTs against a freshly reset ancilla.
ShiftCircuit shift_automorphism_circuit(const MorphingProtocol& protocol, ShiftType type,
                                        int i, int j);

// Stabilizer group at the mid-point of a QEC round (after R_i and F_i^dag from
// the end-cycle code C~_i) equals the mid-cycle code's group.
bool midpoint_matches_mid_cycle(const MorphingProtocol& protocol, int index);

}  // namespace morphbb

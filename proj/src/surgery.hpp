#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "morph.hpp"
#include "tableau.hpp"

namespace morphbb {

struct LogicalSupportReport {
    bool pass_a = false;      // every Z-check overlaps the logical on <= 2 qubits
    bool pass_b = false;      // never on the pair (q(L,b1^-1 g), q(R,a1^-1 g))
    uint32_t witness = 0;     // violating g when a check fails
    bool ok() const { return pass_a && pass_b; }
};

// Criterion on the X-logical being measured: needed for the linking code's
// weight-4 Z-stabilizers to exist.
LogicalSupportReport check_logical_support_criterion(const MorphingProtocol& protocol,
                                                     const PauliOperator& op);

// Qubit layout of the combined BB + linking system. The BB block keeps its
// own indices [0, 2l); linking qubits follow: primal-left, primal-right, then
// the dual layers rho = 1/2, 3/2, ..., r-1/2.
struct SurgeryLayout {
    std::size_t n_bb = 0;
    int r = 0;
    std::vector<uint32_t> p_elems, q_elems, h_elems;  // group labels in index order
    std::vector<uint32_t> p_pos, q_pos, h_pos;        // group element -> list position (or UINT32_MAX)
    std::size_t primal_left0 = 0, primal_right0 = 0, dual0 = 0, total = 0;

    // rho = 1..r for primal, layer = 0..r-1 encodes dual rho = layer + 1/2
    uint32_t pl(int rho, uint32_t p) const;
    uint32_t pr(int rho, uint32_t q) const;
    uint32_t dual(int layer, uint32_t h) const;
    std::string label(uint32_t qubit, const Group& g) const;
};

struct SurgeryStabilizer {
    PauliBits op;
    std::string name;
    uint32_t elem = 0;  // group label parameter
    int layer2 = 0;     // 2*rho to keep half-integers exact
};

struct LinkingCode {
    SurgeryLayout lay;
    GroupSubset P, Q, H, Htilde;
    std::vector<SurgeryStabilizer> x_stabs;        // left/right X-stabilizers
    std::vector<SurgeryStabilizer> z_stabs;        // type-1/2 Z-stabilizers (rho >= 1)
    std::vector<SurgeryStabilizer> ancillary_z;    // single-qubit Z on the rho=1/2 layer
    PauliBits x_logical, z_logical;                // Xbar_link (rho=1), vertical Zbar_link
};

LinkingCode build_linking_code(const MorphingProtocol& protocol, const PauliOperator& op, int r);

struct MergedCode {
    std::vector<SurgeryStabilizer> x_stabs;        // BB X + linking X + interface X
    std::vector<SurgeryStabilizer> z_stabs;        // BB Z off H + merged Z + linking Z
    std::vector<SurgeryStabilizer> interface_x;    // s(X,1/2,L,p) and s(X,1/2,R,q)
    std::vector<SurgeryStabilizer> merged_z;       // weight-7 s(Z,0,h)
    PauliBits xx_logical;                          // Xbar_link Xbar_BB at mid-cycle
};

MergedCode build_merged_code(const MorphingProtocol& protocol, const LinkingCode& link);

struct LatticeSurgeryReport {
    bool a = false, b = false, c = false;
    bool ok() const { return a && b && c; }
};

// Criterion: (a) the measured logical lies in the merged stabilizer group,
// (b) every split X-stabilizer lies in the merged group, (c) every merged
// Z-stabilizer is a product of split Z-stabilizers and single-Z operators on
// the interface qubits.
LatticeSurgeryReport check_lattice_surgery_criteria(const std::vector<PauliBits>& split_x,
                                                    const std::vector<PauliBits>& split_z,
                                                    const std::vector<PauliBits>& merged_x,
                                                    const std::vector<PauliBits>& merged_z,
                                                    const std::vector<uint32_t>& interface_qubits,
                                                    const PauliBits& logical,
                                                    std::size_t n_qubits);

using GateList = std::vector<std::pair<uint32_t, uint32_t>>;

struct SurgeryProtocol {
    MorphingProtocol bb;  // the BB code's own morphing protocol
    LinkingCode link;
    MergedCode merged;
    // executable CNOT rounds (greedy coloring of the commuting steps)
    std::vector<CnotRound> link_rounds[2];
    std::vector<MeasureSite> link_m[2];
    std::vector<CnotRound> merged_rounds[2];
    std::vector<MeasureSite> merged_m[2];
    std::vector<uint32_t> interface_data[2];  // unmeasured rho=1/2 qubits per circuit

    std::size_t n_qubits() const { return link.lay.total; }
    Circuit merged_round_circuit(int start_index) const;  // R_i, F_i^dag, F_{i+1}, M_{i+1}
    Circuit split_round_circuit(int start_index) const;   // BB and linking blocks in parallel
};

SurgeryProtocol build_surgery_protocol(const MorphingProtocol& protocol, const LinkingCode& link,
                                       const MergedCode& merged);

struct ContractionClassification {
    std::vector<int> role;  // per stabilizer: 1/2 = contracted by F_1/F_2, 3 = both, 0 = neither
    bool every_contracted = false;
    bool expanding_commute[2] = {false, false};
    std::size_t end_rank[2] = {0, 0};
    std::string detail;
    bool ok(std::size_t want_rank1, std::size_t want_rank2) const {
        return every_contracted && expanding_commute[0] && expanding_commute[1] &&
               end_rank[0] == want_rank1 && end_rank[1] == want_rank2;
    }
};

// Propagates every stabilizer through both contraction circuits and classifies
// it as contracted (single matching-basis measurement) or expanding (commutes
// with every measurement); also reports the end-cycle group ranks.
ContractionClassification classify_contraction(const std::vector<SurgeryStabilizer>& stabs,
                                               const std::vector<CnotRound> rounds[2],
                                               const std::vector<MeasureSite> msites[2],
                                               std::size_t n_qubits);

// End-cycle generators of a contraction protocol: the expanding stabilizers
// propagated through F_index and restricted to the unmeasured qubits.
std::vector<PauliBits> end_cycle_rows(const std::vector<SurgeryStabilizer>& stabs,
                                      const std::vector<CnotRound>& rounds,
                                      const std::vector<MeasureSite>& msites,
                                      std::size_t n_qubits);

// Pushes an operator commuting with the measurements to the end-cycle frame.
PauliBits end_cycle_restrict(const PauliBits& op, const std::vector<CnotRound>& rounds,
                             const std::vector<MeasureSite>& msites);

struct ScheduleOutcome {
    bool deterministic = false;
    bool inferred_value = false;   // X_link X_BB from the contracted interface outcomes
    bool direct_value = false;     // direct tableau measurement on the initial state
    bool split_restored = false;   // split stabilizers deterministic after M_int
    bool consistent() const { return deterministic && inferred_value == direct_value && split_restored; }
};

// Runs the noiseless schedule split -> R_int -> merged x2 rounds -> M_int ->
// split on a Bell-like state of the two measured logicals (optionally with the
// X X eigenvalue flipped) and infers the logical outcome per the contracted
// interface X-stabilizer rule.
ScheduleOutcome run_surgery_schedule(const SurgeryProtocol& sp, bool flip_xx);

int merged_distance_bound_factor(const SurgeryProtocol& sp, int index);


}  // namespace morphbb

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gf2.hpp"
#include "group.hpp"

namespace morphbb {

// CSS Pauli operator on the 2|G| qubits of a 2BGA code, stored as group
// subsets: q(L,g) carries X iff g in x_left, etc.
struct PauliOperator {
    GroupSubset x_left, x_right, z_left, z_right;

    static PauliOperator x_op(const GroupSubset& p, const GroupSubset& q) {
        return PauliOperator{p, q, GroupSubset(p.n), GroupSubset(p.n)};
    }
    static PauliOperator z_op(const GroupSubset& p, const GroupSubset& q) {
        return PauliOperator{GroupSubset(p.n), GroupSubset(p.n), p, q};
    }
    bool is_x_type() const { return !z_left.any() && !z_right.any(); }
    bool is_z_type() const { return !x_left.any() && !x_right.any(); }
    std::size_t weight() const;
};

// CSS code built from (G, A, B) with Hx = (A|B), Hz = (B^T|A^T).
// Qubits are indexed L block [0, l), R block [l, 2l) by element index.
struct BgaCode {
    Group group;
    GroupSubset A, B;
    std::vector<uint32_t> a_order, b_order;  // element order as specified (matters for round-2 reversal)
    BitMat hx, hz;  // l x 2l
    std::size_t n = 0;
    std::size_t k = 0;

    std::size_t l() const { return group.order; }
    std::size_t qubit(bool right, uint32_t g) const { return (right ? group.order : 0) + g; }

    // stabilizer generators s(X,g) = X(Ag, Bg), s(Z,g) = Z(B^-1 g, A^-1 g)
    BitVec x_row(uint32_t g) const;
    BitVec z_row(uint32_t g) const;
    PauliOperator x_stabilizer(uint32_t g) const;
    PauliOperator z_stabilizer(uint32_t g) const;

    BitVec support_bits_x(const PauliOperator& op) const;  // X-part as length-n vector
    BitVec support_bits_z(const PauliOperator& op) const;
    PauliOperator x_op_from_bits(const BitVec& v) const;
    PauliOperator z_op_from_bits(const BitVec& v) const;
};

struct LogicalBasis {
    std::vector<PauliOperator> x;  // X-type representatives, one per logical
    std::vector<PauliOperator> z;  // paired so <x_i, z_j> = delta_ij
    std::size_t size() const { return x.size(); }
};

BgaCode build_code(const Group& group, const GroupSubset& A, const GroupSubset& B);
BgaCode build_code_named(const std::vector<int>& orders, const std::vector<std::string>& A,
                         const std::vector<std::string>& B);

LogicalBasis logical_basis(const BgaCode& code);

// Plain CSS code view for derived codes that are not in 2BGA shape.
struct CssCode {
    BitMat hx, hz;
    std::size_t n = 0, k = 0;
};
CssCode make_css(BitMat hx, BitMat hz);

struct CssLogicals {
    std::vector<BitVec> x, z;  // paired representatives, <x_i, z_j> = delta_ij
};
CssLogicals css_logical_basis(const CssCode& css);

// orbit_split >= 0 asserts a transitive shift symmetry on the two qubit blocks
// [0, split) and [split, n), which prunes the support enumeration; pass -1 for
// a plain exhaustive search.
std::optional<int> distance_exact_css(const CssCode& css, int max_weight, long orbit_split);
int distance_upper_css(const CssCode& css, int trials, uint64_t seed);
std::size_t min_stabilizer_weight_css(const CssCode& css);

// Smallest weight w <= max_weight of a nontrivial X-logical, or nullopt when
// none exists (certifying d > max_weight). Searches only the X side; for
// Abelian 2BGA codes d_X = d_Z. Prunes by the shift symmetry of the code.
std::optional<int> distance_exact(const BgaCode& code, int max_weight);

// Randomized information-set upper bound on d (weight of lightest logical
// found over the trial budget). Reproducible for a fixed seed.
int distance_upper(const BgaCode& code, int trials, uint64_t seed);

// Minimum weight over the nontrivial elements of the stabilizer group
// (X group and Z group enumerated exhaustively; requires rank <= 26).
std::size_t min_stabilizer_weight(const BgaCode& code);

struct TannerDegrees {
    std::vector<std::size_t> x_check_weights, z_check_weights;
    std::vector<std::size_t> qubit_degrees;  // Hx column degree + Hz column degree
};
TannerDegrees tanner_degrees(const BgaCode& code);

// CPLEX LP text for the distance program: minimize sum x_i subject to
// Hz x + 2y = 0, Zbar x + 2z = 1, x binary, y/z free integers.
std::string export_ilp(const BgaCode& code, const PauliOperator& logical_z);

// Code equivalence transform A -> phi(ra A), B -> phi(rb B) for an
// automorphism phi given as an index map on the group.
BgaCode relabel_code(const BgaCode& code, uint32_t ra, uint32_t rb,
                     const std::vector<uint32_t>& phi);

bool is_x_logical(const BgaCode& code, const PauliOperator& op);        // commutes with Hz, not in rowspace(Hx)
bool commutes_with_z_checks(const BgaCode& code, const PauliOperator& op);
bool commutes_with_x_checks(const BgaCode& code, const PauliOperator& op);

}  // namespace morphbb

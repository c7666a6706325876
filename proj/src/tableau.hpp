#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "circuit.hpp"
#include "gf2.hpp"

namespace morphbb {

struct PauliBits {
    BitVec x, z;

    PauliBits() = default;
    explicit PauliBits(std::size_t n) : x(n), z(n) {}
    std::size_t n_qubits() const { return x.n; }
    bool identity() const { return !x.any() && !z.any(); }
    std::size_t weight() const {
        std::size_t w = 0;
        for (std::size_t i = 0; i < x.w.size(); i++)
            w += static_cast<std::size_t>(__builtin_popcountll(x.w[i] | z.w[i]));
        return w;
    }
    bool anticommutes(const PauliBits& o) const { return x.dot(o.z) ^ z.dot(o.x); }
    bool operator==(const PauliBits& o) const { return x == o.x && z == o.z; }
};

// Conjugates a Pauli through the unitary part of a circuit fragment
// (Heisenberg picture, P -> U P U^dag for the fragment read forwards).
// Raises unsupported_fragment_error on measurements or resets.
PauliBits heisenberg_propagate(const Circuit& fragment, PauliBits p,
                               std::size_t first = 0, std::size_t last = SIZE_MAX);
// P -> U^dag P U (propagation through the inverted fragment).
PauliBits heisenberg_propagate_inverse(const Circuit& fragment, PauliBits p,
                                       std::size_t first = 0, std::size_t last = SIZE_MAX);

// How a measurement outcome relates to earlier ones in the noiseless circuit.
struct OutcomeExpr {
    bool known = false;              // false: genuinely random
    bool hidden = false;             // depends on a discarded reset bit
    bool constant = false;           // noiseless value when known and not hidden
    std::vector<uint32_t> records;   // earlier record indices whose XOR enters the value

    bool deterministic() const { return known && !hidden; }
};

// Stabilizer simulation with symbolic measurement outcomes. Rows are
// (-1)^(sign + sum of symbols) X^x Z^z; each random measurement mints a
// symbol, so any later deterministic outcome is reported as an affine
// expression over earlier measurement records. Also supports "tracked" Pauli
// rows (logical representatives) that are carried through measurements by
// multiplying in measured stabilizers when needed.
class TableauSim {
public:
    TableauSim(std::size_t n_qubits, std::size_t max_records, std::size_t max_hidden);

    void seed_row(const PauliBits& p, bool sign = false);
    std::size_t track(const PauliBits& p);

    void run(const Circuit& c, std::size_t first = 0, std::size_t last = SIZE_MAX);

    void apply_cx(uint32_t c, uint32_t t);
    std::size_t measure(bool x_basis, uint32_t q);  // returns record index
    void reset(bool x_basis, uint32_t q);

    // Membership/sign query of P against the current group; group-equivalent
    // internal housekeeping only (no physical state change).
    OutcomeExpr query(const PauliBits& p);

    const std::vector<OutcomeExpr>& outcomes() const { return outcomes_; }
    std::size_t rank() const { return rows_.size(); }
    std::size_t records_used() const { return next_record_; }
    std::vector<PauliBits> row_paulis() const;

    PauliBits tracked_pauli(std::size_t i) const;
    OutcomeExpr tracked_sign(std::size_t i) const;

private:
    struct Row {
        PauliBits p;
        bool sign = false;
        BitVec syms;
    };

    void mul_into(Row& a, const Row& b) const;
    OutcomeExpr expr_of(const Row& r) const;
    std::size_t lead_of(const PauliBits& p) const;
    void echelonize();
    bool reduce(const PauliBits& p, Row& acc, std::vector<std::size_t>& used);
    Row measure_pauli_internal(const PauliBits& p, std::size_t sym, bool remember);
    void conditional_flip(const PauliBits& flip_op, const Row& control_expr);

    std::size_t n_;
    std::size_t max_records_, max_hidden_;
    std::size_t next_record_ = 0, next_hidden_ = 0;
    bool dirty_ = true;
    std::vector<std::size_t> pivot_row_;
    std::vector<Row> rows_;
    std::vector<Row> tracked_;
    std::vector<OutcomeExpr> outcomes_;
};

}  // namespace morphbb

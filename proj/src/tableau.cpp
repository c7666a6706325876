#include "tableau.hpp"

#include <algorithm>

#include "util.hpp"

namespace morphbb {

static void cx_on_pauli(PauliBits& p, uint32_t c, uint32_t t) {
    if (p.x.get(c)) p.x.flip(t);
    if (p.z.get(t)) p.z.flip(c);
}

PauliBits heisenberg_propagate(const Circuit& fragment, PauliBits p,
                               std::size_t first, std::size_t last) {
    last = std::min(last, fragment.instructions.size());
    for (std::size_t i = first; i < last; i++) {
        const Instruction& ins = fragment.instructions[i];
        switch (ins.op) {
            case Op::CX:
                for (std::size_t j = 0; j + 1 < ins.qubits.size(); j += 2)
                    cx_on_pauli(p, ins.qubits[j], ins.qubits[j + 1]);
                break;
            case Op::MX:
            case Op::MZ:
            case Op::RX:
            case Op::RZ:
                throw unsupported_fragment_error("fragment contains measurement or reset");
            default:
                break;
        }
    }
    return p;
}

PauliBits heisenberg_propagate_inverse(const Circuit& fragment, PauliBits p,
                                       std::size_t first, std::size_t last) {
    last = std::min(last, fragment.instructions.size());
    for (std::size_t i = last; i-- > first;) {
        const Instruction& ins = fragment.instructions[i];
        switch (ins.op) {
            case Op::CX:
                for (std::size_t j = ins.qubits.size(); j >= 2; j -= 2)
                    cx_on_pauli(p, ins.qubits[j - 2], ins.qubits[j - 1]);
                break;
            case Op::MX:
            case Op::MZ:
            case Op::RX:
            case Op::RZ:
                throw unsupported_fragment_error("fragment contains measurement or reset");
            default:
                break;
        }
    }
    return p;
}

TableauSim::TableauSim(std::size_t n_qubits, std::size_t max_records, std::size_t max_hidden)
    : n_(n_qubits), max_records_(max_records), max_hidden_(max_hidden) {}

void TableauSim::seed_row(const PauliBits& p, bool sign) {
    for (const auto& r : rows_)
        if (r.p.anticommutes(p)) throw invalid_state_error("initial stabilizers anticommute");
    Row r;
    r.p = p;
    r.sign = sign;
    r.syms = BitVec(max_records_ + max_hidden_);
    rows_.push_back(std::move(r));
    dirty_ = true;
}

std::size_t TableauSim::track(const PauliBits& p) {
    Row r;
    r.p = p;
    r.sign = false;
    r.syms = BitVec(max_records_ + max_hidden_);
    tracked_.push_back(std::move(r));
    return tracked_.size() - 1;
}

void TableauSim::mul_into(Row& a, const Row& b) const {
    a.sign ^= b.sign ^ a.p.z.dot(b.p.x);
    a.syms.xor_in(b.syms);
    a.p.x.xor_in(b.p.x);
    a.p.z.xor_in(b.p.z);
}

std::size_t TableauSim::lead_of(const PauliBits& p) const {
    std::size_t lx = p.x.first_set();
    if (lx != p.x.n) return lx;
    std::size_t lz = p.z.first_set();
    if (lz != p.z.n) return n_ + lz;
    return 2 * n_;  // identity
}

void TableauSim::echelonize() {
    if (!dirty_) return;
    std::vector<Row> old;
    old.swap(rows_);
    pivot_row_.assign(2 * n_, SIZE_MAX);
    for (auto& row : old) {
        Row cur = std::move(row);
        for (;;) {
            std::size_t lead = lead_of(cur.p);
            if (lead == 2 * n_) break;  // dependent generator; relation is a tautology
            if (pivot_row_[lead] == SIZE_MAX) {
                pivot_row_[lead] = rows_.size();
                rows_.push_back(std::move(cur));
                break;
            }
            mul_into(cur, rows_[pivot_row_[lead]]);
        }
    }
    dirty_ = false;
}

bool TableauSim::reduce(const PauliBits& p, Row& acc, std::vector<std::size_t>& used) {
    echelonize();
    acc.p = p;
    acc.sign = false;
    acc.syms = BitVec(max_records_ + max_hidden_);
    used.clear();
    for (;;) {
        std::size_t lead = lead_of(acc.p);
        if (lead == 2 * n_) return true;
        std::size_t r = pivot_row_[lead];
        if (r == SIZE_MAX) return false;
        mul_into(acc, rows_[r]);
        used.push_back(r);
    }
}

OutcomeExpr TableauSim::expr_of(const Row& r) const {
    OutcomeExpr e;
    e.known = true;
    e.constant = r.sign;
    for (std::size_t s : r.syms.ones()) {
        if (s < max_records_) e.records.push_back(static_cast<uint32_t>(s));
        else e.hidden = true;
    }
    return e;
}

void TableauSim::apply_cx(uint32_t c, uint32_t t) {
    for (auto& r : rows_) cx_on_pauli(r.p, c, t);
    for (auto& r : tracked_) cx_on_pauli(r.p, c, t);
    dirty_ = true;
}

OutcomeExpr TableauSim::query(const PauliBits& p) {
    for (const auto& r : rows_)
        if (r.p.anticommutes(p)) return OutcomeExpr{};
    Row acc;
    std::vector<std::size_t> used;
    if (!reduce(p, acc, used)) return OutcomeExpr{};
    return expr_of(acc);
}

// Measures P; assigns `sym` on a random outcome. For a deterministic outcome
// with a fresh (non-hidden) symbol available, rewrites one reduction row so
// later outcomes reference this record rather than older ones, which keeps
// discovered detectors local in time.
TableauSim::Row TableauSim::measure_pauli_internal(const PauliBits& p, std::size_t sym, bool remember) {
    std::size_t pivot = rows_.size();
    for (std::size_t i = 0; i < rows_.size(); i++)
        if (rows_[i].p.anticommutes(p)) { pivot = i; break; }

    Row fresh;
    fresh.p = p;
    fresh.sign = false;
    fresh.syms = BitVec(max_records_ + max_hidden_);
    fresh.syms.set(sym);

    if (pivot != rows_.size()) {
        for (std::size_t i = pivot + 1; i < rows_.size(); i++)
            if (rows_[i].p.anticommutes(p)) mul_into(rows_[i], rows_[pivot]);
        for (auto& t : tracked_)
            if (t.p.anticommutes(p)) mul_into(t, rows_[pivot]);
        rows_[pivot] = fresh;
        dirty_ = true;
        return fresh;  // random outcome, value = new symbol
    }

    Row acc;
    std::vector<std::size_t> used;
    if (reduce(p, acc, used)) {
        if (remember && !used.empty()) {
            // xor (expr ^ symbol) into one used row: a tautology over bit values
            Row& rw = rows_[used.back()];
            rw.sign ^= acc.sign;
            rw.syms.xor_in(acc.syms);
            rw.syms.flip(sym);
        }
        return acc;  // deterministic outcome
    }

    // commutes with the whole group but not generated by it: genuinely random
    for (auto& t : tracked_)
        if (t.p.anticommutes(p))
            throw construction_bug_error("tracked operator destroyed by measurement");
    rows_.push_back(fresh);
    dirty_ = true;
    return fresh;
}

std::size_t TableauSim::measure(bool x_basis, uint32_t q) {
    if (next_record_ >= max_records_) throw error("record budget exceeded");
    PauliBits p(n_);
    if (x_basis) p.x.set(q); else p.z.set(q);
    std::size_t rec = next_record_++;
    Row out = measure_pauli_internal(p, rec, true);
    if (out.syms.get(rec)) {
        OutcomeExpr e;
        e.known = false;
        outcomes_.push_back(e);
    } else {
        outcomes_.push_back(expr_of(out));
    }
    // Reduce tracked operators modulo the freshly measured stabilizer
    // (-1)^m P so their support stays off measured qubits; the record symbol
    // entering the sign is exactly the measurement byproduct.
    Row meas;
    meas.p = p;
    meas.sign = false;
    meas.syms = BitVec(max_records_ + max_hidden_);
    meas.syms.set(rec);
    for (auto& t : tracked_)
        if ((x_basis && t.p.x.get(q)) || (!x_basis && t.p.z.get(q))) mul_into(t, meas);
    return rec;
}

void TableauSim::conditional_flip(const PauliBits& flip_op, const Row& ctrl) {
    for (auto& r : rows_)
        if (r.p.anticommutes(flip_op)) { r.sign ^= ctrl.sign; r.syms.xor_in(ctrl.syms); }
    for (auto& t : tracked_)
        if (t.p.anticommutes(flip_op)) { t.sign ^= ctrl.sign; t.syms.xor_in(ctrl.syms); }
}

void TableauSim::reset(bool x_basis, uint32_t q) {
    if (next_hidden_ >= max_hidden_) throw error("hidden symbol budget exceeded");
    PauliBits p(n_);
    if (x_basis) p.x.set(q); else p.z.set(q);
    Row ctrl = measure_pauli_internal(p, max_records_ + next_hidden_, false);
    if (ctrl.syms.get(max_records_ + next_hidden_)) next_hidden_++;  // symbol consumed
    PauliBits flip(n_);
    if (x_basis) flip.z.set(q); else flip.x.set(q);
    conditional_flip(flip, ctrl);
}

void TableauSim::run(const Circuit& c, std::size_t first, std::size_t last) {
    last = std::min(last, c.instructions.size());
    for (std::size_t i = first; i < last; i++) {
        const Instruction& ins = c.instructions[i];
        switch (ins.op) {
            case Op::CX:
                for (std::size_t j = 0; j + 1 < ins.qubits.size(); j += 2)
                    apply_cx(ins.qubits[j], ins.qubits[j + 1]);
                break;
            case Op::MX:
                for (uint32_t q : ins.qubits) measure(true, q);
                break;
            case Op::MZ:
                for (uint32_t q : ins.qubits) measure(false, q);
                break;
            case Op::RX:
                for (uint32_t q : ins.qubits) reset(true, q);
                break;
            case Op::RZ:
                for (uint32_t q : ins.qubits) reset(false, q);
                break;
            default:
                break;  // noise and annotations are identity in the noiseless picture
        }
    }
}

std::vector<PauliBits> TableauSim::row_paulis() const {
    std::vector<PauliBits> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.p);
    return out;
}

PauliBits TableauSim::tracked_pauli(std::size_t i) const { return tracked_[i].p; }

OutcomeExpr TableauSim::tracked_sign(std::size_t i) const { return expr_of(tracked_[i]); }

}  // namespace morphbb

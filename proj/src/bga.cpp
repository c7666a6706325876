#include "bga.hpp"

#include <algorithm>
#include <sstream>

#include "util.hpp"

namespace morphbb {

std::size_t PauliOperator::weight() const {
    // CSS usage keeps X and Z parts separate; overlaps would be Y positions.
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_left.w.size(); i++)
        w += static_cast<std::size_t>(__builtin_popcountll(x_left.w[i] | z_left.w[i]));
    for (std::size_t i = 0; i < x_right.w.size(); i++)
        w += static_cast<std::size_t>(__builtin_popcountll(x_right.w[i] | z_right.w[i]));
    return w;
}

BitVec BgaCode::x_row(uint32_t g) const {
    BitVec v(n);
    for (std::size_t e : group.shift(A, g).ones()) v.set(e);
    for (std::size_t e : group.shift(B, g).ones()) v.set(l() + e);
    return v;
}

BitVec BgaCode::z_row(uint32_t g) const {
    BitVec v(n);
    for (std::size_t e : group.shift(group.inverse_set(B), g).ones()) v.set(e);
    for (std::size_t e : group.shift(group.inverse_set(A), g).ones()) v.set(l() + e);
    return v;
}

PauliOperator BgaCode::x_stabilizer(uint32_t g) const {
    return PauliOperator::x_op(group.shift(A, g), group.shift(B, g));
}

PauliOperator BgaCode::z_stabilizer(uint32_t g) const {
    return PauliOperator::z_op(group.shift(group.inverse_set(B), g),
                               group.shift(group.inverse_set(A), g));
}

BitVec BgaCode::support_bits_x(const PauliOperator& op) const {
    BitVec v(n);
    for (std::size_t e : op.x_left.ones()) v.set(e);
    for (std::size_t e : op.x_right.ones()) v.set(l() + e);
    return v;
}

BitVec BgaCode::support_bits_z(const PauliOperator& op) const {
    BitVec v(n);
    for (std::size_t e : op.z_left.ones()) v.set(e);
    for (std::size_t e : op.z_right.ones()) v.set(l() + e);
    return v;
}

PauliOperator BgaCode::x_op_from_bits(const BitVec& v) const {
    GroupSubset p(l()), q(l());
    for (std::size_t i : v.ones()) {
        if (i < l()) p.set(i); else q.set(i - l());
    }
    return PauliOperator::x_op(p, q);
}

PauliOperator BgaCode::z_op_from_bits(const BitVec& v) const {
    GroupSubset p(l()), q(l());
    for (std::size_t i : v.ones()) {
        if (i < l()) p.set(i); else q.set(i - l());
    }
    return PauliOperator::z_op(p, q);
}

BgaCode build_code(const Group& group, const GroupSubset& A, const GroupSubset& B) {
    if (!A.any() || !B.any()) throw invalid_code_error("A and B must be non-empty");
    BgaCode c;
    c.group = group;
    c.A = A;
    c.B = B;
    for (std::size_t e : A.ones()) c.a_order.push_back(static_cast<uint32_t>(e));
    for (std::size_t e : B.ones()) c.b_order.push_back(static_cast<uint32_t>(e));
    c.n = 2 * group.order;
    c.hx = BitMat(group.order, c.n);
    c.hz = BitMat(group.order, c.n);
    for (uint32_t g = 0; g < group.order; g++) {
        c.hx.r[g] = c.x_row(g);
        c.hz.r[g] = c.z_row(g);
    }
    if (!c.hx.mul_transpose(c.hz).is_zero())
        throw construction_bug_error("Hx Hz^T != 0");
    c.k = c.n - gf2_rank(c.hx) - gf2_rank(c.hz);
    return c;
}

BgaCode build_code_named(const std::vector<int>& orders, const std::vector<std::string>& A,
                         const std::vector<std::string>& B) {
    Group g = make_group(orders);
    BgaCode c = build_code(g, g.parse_subset(A), g.parse_subset(B));
    c.a_order.clear();
    c.b_order.clear();
    for (const auto& m : A) c.a_order.push_back(g.parse_element(m));
    for (const auto& m : B) c.b_order.push_back(g.parse_element(m));
    return c;
}

CssCode make_css(BitMat hx, BitMat hz) {
    if (hx.cols != hz.cols) throw shape_error("Hx and Hz column counts differ");
    if (!hx.mul_transpose(hz).is_zero()) throw construction_bug_error("Hx Hz^T != 0");
    CssCode css;
    css.n = hx.cols;
    css.k = css.n - gf2_rank(hx) - gf2_rank(hz);
    css.hx = std::move(hx);
    css.hz = std::move(hz);
    return css;
}

// Greedy weight reduction of a representative modulo a set of rows.
static void reduce_weight_by(BitVec& v, const std::vector<BitVec>& rows) {
    bool improved = true;
    while (improved) {
        improved = false;
        for (const auto& r : rows) {
            BitVec cand = v;
            cand.xor_in(r);
            if (cand.popcount() < v.popcount()) {
                v = std::move(cand);
                improved = true;
            }
        }
    }
}

CssLogicals css_logical_basis(const CssCode& css) {
    CssLogicals out;
    if (css.k == 0) return out;

    auto pick_reps = [&](const BitMat& checks, const BitMat& stab_rows) {
        BitMat kern = kernel_basis(checks);
        RowSpace span(stab_rows);
        std::vector<BitVec> reps;
        for (const auto& v : kern.r)
            if (span.insert(v)) reps.push_back(v);
        // lighter representatives make better observables and probe rows
        for (auto& v : reps) reduce_weight_by(v, stab_rows.r);
        return reps;
    };
    std::vector<BitVec> xreps = pick_reps(css.hz, css.hx);
    std::vector<BitVec> zreps = pick_reps(css.hx, css.hz);
    if (xreps.size() != css.k || zreps.size() != css.k)
        throw construction_bug_error("logical representative count != k");

    // Gram matrix of the symplectic pairing, then invert to bi-orthogonalize.
    std::size_t k = css.k;
    BitMat aug(k, 2 * k);
    for (std::size_t i = 0; i < k; i++) {
        for (std::size_t j = 0; j < k; j++)
            if (xreps[i].dot(zreps[j])) aug.r[i].set(j);
        aug.r[i].set(k + i);
    }
    auto pivots = rref(aug);
    if (pivots.size() != k || pivots.back() != k - 1)
        throw construction_bug_error("degenerate logical pairing");
    out.x = xreps;
    out.z.assign(k, BitVec(css.n));
    for (std::size_t j = 0; j < k; j++) {
        // Z'_j = sum_l (gram^-1)[l][j] Z_l; row l of the inverse sits in aug columns [k, 2k)
        for (std::size_t l = 0; l < k; l++)
            if (aug.r[l].get(k + j)) out.z[j].xor_in(zreps[l]);
        reduce_weight_by(out.z[j], css.hz.r);
    }
    return out;
}

LogicalBasis logical_basis(const BgaCode& code) {
    LogicalBasis out;
    if (code.k == 0) return out;
    CssCode css;
    css.hx = code.hx;
    css.hz = code.hz;
    css.n = code.n;
    css.k = code.k;
    CssLogicals logs = css_logical_basis(css);
    for (std::size_t i = 0; i < logs.x.size(); i++) {
        out.x.push_back(code.x_op_from_bits(logs.x[i]));
        out.z.push_back(code.z_op_from_bits(logs.z[i]));
    }
    return out;
}

namespace {

// Packed incremental signature for the distance search: for each qubit,
// [Hz syndrome bits | pairing bits with the k Z-logicals].
struct DistanceSearch {
    std::size_t n_checks, n_log, words;
    std::vector<uint64_t> sig;  // per qubit, `words` words
    std::size_t n;

    DistanceSearch(const CssCode& css, const CssLogicals& logs) {
        n = css.n;
        n_checks = css.hz.rows;
        n_log = logs.z.size();
        std::size_t bits = n_checks + n_log;
        words = (bits + 63) / 64;
        sig.assign(n * words, 0);
        for (std::size_t q = 0; q < n; q++) {
            for (std::size_t c = 0; c < n_checks; c++)
                if (css.hz.get(c, q)) sig[q * words + (c >> 6)] |= 1ULL << (c & 63);
            for (std::size_t j = 0; j < n_log; j++) {
                std::size_t b = n_checks + j;
                if (logs.z[j].get(q)) sig[q * words + (b >> 6)] |= 1ULL << (b & 63);
            }
        }
        check_mask.assign(words, 0);
        for (std::size_t c = 0; c < n_checks; c++) check_mask[c >> 6] |= 1ULL << (c & 63);
    }
    std::vector<uint64_t> check_mask;

    bool is_logical(const uint64_t* acc) const {
        for (std::size_t i = 0; i < words; i++)
            if (acc[i] & check_mask[i]) return false;  // anticommutes with a Z-check
        for (std::size_t i = 0; i < words; i++)
            if (acc[i] & ~check_mask[i]) return true;  // pairs with some logical
        return false;
    }

    // Enumerate all weight-w supports containing `anchor` with the remaining
    // w-1 qubits drawn from (lo, n). Returns true if a logical was found.
    bool scan(std::size_t anchor, std::size_t lo, int w) const {
        std::vector<std::vector<uint64_t>> acc(static_cast<std::size_t>(w),
                                               std::vector<uint64_t>(words, 0));
        for (std::size_t i = 0; i < words; i++) acc[0][i] = sig[anchor * words + i];
        if (w == 1) return is_logical(acc[0].data());
        std::size_t rest = static_cast<std::size_t>(w) - 1;
        std::vector<std::size_t> pos(rest);
        pos[0] = lo + 1;
        std::ptrdiff_t d = 0;
        while (d >= 0) {
            std::size_t di = static_cast<std::size_t>(d);
            if (pos[di] >= n - (rest - 1 - di)) {
                d--;
                if (d >= 0) pos[static_cast<std::size_t>(d)]++;
                continue;
            }
            std::size_t q = pos[di];
            for (std::size_t i = 0; i < words; i++)
                acc[di + 1][i] = acc[di][i] ^ sig[q * words + i];
            if (di == rest - 1) {
                if (is_logical(acc[di + 1].data())) return true;
                pos[di]++;
            } else {
                d++;
                pos[di + 1] = q + 1;
            }
        }
        return false;
    }
};

}  // namespace

std::optional<int> distance_exact_css(const CssCode& css, int max_weight, long orbit_split) {
    if (max_weight < 1) throw error("max_weight must be >= 1");
    if (css.k == 0) return std::nullopt;
    CssLogicals logs = css_logical_basis(css);
    DistanceSearch search(css, logs);
    for (int w = 1; w <= max_weight; w++) {
        if (orbit_split >= 0) {
            // Any logical with support in the first block can be shifted to
            // contain its anchor qubit; one supported only on the second block
            // can be shifted to contain that block's anchor.
            if (search.scan(0, 0, w)) return w;
            std::size_t split = static_cast<std::size_t>(orbit_split);
            if (split < css.n && search.scan(split, split, w)) return w;
        } else {
            for (std::size_t anchor = 0; anchor + 1 <= css.n; anchor++)
                if (search.scan(anchor, anchor, w)) return w;
        }
    }
    return std::nullopt;
}

int distance_upper_css(const CssCode& css, int trials, uint64_t seed) {
    if (trials < 1) throw error("trials must be >= 1");
    CssLogicals logs = css_logical_basis(css);
    std::size_t n = css.n;

    std::vector<BitVec> gen_rows;  // stabilizers + logicals span the X centralizer
    for (const auto& row : css.hx.r) gen_rows.push_back(row);
    for (const auto& x : logs.x) gen_rows.push_back(x);

    Rng rng(seed);
    std::size_t best = n + 1;
    std::vector<std::size_t> perm(n);
    for (int t = 0; t < trials; t++) {
        for (std::size_t i = 0; i < n; i++) perm[i] = i;
        for (std::size_t i = n; i-- > 1;) std::swap(perm[i], perm[rng.below(i + 1)]);
        BitMat m(gen_rows.size(), n);
        for (std::size_t r = 0; r < gen_rows.size(); r++)
            for (std::size_t q : gen_rows[r].ones()) m.r[r].set(perm[q]);
        rref(m);
        for (const auto& row : m.r) {
            std::size_t w = row.popcount();
            if (w == 0 || w >= best) continue;
            // unpermute and test for nontriviality against the Z logicals
            BitVec orig(n);
            for (std::size_t q = 0; q < n; q++)
                if (row.get(perm[q])) orig.set(q);
            bool nontrivial = false;
            for (const auto& z : logs.z)
                if (orig.dot(z)) { nontrivial = true; break; }
            if (nontrivial) best = w;
        }
    }
    return static_cast<int>(best);
}

std::size_t min_stabilizer_weight_css(const CssCode& css) {
    auto side_min = [&](const BitMat& h) {
        BitMat m = h;
        rref(m);
        std::vector<BitVec> basis;
        for (const auto& row : m.r)
            if (row.any()) basis.push_back(row);
        if (basis.size() > 26) throw error("stabilizer group too large for exhaustive weight scan");
        std::size_t best = css.n + 1;
        BitVec acc(css.n);
        uint64_t total = 1ULL << basis.size();
        uint64_t gray = 0;
        // Gray-code walk over the group
        for (uint64_t i = 1; i < total; i++) {
            uint64_t g = i ^ (i >> 1);
            uint64_t changed = g ^ gray;
            gray = g;
            acc.xor_in(basis[static_cast<std::size_t>(__builtin_ctzll(changed))]);
            best = std::min(best, acc.popcount());
        }
        return best;
    };
    return std::min(side_min(css.hx), side_min(css.hz));
}

static CssCode css_view(const BgaCode& code) {
    CssCode css;
    css.hx = code.hx;
    css.hz = code.hz;
    css.n = code.n;
    css.k = code.k;
    return css;
}

std::optional<int> distance_exact(const BgaCode& code, int max_weight) {
    return distance_exact_css(css_view(code), max_weight, static_cast<long>(code.l()));
}

int distance_upper(const BgaCode& code, int trials, uint64_t seed) {
    return distance_upper_css(css_view(code), trials, seed);
}

std::size_t min_stabilizer_weight(const BgaCode& code) {
    return min_stabilizer_weight_css(css_view(code));
}

TannerDegrees tanner_degrees(const BgaCode& code) {
    TannerDegrees t;
    for (const auto& row : code.hx.r) t.x_check_weights.push_back(row.popcount());
    for (const auto& row : code.hz.r) t.z_check_weights.push_back(row.popcount());
    t.qubit_degrees.assign(code.n, 0);
    for (const auto& row : code.hx.r)
        for (std::size_t q : row.ones()) t.qubit_degrees[q]++;
    for (const auto& row : code.hz.r)
        for (std::size_t q : row.ones()) t.qubit_degrees[q]++;
    return t;
}

bool commutes_with_z_checks(const BgaCode& code, const PauliOperator& op) {
    BitVec v = code.support_bits_x(op);
    for (const auto& row : code.hz.r)
        if (row.dot(v)) return false;
    return true;
}

bool commutes_with_x_checks(const BgaCode& code, const PauliOperator& op) {
    BitVec v = code.support_bits_z(op);
    for (const auto& row : code.hx.r)
        if (row.dot(v)) return false;
    return true;
}

bool is_x_logical(const BgaCode& code, const PauliOperator& op) {
    if (!op.is_x_type()) return false;
    if (!commutes_with_z_checks(code, op)) return false;
    RowSpace span(code.hx);
    return !span.contains(code.support_bits_x(op));
}

std::string export_ilp(const BgaCode& code, const PauliOperator& logical_z) {
    if (code.k == 0) throw invalid_logical_error("code has no logical qubits");
    BitVec zbits = code.support_bits_z(logical_z);
    if (!logical_z.is_z_type() || !commutes_with_x_checks(code, logical_z))
        throw invalid_logical_error("operator is not a Z-logical of the code");
    RowSpace zspan(code.hz);
    if (zspan.contains(zbits))
        throw invalid_logical_error("operator is a stabilizer, not a logical");

    std::ostringstream out;
    out << "Minimize\n obj:";
    for (std::size_t q = 0; q < code.n; q++) out << (q ? " + x" : " x") << q;
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < code.hz.rows; r++) {
        out << " parity_" << r << ":";
        bool first = true;
        for (std::size_t q : code.hz.r[r].ones()) {
            out << (first ? " x" : " + x") << q;
            first = false;
        }
        out << " + 2 y" << r << " = 0\n";
    }
    out << " logical:";
    bool first = true;
    for (std::size_t q : zbits.ones()) {
        out << (first ? " x" : " + x") << q;
        first = false;
    }
    out << " + 2 z = 1\nBounds\n";
    for (std::size_t r = 0; r < code.hz.rows; r++) out << " y" << r << " free\n";
    out << " z free\nGenerals\n";
    for (std::size_t r = 0; r < code.hz.rows; r++) out << " y" << r << "\n";
    out << " z\nBinaries\n";
    for (std::size_t q = 0; q < code.n; q++) out << " x" << q << "\n";
    out << "End\n";
    return out.str();
}

BgaCode relabel_code(const BgaCode& code, uint32_t ra, uint32_t rb,
                     const std::vector<uint32_t>& phi) {
    GroupSubset a2(code.group.order), b2(code.group.order);
    for (std::size_t e : code.group.shift(code.A, ra).ones()) a2.set(phi[e]);
    for (std::size_t e : code.group.shift(code.B, rb).ones()) b2.set(phi[e]);
    return build_code(code.group, a2, b2);
}

}  // namespace morphbb

#include "gf2.hpp"

#include <algorithm>

namespace morphbb {

std::vector<std::size_t> rref(BitMat& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols && row < m.rows; col++) {
        std::size_t pivot = row;
        while (pivot < m.rows && !m.r[pivot].get(col)) pivot++;
        if (pivot == m.rows) continue;
        std::swap(m.r[pivot], m.r[row]);
        for (std::size_t i = 0; i < m.rows; i++)
            if (i != row && m.r[i].get(col)) m.r[i].xor_in(m.r[row]);
        pivots.push_back(col);
        row++;
    }
    return pivots;
}

std::size_t gf2_rank(BitMat m) { return rref(m).size(); }

BitMat kernel_basis(const BitMat& m) {
    BitMat e = m;
    std::vector<std::size_t> pivots = rref(e);
    std::vector<bool> is_pivot(m.cols, false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    BitMat out(0, m.cols);
    for (std::size_t col = 0; col < m.cols; col++) {
        if (is_pivot[col]) continue;
        BitVec v(m.cols);
        v.set(col);
        for (std::size_t i = 0; i < pivots.size(); i++)
            if (e.r[i].get(col)) v.set(pivots[i]);
        out.add_row(v);
    }
    return out;
}

RowSpace::RowSpace(const BitMat& m) : cols(m.cols) {
    for (const auto& row : m.r) insert(row);
}

BitVec RowSpace::reduce(BitVec v) const {
    for (std::size_t i = 0; i < rows.size(); i++)
        if (v.get(pivots[i])) v.xor_in(rows[i]);
    return v;
}

bool RowSpace::insert(BitVec v) {
    v = reduce(v);
    std::size_t lead = v.first_set();
    if (lead == v.n) return false;
    // back-substitute to keep stored rows reduced
    for (std::size_t i = 0; i < rows.size(); i++)
        if (rows[i].get(lead)) rows[i].xor_in(v);
    // insert keeping pivots sorted
    std::size_t pos = 0;
    while (pos < pivots.size() && pivots[pos] < lead) pos++;
    rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    pivots.insert(pivots.begin() + static_cast<std::ptrdiff_t>(pos), lead);
    return true;
}

bool same_row_space(const BitMat& a, const BitMat& b) {
    if (a.cols != b.cols) return false;
    RowSpace ra(a), rb(b);
    if (ra.rank() != rb.rank()) return false;
    for (const auto& row : a.r)
        if (!rb.contains(row)) return false;
    return true;
}

std::string to_string(const BitVec& v) {
    std::string s(v.n, '0');
    for (std::size_t i = 0; i < v.n; i++)
        if (v.get(i)) s[i] = '1';
    return s;
}

}  // namespace morphbb

#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace morphbb {

// Bit-packed vector over GF(2).
struct BitVec {
    std::size_t n = 0;
    std::vector<uint64_t> w;

    BitVec() = default;
    explicit BitVec(std::size_t nbits) : n(nbits), w((nbits + 63) / 64, 0) {}

    bool get(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true) {
        uint64_t m = 1ULL << (i & 63);
        if (v) w[i >> 6] |= m; else w[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w[i >> 6] ^= 1ULL << (i & 63); }
    void clear() { for (auto& x : w) x = 0; }

    void xor_in(const BitVec& o) {
        for (std::size_t i = 0; i < w.size(); i++) w[i] ^= o.w[i];
    }
    bool any() const {
        for (uint64_t x : w) if (x) return true;
        return false;
    }
    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t x : w) c += static_cast<std::size_t>(__builtin_popcountll(x));
        return c;
    }
    // parity of <this, o>
    bool dot(const BitVec& o) const {
        uint64_t acc = 0;
        for (std::size_t i = 0; i < w.size(); i++) acc ^= w[i] & o.w[i];
        return __builtin_parityll(acc);
    }
    // index of lowest set bit, or n if none
    std::size_t first_set() const {
        for (std::size_t i = 0; i < w.size(); i++)
            if (w[i]) return i * 64 + static_cast<std::size_t>(__builtin_ctzll(w[i]));
        return n;
    }
    std::vector<std::size_t> ones() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < w.size(); i++) {
            uint64_t x = w[i];
            while (x) {
                out.push_back(i * 64 + static_cast<std::size_t>(__builtin_ctzll(x)));
                x &= x - 1;
            }
        }
        return out;
    }
    bool operator==(const BitVec& o) const { return n == o.n && w == o.w; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }
};

// Dense GF(2) matrix stored as rows of BitVec.
struct BitMat {
    std::size_t rows = 0, cols = 0;
    std::vector<BitVec> r;

    BitMat() = default;
    BitMat(std::size_t nr, std::size_t nc) : rows(nr), cols(nc), r(nr, BitVec(nc)) {}

    bool get(std::size_t i, std::size_t j) const { return r[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v = true) { r[i].set(j, v); }
    void add_row(const BitVec& v) { r.push_back(v); rows++; }

    BitMat transposed() const {
        BitMat t(cols, rows);
        for (std::size_t i = 0; i < rows; i++)
            for (std::size_t j : r[i].ones()) t.r[j].set(i);
        return t;
    }
    // this (rows x cols) * o^T (o.rows x cols) -> rows x o.rows
    BitMat mul_transpose(const BitMat& o) const {
        BitMat out(rows, o.rows);
        for (std::size_t i = 0; i < rows; i++)
            for (std::size_t j = 0; j < o.rows; j++)
                if (r[i].dot(o.r[j])) out.r[i].set(j);
        return out;
    }
    bool is_zero() const {
        for (const auto& row : r) if (row.any()) return false;
        return true;
    }
};

// In-place reduced row echelon form; returns pivot column per reduced row.
std::vector<std::size_t> rref(BitMat& m);

std::size_t gf2_rank(BitMat m);

// Basis of {x : m x = 0}, as rows of length m.cols.
BitMat kernel_basis(const BitMat& m);

// Row-space membership and equality.
struct RowSpace {
    // rows kept in echelon form, pivot[i] = leading column of row i
    std::vector<BitVec> rows;
    std::vector<std::size_t> pivots;
    std::size_t cols = 0;

    explicit RowSpace(std::size_t ncols) : cols(ncols) {}
    explicit RowSpace(const BitMat& m);
    // reduce v by the basis; returns residual
    BitVec reduce(BitVec v) const;
    bool contains(const BitVec& v) const { return !reduce(v).any(); }
    // add v if independent; returns true if rank grew
    bool insert(BitVec v);
    std::size_t rank() const { return rows.size(); }
};

bool same_row_space(const BitMat& a, const BitMat& b);

std::string to_string(const BitVec& v);

}  // namespace morphbb

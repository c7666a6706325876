#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gf2.hpp"

namespace morphbb {

// A subset of group elements doubles as a GF(2) group-algebra element:
// set symmetric difference is addition in Z_2[G].
using GroupSubset = BitVec;

// Finite abelian group as a product of cyclic factors Z_{d1} x ... x Z_{dk}.
// Elements are indexed 0..order-1 in lexicographic exponent order (first
// factor most significant); index 0 is the identity.
struct Group {
    std::vector<int> orders;
    std::size_t order = 0;
    std::vector<uint32_t> mul_table;  // order x order, row-major
    std::vector<uint32_t> inv_table;

    uint32_t mul(uint32_t a, uint32_t b) const { return mul_table[a * order + b]; }
    uint32_t inv(uint32_t a) const { return inv_table[a]; }
    uint32_t pow(uint32_t a, long long e) const;
    int element_order(uint32_t a) const;

    std::vector<int> exponents_of(uint32_t idx) const;
    uint32_t index_of(const std::vector<int>& exps) const;

    std::string element_name(uint32_t idx) const;
    uint32_t parse_element(const std::string& text) const;

    GroupSubset empty_subset() const { return GroupSubset(order); }
    GroupSubset subset_of(const std::vector<uint32_t>& elems) const;
    GroupSubset parse_subset(const std::vector<std::string>& monomials) const;
    std::vector<std::string> subset_names(const GroupSubset& s) const;

    // {s*g : s in S}
    GroupSubset shift(const GroupSubset& s, uint32_t g) const;
    // {s^-1 : s in S}
    GroupSubset inverse_set(const GroupSubset& s) const;
    // characteristic-2 convolution: kept iff it arises an odd number of times
    GroupSubset algebra_mul(const GroupSubset& s, const GroupSubset& t) const;

    bool operator==(const Group& o) const { return orders == o.orders; }
};

Group make_group(const std::vector<int>& orders);

// Nontrivial homomorphism f: G -> Z_2 = {1, u}, given by which generators map
// to u. Generators of odd order are forced to map to 1.
struct Homomorphism {
    std::vector<bool> maps_to_u;  // one flag per factor

    // true means f(g) = u
    bool eval(const Group& g, uint32_t idx) const;
    GroupSubset kernel(const Group& g) const;
    GroupSubset complement(const Group& g) const;
    std::string name(const Group& g) const;  // "f_x", "f_xy", ...
};

std::vector<Homomorphism> find_homomorphisms(const Group& g);

// Decomposition of a subgroup (given as a member bitmask) into an explicit
// product of cyclic groups, with index translation both ways.
struct SubgroupDecomposition {
    Group sub;
    std::vector<uint32_t> sub_to_parent;   // sub index -> parent index
    std::vector<uint32_t> parent_to_sub;   // parent index -> sub index or UINT32_MAX
};

SubgroupDecomposition decompose_subgroup(const Group& g, const GroupSubset& members);

}  // namespace morphbb

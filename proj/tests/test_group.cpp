#include "doctest.h"

#include <algorithm>
#include <set>

#include "group.hpp"
#include "util.hpp"

using namespace morphbb;

TEST_CASE("make_group sizes and element enumeration") {
    Group g66 = make_group({6, 6});
    CHECK(g66.order == 36);
    Group triv = make_group({1});
    CHECK(triv.order == 1);
    Group z2 = make_group({2});
    CHECK(z2.order == 2);
    CHECK(z2.element_name(0) == "1");
    CHECK(z2.element_name(1) == "x");

    CHECK_THROWS_AS(make_group({}), invalid_group_error);
    CHECK_THROWS_AS(make_group({0, 3}), invalid_group_error);

    // enumeration total and duplicate-free
    std::set<std::vector<int>> seen;
    for (uint32_t i = 0; i < g66.order; i++) seen.insert(g66.exponents_of(i));
    CHECK(seen.size() == 36);
}

TEST_CASE("gmul and ginv") {
    Group g = make_group({6, 6});
    uint32_t x3 = g.parse_element("x^3");
    uint32_t x4 = g.parse_element("x^4");
    CHECK(g.mul(x3, x4) == g.parse_element("x"));
    uint32_t any = g.parse_element("x^2*y^5");
    CHECK(g.mul(any, 0) == any);
    CHECK(g.mul(any, g.inv(any)) == 0);

    Group z2 = make_group({2});
    CHECK(z2.mul(1, 1) == 0);

    CHECK_THROWS_AS(g.index_of({1, 2, 3}), invalid_element_error);
}

TEST_CASE("element text round-trip") {
    Group g = make_group({6, 6});
    for (uint32_t i = 0; i < g.order; i++)
        CHECK(g.parse_element(g.element_name(i)) == i);
    CHECK(g.parse_element("x^-1") == g.parse_element("x^5"));
    CHECK_THROWS_AS(g.parse_element("q^2"), parse_error);
}

TEST_CASE("algebra_mul characteristic-2 convolution") {
    Group z2 = make_group({2});
    GroupSubset s = z2.parse_subset({"1", "x"});
    CHECK(!z2.algebra_mul(s, s).any());  // 1 and x each arise twice

    Group g = make_group({6, 6});
    GroupSubset a = g.parse_subset({"x^3", "y", "y^2"});
    GroupSubset b = g.parse_subset({"y^3", "x", "x^2"});
    GroupSubset ab = g.algebra_mul(a, b);
    GroupSubset expect = g.parse_subset(
        {"x^3*y^3", "x^4", "x^5", "y^4", "x*y", "x^2*y", "y^5", "x*y^2", "x^2*y^2"});
    CHECK(ab == expect);
    CHECK(ab.popcount() == 9);

    GroupSubset ident = g.parse_subset({"1"});
    CHECK(g.algebra_mul(a, ident) == a);
}

TEST_CASE("algebra_mul commutative and associative on random subsets") {
    Rng rng(7);
    for (auto orders : {std::vector<int>{6, 6}, std::vector<int>{4, 3}, std::vector<int>{2, 2, 2}}) {
        Group g = make_group(orders);
        for (int rep = 0; rep < 20; rep++) {
            GroupSubset s(g.order), t(g.order), u(g.order);
            for (uint32_t e = 0; e < g.order; e++) {
                if (rng.bernoulli(0.3)) s.set(e);
                if (rng.bernoulli(0.3)) t.set(e);
                if (rng.bernoulli(0.3)) u.set(e);
            }
            CHECK(g.algebra_mul(s, t) == g.algebra_mul(t, s));
            CHECK(g.algebra_mul(g.algebra_mul(s, t), u) == g.algebra_mul(s, g.algebra_mul(t, u)));
        }
    }
}

TEST_CASE("find_homomorphisms per parity") {
    Group g66 = make_group({6, 6});
    auto h66 = find_homomorphisms(g66);
    std::set<std::string> names;
    for (const auto& h : h66) names.insert(h.name(g66));
    CHECK(names == std::set<std::string>{"f_x", "f_y", "f_xy"});

    Group g96 = make_group({9, 6});
    auto h96 = find_homomorphisms(g96);
    REQUIRE(h96.size() == 1);
    CHECK(h96[0].name(g96) == "f_y");

    Group g153 = make_group({15, 3});
    CHECK(find_homomorphisms(g153).empty());
}

TEST_CASE("homomorphism property and kernel cosets") {
    for (auto orders : {std::vector<int>{6, 6}, std::vector<int>{12, 6}, std::vector<int>{4, 4}}) {
        Group g = make_group(orders);
        for (const auto& f : find_homomorphisms(g)) {
            for (uint32_t a = 0; a < g.order; a++)
                for (uint32_t b = 0; b < g.order; b++)
                    CHECK(f.eval(g, g.mul(a, b)) == (f.eval(g, a) != f.eval(g, b)));
            GroupSubset k = f.kernel(g);
            CHECK(k.popcount() == g.order / 2);
            CHECK(f.complement(g).popcount() == g.order / 2);
            // gK = g^-1 K for all g
            for (uint32_t a = 0; a < g.order; a++)
                CHECK(g.shift(k, a) == g.shift(k, g.inv(a)));
        }
    }
}

TEST_CASE("subgroup decomposition is an isomorphism") {
    for (auto orders : {std::vector<int>{6, 6}, std::vector<int>{12, 6}, std::vector<int>{12, 12},
                        std::vector<int>{30, 6}, std::vector<int>{21, 18}, std::vector<int>{4, 4},
                        std::vector<int>{2, 6, 4}}) {
        Group g = make_group(orders);
        for (const auto& f : find_homomorphisms(g)) {
            SubgroupDecomposition d = decompose_subgroup(g, f.kernel(g));
            REQUIRE(d.sub.order == g.order / 2);
            // bijective by construction; check homomorphism property exhaustively
            for (uint32_t a = 0; a < d.sub.order; a++)
                for (uint32_t b = 0; b < d.sub.order; b++)
                    CHECK(d.sub_to_parent[d.sub.mul(a, b)] ==
                          g.mul(d.sub_to_parent[a], d.sub_to_parent[b]));
        }
    }
}

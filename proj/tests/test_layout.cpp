#include "doctest.h"

#include "layout.hpp"
#include "specs.hpp"
#include "util.hpp"

using namespace morphbb;

namespace {

Homomorphism hom_by_name(const Group& g, const std::string& name) {
    for (const auto& h : find_homomorphisms(g))
        if (h.name(g) == name) return h;
    throw std::runtime_error("no hom " + name);
}

std::vector<Homomorphism> criterion1_homs(const BgaCode& code) {
    std::vector<Homomorphism> out;
    for (const auto& h : find_homomorphisms(code.group)) {
        try {
            contracting_sets(code, h);
            out.push_back(h);
        } catch (const criterion_failure&) {
        }
    }
    return out;
}

}  // namespace

TEST_CASE("planarity test on known graphs") {
    // K5 and K3,3 and their subdivisions are non-planar; cycles and grids are
    std::vector<std::pair<uint32_t, uint32_t>> k5;
    for (uint32_t i = 0; i < 5; i++)
        for (uint32_t j = i + 1; j < 5; j++) k5.push_back({i, j});
    CHECK(!is_planar(5, k5));

    std::vector<std::pair<uint32_t, uint32_t>> k33;
    for (uint32_t i = 0; i < 3; i++)
        for (uint32_t j = 0; j < 3; j++) k33.push_back({i, 3 + j});
    CHECK(!is_planar(6, k33));

    // subdivide one K5 edge through vertex 5
    std::vector<std::pair<uint32_t, uint32_t>> k5sub = k5;
    k5sub.erase(k5sub.begin());
    k5sub.push_back({0, 5});
    k5sub.push_back({5, 1});
    CHECK(!is_planar(6, k5sub));

    std::vector<std::pair<uint32_t, uint32_t>> cycle;
    for (uint32_t i = 0; i < 12; i++) cycle.push_back({i, (i + 1) % 12});
    CHECK(is_planar(12, cycle));

    std::vector<std::pair<uint32_t, uint32_t>> grid;
    for (uint32_t i = 0; i < 4; i++)
        for (uint32_t j = 0; j < 4; j++) {
            if (i + 1 < 4) grid.push_back({i * 4 + j, (i + 1) * 4 + j});
            if (j + 1 < 4) grid.push_back({i * 4 + j, i * 4 + j + 1});
        }
    CHECK(is_planar(16, grid));
}

TEST_CASE("connectivity graph degrees and edge counts") {
    BgaCode c144 = builtin_code("bb144");
    MorphingProtocol p = build_protocol(c144, hom_by_name(c144.group, "f_xy"), Variant::standard);
    ConnectivityGraph g = connectivity_graph(p);
    CHECK(g.n_vertices == 144);
    CHECK(g.edges.size() == 360);
    for (auto d : g.degree) CHECK(d == 5);
    // bipartite by construction: every edge joins the L and R blocks
    for (auto [a, b] : g.edges) CHECK(((a < g.l) != (b < g.l)));

    BgaCode t = builtin_code("toric_d4");
    MorphingProtocol tp = build_protocol(t, hom_by_name(t.group, "f_xy"), Variant::standard);
    ConnectivityGraph tg = connectivity_graph(tp);
    CHECK(tg.max_degree == 3);

    BgaCode c4 = builtin_code("code422");
    MorphingProtocol p4 = build_protocol(c4, criterion1_homs(c4)[0], Variant::standard);
    ConnectivityGraph g4 = connectivity_graph(p4);
    CHECK(g4.max_degree <= 3);
}

TEST_CASE("biplanar partition: planar subgraphs with the wheel structure") {
    for (const char* name : {"bb72", "bb108", "bb144", "bb288"}) {
        BgaCode c = builtin_code(name);
        for (const auto& h : criterion1_homs(c)) {
            MorphingProtocol p = build_protocol(c, h, Variant::standard);
            ConnectivityGraph g = connectivity_graph(p);
            BiplanarPartition part = biplanar_partition(g, p);
            INFO(name, " ", h.name(c.group));
            CHECK(part.e1_planar);
            CHECK(part.e2_planar);
            CHECK(part.wheel_ok);
            CHECK(part.e1.size() + part.e2.size() == g.tagged.size());
        }
    }
    // toric: the partition still yields two planar subgraphs
    BgaCode t = builtin_code("toric_d4");
    MorphingProtocol tp = build_protocol(t, hom_by_name(t.group, "f_xy"), Variant::standard);
    ConnectivityGraph tg = connectivity_graph(tp);
    BiplanarPartition tpart = biplanar_partition(tg, tp);
    CHECK(tpart.e1_planar);
    CHECK(tpart.e2_planar);
}

TEST_CASE("toric+ layout exists for every Table I code and homomorphism") {
    for (const char* name : {"bb72", "bb108", "bb144", "bb288", "bb360", "bb756"}) {
        BgaCode c = builtin_code(name);
        for (const auto& h : criterion1_homs(c)) {
            MorphingProtocol p = build_protocol(c, h, Variant::standard);
            auto lay = toric_plus_layout(p);
            INFO(name, " ", h.name(c.group));
            REQUIRE(lay.has_value());
            CHECK(static_cast<std::size_t>(lay->lambda) * static_cast<std::size_t>(lay->mu) ==
                  c.group.order);
            // exactly three of the five edge labels are local: {1, x, y}
            uint32_t one = 0;
            uint32_t xg = lay->new_group.parse_element("x");
            uint32_t yg = lay->new_group.parse_element("y");
            int local = 0;
            for (uint32_t lab : lay->relabeled_edge_labels)
                if (lab == one || lab == xg || lab == yg) local++;
            CHECK(local == 3);
        }
    }
    BgaCode t = builtin_code("toric_d4");
    MorphingProtocol tp = build_protocol(t, hom_by_name(t.group, "f_xy"), Variant::standard);
    auto lay = toric_plus_layout(tp);
    REQUIRE(lay.has_value());
    CHECK(lay->lambda * lay->mu == 16);
}

TEST_CASE("relabeling preserves k and distance") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    // automorphism x -> x^5, y -> y (5 coprime to 6)
    std::vector<uint32_t> phi(g.order);
    for (uint32_t e = 0; e < g.order; e++) {
        auto ex = g.exponents_of(e);
        phi[e] = g.index_of({5 * ex[0], ex[1]});
    }
    BgaCode relabeled = relabel_code(c, g.parse_element("x^2"), g.parse_element("y^4"), phi);
    CHECK(relabeled.k == c.k);
    CHECK(distance_exact(relabeled, 6) == 6);

    BgaCode c4 = builtin_code("code422");
    std::vector<uint32_t> ident = {0, 1};
    BgaCode r4 = relabel_code(c4, 1, 0, ident);
    CHECK(r4.k == 2);
    CHECK(distance_exact(r4, 2) == 2);
}

TEST_CASE("graph exports are deterministic and well formed") {
    BgaCode c = builtin_code("bb72");
    MorphingProtocol p = build_protocol(c, hom_by_name(c.group, "f_x"), Variant::standard);
    ConnectivityGraph g = connectivity_graph(p);
    BiplanarPartition part = biplanar_partition(g, p);
    std::string dot = graph_to_dot(g, p);
    CHECK(dot.find("graph connectivity {") == 0);
    CHECK(dot == graph_to_dot(g, p));
    std::string csv = graph_to_csv(g, p, &part);
    CHECK(csv.rfind("left_label,right_label,i,j,subgraph\n", 0) == 0);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == g.tagged.size() + 1);
}

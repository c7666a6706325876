#include "layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "util.hpp"

namespace morphbb {

namespace {

// Edge labels (i, j) meaning a_i^-1 b_j, per contraction-table variant.
std::vector<std::pair<int, int>> edge_tags(const MorphingProtocol& p) {
    std::size_t wa = p.a_rest.size() + 1, wb = p.b_rest.size() + 1;
    std::vector<std::pair<int, int>> tags;
    if (p.variant == Variant::reverse_round2) {
        tags = {{1, 3}, {3, 1}, {1, 2}, {2, 1}, {2, 2}};
    } else {
        for (std::size_t j = 1; j <= wb; j++) tags.push_back({1, static_cast<int>(j)});
        for (std::size_t i = 2; i <= wa; i++) tags.push_back({static_cast<int>(i), 1});
    }
    return tags;
}

uint32_t element_of(const MorphingProtocol& p, bool a_side, int idx) {
    if (idx == 1) return a_side ? p.a1 : p.b1;
    return a_side ? p.a_rest[idx - 2] : p.b_rest[idx - 2];
}

uint32_t tag_label(const MorphingProtocol& p, int i, int j) {
    const Group& g = p.code.group;
    return g.mul(g.inv(element_of(p, true, i)), element_of(p, false, j));
}

}  // namespace

ConnectivityGraph connectivity_graph(const MorphingProtocol& protocol) {
    const Group& g = protocol.code.group;
    ConnectivityGraph out;
    out.l = g.order;
    out.n_vertices = 2 * g.order;

    for (auto [i, j] : edge_tags(protocol)) {
        uint32_t lab = tag_label(protocol, i, j);
        for (uint32_t ge = 0; ge < g.order; ge++)
            out.tagged.push_back({ge, g.mul(lab, ge), i, j});
    }

    // cross-check against the CNOTs actually emitted by the protocol
    std::set<std::pair<uint32_t, uint32_t>> from_gates, from_tags;
    for (int idx = 0; idx < 2; idx++)
        for (std::size_t r = 0; r < protocol.n_rounds; r++)
            for (auto [c, t] : protocol.rounds[idx][r])
                from_gates.insert({std::min(c, t), std::max(c, t)});
    for (const auto& e : out.tagged) {
        uint32_t a = e.left_elem, b = static_cast<uint32_t>(g.order) + e.right_elem;
        from_tags.insert({std::min(a, b), std::max(a, b)});
    }
    if (from_gates != from_tags)
        throw construction_bug_error("tagged edge set does not match the protocol gates");

    out.edges.assign(from_tags.begin(), from_tags.end());
    out.degree.assign(out.n_vertices, 0);
    for (auto [a, b] : out.edges) {
        out.degree[a]++;
        out.degree[b]++;
    }
    out.max_degree = *std::max_element(out.degree.begin(), out.degree.end());
    return out;
}

bool is_planar(std::size_t n_vertices, const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    G graph(n_vertices);
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (auto [a, b] : edges) {
        if (a == b) continue;
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        if (seen.insert(key).second) boost::add_edge(a, b, graph);
    }
    return boost::boyer_myrvold_planarity_test(graph);
}

BiplanarPartition biplanar_partition(const ConnectivityGraph& graph,
                                     const MorphingProtocol& protocol) {
    std::size_t wa = protocol.a_rest.size() + 1, wb = protocol.b_rest.size() + 1;
    if (wa > 3 || wb > 3)
        throw error("biplanar partition rule is defined for weight <= 6 protocols");
    if (protocol.variant == Variant::reverse_round2)
        throw error("biplanar partition rule applies to the standard edge labels");

    const Group& g = protocol.code.group;
    GroupSubset left_even = protocol.kernel;
    GroupSubset right_even = g.shift(protocol.kernel, g.mul(protocol.a1, protocol.b1));

    BiplanarPartition part;
    for (const auto& e : graph.tagged) {
        if (e.i == 1 && e.j == 1) {
            bool even = left_even.get(e.left_elem);
            (even ? part.e1 : part.e2).push_back(e);
        } else if (e.j == 1) {
            part.e1.push_back(e);
        } else {
            part.e2.push_back(e);
        }
    }

    auto simple_edges = [&](const std::vector<TaggedEdge>& es) {
        std::set<std::pair<uint32_t, uint32_t>> dedup;
        for (const auto& e : es)
            dedup.insert({e.left_elem, static_cast<uint32_t>(graph.l) + e.right_elem});
        return std::vector<std::pair<uint32_t, uint32_t>>(dedup.begin(), dedup.end());
    };
    std::vector<std::pair<uint32_t, uint32_t>> s1 = simple_edges(part.e1), s2 = simple_edges(part.e2);
    part.e1_planar = is_planar(graph.n_vertices, s1);
    part.e2_planar = is_planar(graph.n_vertices, s2);

    auto is_even_vertex = [&](uint32_t v) {
        if (v < graph.l) return static_cast<bool>(left_even.get(v));
        return static_cast<bool>(right_even.get(v - graph.l));
    };
    auto wheel_check = [&](const std::vector<std::pair<uint32_t, uint32_t>>& es, bool even_is_hub) {
        std::vector<std::size_t> deg(graph.n_vertices, 0);
        for (auto [a, b] : es) { deg[a]++; deg[b]++; }
        for (uint32_t v = 0; v < graph.n_vertices; v++) {
            std::size_t want = is_even_vertex(v) == even_is_hub ? 3 : 2;
            if (deg[v] != want) return false;
        }
        return true;
    };
    // the degree-3/degree-2 wheel structure is specific to weight-6 codes
    part.wheel_ok = wa == 3 && wb == 3 && wheel_check(s1, true) && wheel_check(s2, false);
    return part;
}

std::optional<ToricPlusLayout> toric_plus_layout(const MorphingProtocol& protocol) {
    const Group& g = protocol.code.group;
    if (g.orders.size() != 2) return std::nullopt;
    auto tags = edge_tags(protocol);
    std::vector<uint32_t> labels;
    for (auto [i, j] : tags) labels.push_back(tag_label(protocol, i, j));

    auto generates = [&](uint32_t g1, uint32_t g2) {
        std::vector<bool> seen(g.order, false);
        std::size_t count = 0;
        uint32_t p1 = 0;
        int o1 = g.element_order(g1), o2 = g.element_order(g2);
        for (int q = 0; q < o1; q++) {
            uint32_t p = p1;
            for (int r = 0; r < o2; r++) {
                if (!seen[p]) { seen[p] = true; count++; }
                p = g.mul(p, g2);
            }
            p1 = g.mul(p1, g1);
        }
        return count == g.order;
    };

    for (std::size_t base = 0; base < labels.size(); base++) {
        for (std::size_t u = 0; u < labels.size(); u++) {
            if (u == base) continue;
            for (std::size_t v = 0; v < labels.size(); v++) {
                if (v == base || v == u) continue;
                uint32_t g1 = g.mul(g.inv(labels[base]), labels[u]);
                uint32_t g2 = g.mul(g.inv(labels[base]), labels[v]);
                int lambda = g.element_order(g1), mu = g.element_order(g2);
                if (static_cast<std::size_t>(lambda) * static_cast<std::size_t>(mu) != g.order)
                    continue;
                if (!generates(g1, g2)) continue;

                ToricPlusLayout lay;
                lay.g1 = g1;
                lay.g2 = g2;
                lay.lambda = lambda;
                lay.mu = mu;
                lay.base_tag = static_cast<int>(base);
                lay.new_group = make_group({lambda, mu});
                lay.phi.assign(g.order, 0);
                // phi = (phi~)^-1 with phi~(x) = g1, phi~(y) = g2
                uint32_t p1 = 0;
                for (int q = 0; q < lambda; q++) {
                    uint32_t p = p1;
                    for (int r = 0; r < mu; r++) {
                        lay.phi[p] = lay.new_group.index_of({q, r});
                        p = g.mul(p, g2);
                    }
                    p1 = g.mul(p1, g1);
                }
                for (uint32_t lab : labels)
                    lay.relabeled_edge_labels.push_back(
                        lay.phi[g.mul(g.inv(labels[base]), lab)]);
                return lay;
            }
        }
    }
    return std::nullopt;
}

std::string graph_to_dot(const ConnectivityGraph& graph, const MorphingProtocol& protocol) {
    const Group& g = protocol.code.group;
    std::ostringstream out;
    out << "graph connectivity {\n";
    for (uint32_t e = 0; e < graph.l; e++)
        out << "  L" << e << " [label=\"L:" << g.element_name(e) << "\"];\n";
    for (uint32_t e = 0; e < graph.l; e++)
        out << "  R" << e << " [label=\"R:" << g.element_name(e) << "\"];\n";
    for (const auto& e : graph.tagged)
        out << "  L" << e.left_elem << " -- R" << e.right_elem << " [label=\"(" << e.i << ","
            << e.j << ")\"];\n";
    out << "}\n";
    return out.str();
}

std::string graph_to_csv(const ConnectivityGraph& graph, const MorphingProtocol& protocol,
                         const BiplanarPartition* partition) {
    const Group& g = protocol.code.group;
    std::ostringstream out;
    out << "left_label,right_label,i,j,subgraph\n";
    auto in_set = [](const std::vector<TaggedEdge>& es, const TaggedEdge& e) {
        for (const auto& x : es)
            if (x.left_elem == e.left_elem && x.i == e.i && x.j == e.j) return true;
        return false;
    };
    for (const auto& e : graph.tagged) {
        int sub = 0;
        if (partition) sub = in_set(partition->e1, e) ? 1 : 2;
        out << g.element_name(e.left_elem) << "," << g.element_name(e.right_elem) << "," << e.i
            << "," << e.j << "," << sub << "\n";
    }
    return out.str();
}

}  // namespace morphbb

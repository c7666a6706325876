#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morph.hpp"

namespace morphbb {

struct TaggedEdge {
    uint32_t left_elem, right_elem;  // group labels of q(L,.) and q(R,.)
    int i, j;                        // edge label a_i^-1 b_j
};

struct ConnectivityGraph {
    std::size_t n_vertices = 0;  // 2|G|, left block then right block
    std::size_t l = 0;
    std::vector<TaggedEdge> tagged;                       // raw tagged set
    std::vector<std::pair<uint32_t, uint32_t>> edges;     // merged simple edges
    std::vector<std::size_t> degree;                      // simple-graph degrees
    std::size_t max_degree = 0;
    bool bipartite = true;  // by construction: left vs right blocks
};

ConnectivityGraph connectivity_graph(const MorphingProtocol& protocol);

// General combinatorial planarity test on a simple undirected graph.
bool is_planar(std::size_t n_vertices, const std::vector<std::pair<uint32_t, uint32_t>>& edges);

struct BiplanarPartition {
    std::vector<TaggedEdge> e1, e2;
    bool e1_planar = false, e2_planar = false;
    // wheel structure: in E1 even qubits have degree 3 and odd degree 2;
    // in E2 the roles are mirrored
    bool wheel_ok = false;
    bool ok() const { return e1_planar && e2_planar && wheel_ok; }
};

BiplanarPartition biplanar_partition(const ConnectivityGraph& graph,
                                     const MorphingProtocol& protocol);

struct ToricPlusLayout {
    uint32_t g1, g2;      // generators in the original group
    int lambda, mu;       // their orders, lambda * mu = |G|
    Group new_group;      // Z_lambda x Z_mu
    std::vector<uint32_t> phi;  // parent element index -> new group index
    std::vector<uint32_t> relabeled_edge_labels;  // per tagged label, in new group
    int base_tag = 0;     // index of the edge label mapped to the identity
};

// Searches for a pair of edge-label quotients that generate G with orders
// multiplying to |G|; on success the relabeled edge set contains {1, x, y}.
std::optional<ToricPlusLayout> toric_plus_layout(const MorphingProtocol& protocol);

std::string graph_to_dot(const ConnectivityGraph& graph, const MorphingProtocol& protocol);
std::string graph_to_csv(const ConnectivityGraph& graph, const MorphingProtocol& protocol,
                         const BiplanarPartition* partition);

}  // namespace morphbb

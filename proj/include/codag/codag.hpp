#pragma once

#include <vector>

#include "codag/dag.hpp"
#include "codag/network.hpp"

namespace codag {

struct CoArc {
    int tail = -1;
    int head = -1;
    int original_arc = -1;
};

// Condensed DAG: acyclic replica graph with the correspondence back to the
// original network. The original network is kept alongside so latency
// evaluation and demand are always available.
struct CoDAG {
    int num_nodes = 0;
    std::vector<CoArc> arcs;
    std::vector<int> node_original;  // CoDAG node -> original node
    int origin = -1;
    int destination = -1;
    OriginalNetwork network;

    DepthHeightTable table;
    ArcOrders orders;
    std::vector<std::vector<int>> out_arcs;  // per node
    std::vector<std::vector<int>> in_arcs;

    Digraph digraph() const;
    ArcCorrespondence correspondence() const;

    // Recompute table, orders and adjacency after arcs/nodes change.
    void refresh();
};

// Route tree from construction step S1: one branch per original route,
// branches disjoint except for the shared root.
struct RouteTree {
    std::vector<int> parent_node;   // -1 for the root (node 0)
    std::vector<int> parent_label;  // original arc into each node, -1 for root
    std::vector<int> node_original;
    std::vector<int> node_depth;
    std::vector<int> node_height;
    std::vector<int> leaves;        // one per route, in route order
    std::vector<Route> routes;      // the enumerated original routes

    int num_nodes() const { return static_cast<int>(parent_node.size()); }
    int num_arcs() const { return num_nodes() - 1; }
};

// Disjoint cover of the tree nodes; each cell merges to one CoDAG node.
using Partition = std::vector<std::vector<int>>;

RouteTree expand_tree(const OriginalNetwork& net, long cap = kDefaultRouteCap);

// Step S2. Merges tree nodes sharing a route prefix, then cells whose
// continuation (suffix) sets coincide; the quotient is the unique minimal
// acyclic graph with the same route set.
Partition build_partition(const RouteTree& tree);

struct PartitionReport {
    bool same_original = false;        // condition (i), node identity part
    bool same_height_or_depth = false; // condition (i), level part
    bool no_interleaving = false;      // condition (ii), interval reading
    bool legal = false;                // all of the above
};

PartitionReport check_partition(const RouteTree& tree, const Partition& p);

// Step S3. Collapses each cell to a node and deduplicates arcs by
// (tail cell, head cell, original arc). All leaf cells join into the single
// destination node. Throws IllegalPartitionError if the quotient has a cycle.
CoDAG merge(const OriginalNetwork& net, const RouteTree& tree, const Partition& p);

// Full S1-S3 pipeline; deterministic for a given input.
CoDAG build_codag(const OriginalNetwork& net, long cap = kDefaultRouteCap);

}  // namespace codag

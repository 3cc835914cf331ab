#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace codag {

struct ArcView {
    int tail = -1;
    int head = -1;
};

// Minimal directed multigraph used by the analysis passes.
struct Digraph {
    int num_nodes = 0;
    std::vector<ArcView> arcs;
};

// A route is the ordered list of arc indices from origin to destination.
using Route = std::vector<int>;

inline constexpr long kDefaultRouteCap = 1000000;

// Effective enumeration cap: CODAG_ROUTE_CAP environment variable when set,
// otherwise the supplied fallback.
long route_cap_from_env(long fallback = kDefaultRouteCap);

// All simple o->d routes, in lexicographic order by arc index.
// Throws EnumerationLimitError when more than `cap` routes exist.
std::vector<Route> enumerate_routes(const Digraph& g, int origin, int destination,
                                    long cap = kDefaultRouteCap);

struct DepthHeightTable {
    std::vector<int> arc_depth;    // l_a >= 1
    std::vector<int> arc_height;   // m_a >= 1, destination-incident arcs have m_a = 1
    std::vector<int> node_depth;   // lbar_i, 0 at the origin
    std::vector<int> node_height;  // mbar_i, 0 at the destination
    int graph_depth = 0;
    int graph_height = 0;
};

// Longest-path dynamic program equivalent to the max-over-routes definition
// (l_a = max_r l_{a,r}, m_a = max_r (|r| - l_{a,r} + 1)).
// Requires an acyclic graph in which every arc lies on some o->d route;
// throws NotADagError / CoverageError otherwise.
DepthHeightTable compute_depth_height(const Digraph& g, int origin, int destination);

struct ClauseResult {
    std::string name;
    bool pass = false;
    std::string detail;  // counterexample description on failure
};

struct StructureReport {
    std::vector<ClauseResult> clauses;
    bool all_pass() const;
};

// Exhaustive check of the eight depth/height proposition clauses:
// depth 1 iff tail is o, max depth implies head is d, strict increase along
// routes, all depth levels occupied, and the four height counterparts.
StructureReport verify_structure(const Digraph& g, int origin, int destination,
                                 const DepthHeightTable& table);

struct ArcOrders {
    std::vector<int> by_depth;   // ascending arc depth, ties by arc index
    std::vector<int> by_height;  // ascending arc height, ties by arc index
};

ArcOrders topological_orders(const DepthHeightTable& table);

}  // namespace codag

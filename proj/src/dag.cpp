#include "codag/dag.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <string>

#include "codag/errors.hpp"

namespace codag {

long route_cap_from_env(long fallback) {
    const char* v = std::getenv("CODAG_ROUTE_CAP");
    if (v == nullptr || *v == '\0') return fallback;
    char* end = nullptr;
    long cap = std::strtol(v, &end, 10);
    if (end == v || cap <= 0) throw ConfigError("invalid CODAG_ROUTE_CAP value");
    return cap;
}

std::vector<Route> enumerate_routes(const Digraph& g, int origin, int destination,
                                    long cap) {
    std::vector<std::vector<int>> out(g.num_nodes);
    for (int j = 0; j < static_cast<int>(g.arcs.size()); ++j)
        out[g.arcs[j].tail].push_back(j);
    for (auto& v : out) std::sort(v.begin(), v.end());

    std::vector<Route> routes;
    std::vector<char> on_path(g.num_nodes, 0);
    Route path;

    // Iterative DFS in ascending arc order yields lexicographic route order.
    struct Frame {
        int node;
        std::size_t next;
    };
    std::vector<Frame> stack;
    stack.push_back({origin, 0});
    on_path[origin] = 1;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.node == destination) {
            routes.push_back(path);
            if (static_cast<long>(routes.size()) > cap)
                throw EnumerationLimitError("route count exceeds cap " +
                                            std::to_string(cap));
            on_path[f.node] = 0;
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        if (f.next >= out[f.node].size()) {
            on_path[f.node] = 0;
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        int arc = out[f.node][f.next++];
        int to = g.arcs[arc].head;
        if (on_path[to]) continue;
        path.push_back(arc);
        on_path[to] = 1;
        stack.push_back({to, 0});
    }
    return routes;
}

namespace {

// Topological node order; throws NotADagError on a cycle.
std::vector<int> topo_nodes(const Digraph& g) {
    std::vector<int> indeg(g.num_nodes, 0);
    std::vector<std::vector<int>> out(g.num_nodes);
    for (const auto& a : g.arcs) {
        ++indeg[a.head];
        out[a.tail].push_back(a.head);
    }
    std::vector<int> order;
    std::queue<int> q;
    for (int i = 0; i < g.num_nodes; ++i)
        if (indeg[i] == 0) q.push(i);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        order.push_back(v);
        for (int u : out[v])
            if (--indeg[u] == 0) q.push(u);
    }
    if (static_cast<int>(order.size()) != g.num_nodes)
        throw NotADagError("graph contains a cycle");
    return order;
}

}  // namespace

DepthHeightTable compute_depth_height(const Digraph& g, int origin, int destination) {
    const int n = g.num_nodes;
    const int m = static_cast<int>(g.arcs.size());
    auto order = topo_nodes(g);

    // Coverage: every arc must lie on an o->d route, i.e. its tail is
    // reachable from o and its head co-reachable to d.
    std::vector<char> from_o(n, 0), to_d(n, 0);
    {
        std::vector<std::vector<int>> out(n), in(n);
        for (const auto& a : g.arcs) {
            out[a.tail].push_back(a.head);
            in[a.head].push_back(a.tail);
        }
        std::queue<int> q;
        q.push(origin);
        from_o[origin] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : out[v])
                if (!from_o[u]) {
                    from_o[u] = 1;
                    q.push(u);
                }
        }
        q.push(destination);
        to_d[destination] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : in[v])
                if (!to_d[u]) {
                    to_d[u] = 1;
                    q.push(u);
                }
        }
    }
    for (const auto& a : g.arcs)
        if (!from_o[a.tail] || !to_d[a.head])
            throw CoverageError("arc lies on no origin-destination route");

    DepthHeightTable t;
    t.arc_depth.assign(m, 0);
    t.arc_height.assign(m, 0);
    t.node_depth.assign(n, 0);
    t.node_height.assign(n, 0);

    // Longest arc-count path from the origin, forward over the topo order.
    std::vector<std::vector<int>> out_arcs(n), in_arcs(n);
    for (int j = 0; j < m; ++j) {
        out_arcs[g.arcs[j].tail].push_back(j);
        in_arcs[g.arcs[j].head].push_back(j);
    }
    for (int v : order)
        for (int j : out_arcs[v]) {
            t.arc_depth[j] = t.node_depth[v] + 1;
            int h = g.arcs[j].head;
            t.node_depth[h] = std::max(t.node_depth[h], t.arc_depth[j]);
        }
    // Longest path to the destination, backward.
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (int j : in_arcs[*it]) {
            t.arc_height[j] = t.node_height[*it] + 1;
            int v = g.arcs[j].tail;
            t.node_height[v] = std::max(t.node_height[v], t.arc_height[j]);
        }
    t.graph_depth = m ? *std::max_element(t.arc_depth.begin(), t.arc_depth.end()) : 0;
    t.graph_height = m ? *std::max_element(t.arc_height.begin(), t.arc_height.end()) : 0;
    return t;
}

bool StructureReport::all_pass() const {
    for (const auto& c : clauses)
        if (!c.pass) return false;
    return true;
}

StructureReport verify_structure(const Digraph& g, int origin, int destination,
                                 const DepthHeightTable& t) {
    StructureReport rep;
    const int m = static_cast<int>(g.arcs.size());
    auto add = [&rep](const std::string& name, bool pass, const std::string& detail) {
        rep.clauses.push_back({name, pass, pass ? "" : detail});
    };

    bool ok = true;
    std::string why;
    for (int j = 0; j < m && ok; ++j)
        if ((t.arc_depth[j] == 1) != (g.arcs[j].tail == origin)) {
            ok = false;
            why = "arc " + std::to_string(j);
        }
    add("depth_one_iff_origin_tail", ok, why);

    ok = true;
    why.clear();
    for (int j = 0; j < m && ok; ++j)
        if (t.arc_depth[j] == t.graph_depth && g.arcs[j].head != destination) {
            ok = false;
            why = "arc " + std::to_string(j);
        }
    add("max_depth_ends_at_destination", ok, why);

    // Strict monotonicity along routes. Any consecutive arc pair (a, a') with
    // j_a = i_{a'} extends to a full route, so the pair scan is exact.
    ok = true;
    why.clear();
    for (int j = 0; j < m && ok; ++j)
        for (int k = 0; k < m; ++k)
            if (g.arcs[j].head == g.arcs[k].tail && t.arc_depth[k] <= t.arc_depth[j]) {
                ok = false;
                why = "arcs " + std::to_string(j) + " -> " + std::to_string(k);
                break;
            }
    add("depth_strictly_increasing", ok, why);

    ok = true;
    why.clear();
    {
        std::vector<char> seen(t.graph_depth + 1, 0);
        for (int j = 0; j < m; ++j) seen[t.arc_depth[j]] = 1;
        for (int lvl = 1; lvl <= t.graph_depth; ++lvl)
            if (!seen[lvl]) {
                ok = false;
                why = "depth level " + std::to_string(lvl) + " empty";
            }
    }
    add("every_depth_level_occupied", ok, why);

    ok = true;
    why.clear();
    for (int j = 0; j < m && ok; ++j)
        if ((t.arc_height[j] == 1) != (g.arcs[j].head == destination)) {
            ok = false;
            why = "arc " + std::to_string(j);
        }
    add("height_one_iff_destination_head", ok, why);

    ok = true;
    why.clear();
    for (int j = 0; j < m && ok; ++j)
        if (t.arc_height[j] == t.graph_height && g.arcs[j].tail != origin) {
            ok = false;
            why = "arc " + std::to_string(j);
        }
    add("max_height_starts_at_origin", ok, why);

    ok = true;
    why.clear();
    for (int j = 0; j < m && ok; ++j)
        for (int k = 0; k < m; ++k)
            if (g.arcs[j].head == g.arcs[k].tail && t.arc_height[k] >= t.arc_height[j]) {
                ok = false;
                why = "arcs " + std::to_string(j) + " -> " + std::to_string(k);
                break;
            }
    add("height_strictly_decreasing", ok, why);

    ok = true;
    why.clear();
    {
        std::vector<char> seen(t.graph_height + 1, 0);
        for (int j = 0; j < m; ++j) seen[t.arc_height[j]] = 1;
        for (int lvl = 1; lvl <= t.graph_height; ++lvl)
            if (!seen[lvl]) {
                ok = false;
                why = "height level " + std::to_string(lvl) + " empty";
            }
    }
    add("every_height_level_occupied", ok, why);

    return rep;
}

ArcOrders topological_orders(const DepthHeightTable& t) {
    ArcOrders o;
    const int m = static_cast<int>(t.arc_depth.size());
    o.by_depth.resize(m);
    o.by_height.resize(m);
    std::iota(o.by_depth.begin(), o.by_depth.end(), 0);
    std::iota(o.by_height.begin(), o.by_height.end(), 0);
    std::stable_sort(o.by_depth.begin(), o.by_depth.end(),
                     [&t](int a, int b) { return t.arc_depth[a] < t.arc_depth[b]; });
    std::stable_sort(o.by_height.begin(), o.by_height.end(),
                     [&t](int a, int b) { return t.arc_height[a] < t.arc_height[b]; });
    return o;
}

}  // namespace codag

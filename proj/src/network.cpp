#include "codag/network.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include "codag/errors.hpp"

namespace codag {

double evaluate_latency(const LatencyFunction& f, double x) {
    if (x < 0.0) throw std::domain_error("latency evaluated at negative flow");
    switch (f.kind) {
        case LatencyKind::Affine:
            return f.k0 + f.k1 * x;
        case LatencyKind::Bpr:
            return f.k0 + f.k1 * std::pow(x, f.power);
    }
    throw std::logic_error("unknown latency kind");
}

double latency_primitive(const LatencyFunction& f, double x) {
    if (x < 0.0) throw std::domain_error("latency primitive at negative flow");
    switch (f.kind) {
        case LatencyKind::Affine:
            return f.k0 * x + 0.5 * f.k1 * x * x;
        case LatencyKind::Bpr:
            return f.k0 * x + f.k1 * std::pow(x, f.power + 1.0) / (f.power + 1.0);
    }
    throw std::logic_error("unknown latency kind");
}

namespace {

std::vector<char> reachable(int n, const std::vector<OriginalArc>& arcs, int start,
                            bool backward) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& a : arcs) {
        if (backward)
            adj[a.head].push_back(a.tail);
        else
            adj[a.tail].push_back(a.head);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int u : adj[v])
            if (!seen[u]) {
                seen[u] = 1;
                q.push(u);
            }
    }
    return seen;
}

}  // namespace

void validate_network(const OriginalNetwork& net) {
    if (net.num_nodes < 2) throw SchemaError("network needs at least two nodes");
    if (net.origin < 0 || net.origin >= net.num_nodes || net.destination < 0 ||
        net.destination >= net.num_nodes)
        throw SchemaError("origin/destination out of range");
    if (net.origin == net.destination)
        throw SchemaError("origin and destination must differ");
    if (!(net.demand > 0.0)) throw SchemaError("demand must be positive");
    if (net.arcs.empty()) throw SchemaError("network has no arcs");
    for (const auto& a : net.arcs) {
        if (a.tail < 0 || a.tail >= net.num_nodes || a.head < 0 ||
            a.head >= net.num_nodes)
            throw SchemaError("arc endpoint out of range");
        if (a.tail == a.head) throw SchemaError("self-loop arc");
        if (!(a.latency.k1 > 0.0))
            throw SchemaError("latency must be strictly increasing (k1 > 0)");
        if (a.latency.k0 < 0.0) throw SchemaError("negative latency coefficient");
        if (a.latency.kind == LatencyKind::Bpr && !(a.latency.power > 0.0))
            throw SchemaError("bpr exponent must be positive");
    }
    auto fwd = reachable(net.num_nodes, net.arcs, net.origin, false);
    auto bwd = reachable(net.num_nodes, net.arcs, net.destination, true);
    for (int i = 0; i < net.num_nodes; ++i) {
        if (!fwd[i]) throw SchemaError("node unreachable from the origin");
        if (!bwd[i]) throw SchemaError("node cannot reach the destination");
    }
    if (!bwd[net.origin]) throw SchemaError("no origin-destination route");
}

double aggregate_flow(const ArcCorrespondence& corr, const std::vector<double>& w,
                      int original_arc) {
    if (original_arc < 0) throw std::out_of_range("unknown original arc");
    if (corr.size() != w.size())
        throw std::invalid_argument("flow vector size mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < corr.size(); ++j)
        if (corr[j] == original_arc) total += w[j];
    return total;
}

}  // namespace codag

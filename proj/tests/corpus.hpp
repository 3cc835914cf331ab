#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "codag/codag.hpp"
#include "codag/errors.hpp"
#include "codag/io.hpp"

namespace corpus {

inline std::string data_path(const std::string& name) {
    return std::string(CODAG_DATA_DIR) + "/" + name;
}

inline codag::OriginalNetwork figure1() {
    return codag::load_network(data_path("figure1_network.json"));
}

inline codag::LatencyFunction affine(double k0, double k1) {
    codag::LatencyFunction f;
    f.kind = codag::LatencyKind::Affine;
    f.k0 = k0;
    f.k1 = k1;
    return f;
}

// Chain of n nodes with every consecutive arc doubled: 2^(n-1) routes,
// route tree with 2^n - 2 arcs, CoDAG with 2(n-1) arcs.
inline codag::OriginalNetwork doubled_chain(int n) {
    codag::OriginalNetwork net;
    net.num_nodes = n;
    for (int i = 0; i < n; ++i) net.node_labels.push_back("n" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i)
        for (int copy = 0; copy < 2; ++copy) {
            codag::OriginalArc a;
            a.tail = i;
            a.head = i + 1;
            a.latency = affine(copy == 0 ? 0.0 : 1.0, 1.0);
            a.label = "e" + std::to_string(i) + "_" + std::to_string(copy);
            net.arcs.push_back(a);
        }
    net.origin = 0;
    net.destination = n - 1;
    net.demand = 1.0;
    return net;
}

// Two parallel origin-destination arcs.
inline codag::OriginalNetwork parallel_pair(double k0a = 0.0, double k1a = 1.0,
                                            double k0b = 0.0, double k1b = 1.0) {
    codag::OriginalNetwork net;
    net.num_nodes = 2;
    net.node_labels = {"o", "d"};
    codag::OriginalArc a;
    a.tail = 0;
    a.head = 1;
    a.latency = affine(k0a, k1a);
    a.label = "p0";
    net.arcs.push_back(a);
    a.latency = affine(k0b, k1b);
    a.label = "p1";
    net.arcs.push_back(a);
    net.origin = 0;
    net.destination = 1;
    net.demand = 1.0;
    return net;
}

// s1(u) = u against s2(u) = u + 1.
inline codag::OriginalNetwork asymmetric_pair() {
    return parallel_pair(0.0, 1.0, 1.0, 1.0);
}

inline codag::OriginalNetwork single_route_chain(int arcs) {
    codag::OriginalNetwork net;
    net.num_nodes = arcs + 1;
    for (int i = 0; i <= arcs; ++i) net.node_labels.push_back("n" + std::to_string(i));
    for (int i = 0; i < arcs; ++i) {
        codag::OriginalArc a;
        a.tail = i;
        a.head = i + 1;
        a.latency = affine(1.0, 1.0);
        a.label = "c" + std::to_string(i);
        net.arcs.push_back(a);
    }
    net.origin = 0;
    net.destination = arcs;
    net.demand = 1.0;
    return net;
}

// Random small multigraph with every node on an origin-destination walk and a
// bounded simple-route count. Deterministic per seed.
inline codag::OriginalNetwork random_network(unsigned seed, int max_nodes = 8,
                                             int max_arcs = 16, long route_cap = 200) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(0.1, 2.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int n = 3 + static_cast<int>(rng() % (max_nodes - 2));
        int m = n + static_cast<int>(rng() % (max_arcs - n + 1));
        std::vector<std::pair<int, int>> arcs;
        // A backbone path keeps o -> d connected, then random extra arcs.
        for (int i = 0; i + 1 < n; ++i) arcs.emplace_back(i, i + 1);
        while (static_cast<int>(arcs.size()) < m) {
            int t = static_cast<int>(rng() % n), h = static_cast<int>(rng() % n);
            if (t != h) arcs.emplace_back(t, h);
        }
        // Keep only nodes on some origin-destination walk.
        codag::Digraph g;
        g.num_nodes = n;
        for (auto [t, h] : arcs) g.arcs.push_back({t, h});
        std::vector<char> fwd(n, 0), bwd(n, 0);
        fwd[0] = 1;
        bwd[n - 1] = 1;
        for (int pass = 0; pass < n; ++pass)
            for (auto [t, h] : arcs) {
                if (fwd[t]) fwd[h] = 1;
                if (bwd[h]) bwd[t] = 1;
            }
        std::vector<int> remap(n, -1);
        int kept = 0;
        for (int i = 0; i < n; ++i)
            if (fwd[i] && bwd[i]) remap[i] = kept++;
        if (remap[0] < 0 || remap[n - 1] < 0 || kept < 2) continue;

        codag::OriginalNetwork net;
        net.num_nodes = kept;
        for (int i = 0; i < kept; ++i) net.node_labels.push_back("n" + std::to_string(i));
        int arc_id = 0;
        for (auto [t, h] : arcs) {
            if (remap[t] < 0 || remap[h] < 0) continue;
            codag::OriginalArc a;
            a.tail = remap[t];
            a.head = remap[h];
            a.latency = affine(coeff(rng), coeff(rng));
            a.label = "r" + std::to_string(arc_id++);
            net.arcs.push_back(a);
        }
        net.origin = remap[0];
        net.destination = remap[n - 1];
        net.demand = 0.5 + (static_cast<double>(rng() % 1000) / 1000.0);
        try {
            codag::validate_network(net);
            codag::Digraph gv;
            gv.num_nodes = net.num_nodes;
            for (const auto& a : net.arcs) gv.arcs.push_back({a.tail, a.head});
            codag::enumerate_routes(gv, net.origin, net.destination, route_cap);
        } catch (const codag::SchemaError&) {
            continue;
        } catch (const codag::EnumerationLimitError&) {
            continue;
        }
        return net;
    }
    throw std::runtime_error("random_network failed to produce an instance");
}

// Number of distinct nonempty route prefixes, i.e. the arc count of the
// prefix-merged route tree.
inline long count_distinct_prefixes(const codag::OriginalNetwork& net) {
    codag::Digraph g;
    g.num_nodes = net.num_nodes;
    for (const auto& a : net.arcs) g.arcs.push_back({a.tail, a.head});
    auto routes = codag::enumerate_routes(g, net.origin, net.destination, 1000000);
    std::set<std::vector<int>> prefixes;
    for (const auto& r : routes)
        for (std::size_t k = 1; k <= r.size(); ++k)
            prefixes.insert(std::vector<int>(r.begin(), r.begin() + k));
    return static_cast<long>(prefixes.size());
}

}  // namespace corpus

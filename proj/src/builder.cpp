#include "codag/codag.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "codag/errors.hpp"

namespace codag {

Digraph CoDAG::digraph() const {
    Digraph g;
    g.num_nodes = num_nodes;
    g.arcs.reserve(arcs.size());
    for (const auto& a : arcs) g.arcs.push_back({a.tail, a.head});
    return g;
}

ArcCorrespondence CoDAG::correspondence() const {
    ArcCorrespondence corr;
    corr.reserve(arcs.size());
    for (const auto& a : arcs) corr.push_back(a.original_arc);
    return corr;
}

void CoDAG::refresh() {
    table = compute_depth_height(digraph(), origin, destination);
    orders = topological_orders(table);
    out_arcs.assign(num_nodes, {});
    in_arcs.assign(num_nodes, {});
    for (int j = 0; j < static_cast<int>(arcs.size()); ++j) {
        out_arcs[arcs[j].tail].push_back(j);
        in_arcs[arcs[j].head].push_back(j);
    }
}

RouteTree expand_tree(const OriginalNetwork& net, long cap) {
    Digraph g;
    g.num_nodes = net.num_nodes;
    for (const auto& a : net.arcs) g.arcs.push_back({a.tail, a.head});
    auto routes = enumerate_routes(g, net.origin, net.destination, cap);

    RouteTree tree;
    tree.routes = routes;
    tree.parent_node.push_back(-1);
    tree.parent_label.push_back(-1);
    tree.node_original.push_back(net.origin);
    tree.node_depth.push_back(0);
    tree.node_height.push_back(0);
    for (const auto& r : routes) {
        int prev = 0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            int node = tree.num_nodes();
            tree.parent_node.push_back(prev);
            tree.parent_label.push_back(r[k]);
            tree.node_original.push_back(net.arcs[r[k]].head);
            tree.node_depth.push_back(static_cast<int>(k) + 1);
            tree.node_height.push_back(static_cast<int>(r.size() - k) - 1);
            prev = node;
        }
        tree.leaves.push_back(prev);
    }
    // Root height is the longest route.
    for (const auto& r : routes)
        tree.node_height[0] = std::max(tree.node_height[0], static_cast<int>(r.size()));
    return tree;
}

namespace {

struct Trie {
    // children[state] maps original arc label -> child state
    std::vector<std::map<int, int>> children{1};
    std::vector<int> state_of_tree_node;

    int walk(int state, int label) {
        auto it = children[state].find(label);
        if (it != children[state].end()) return it->second;
        int next = static_cast<int>(children.size());
        children.emplace_back();
        children[state][label] = next;
        return next;
    }
};

}  // namespace

Partition build_partition(const RouteTree& tree) {
    // Prefix-share the branches: tree nodes with equal route prefixes map to
    // one trie state.
    Trie trie;
    trie.state_of_tree_node.assign(tree.num_nodes(), 0);
    for (std::size_t r = 0; r < tree.routes.size(); ++r) {
        int node = tree.leaves[r];
        // Recover the branch nodes root->leaf.
        std::vector<int> branch;
        for (int v = node; v != 0; v = tree.parent_node[v]) branch.push_back(v);
        std::reverse(branch.begin(), branch.end());
        int state = 0;
        for (int v : branch) {
            state = trie.walk(state, tree.parent_label[v]);
            trie.state_of_tree_node[v] = state;
        }
    }

    // Merge states with identical continuation sets. Signatures are computed
    // bottom-up; child states always carry larger indices than their parents.
    const int num_states = static_cast<int>(trie.children.size());
    std::vector<int> sig(num_states, -1);
    std::map<std::vector<std::pair<int, int>>, int> canon;
    for (int s = num_states - 1; s >= 0; --s) {
        std::vector<std::pair<int, int>> key;
        key.reserve(trie.children[s].size());
        for (const auto& [label, child] : trie.children[s])
            key.emplace_back(label, sig[child]);
        auto it = canon.try_emplace(key, static_cast<int>(canon.size())).first;
        sig[s] = it->second;
    }

    // Cells indexed by signature, ordered by smallest member tree node.
    std::map<int, std::vector<int>> by_sig;
    for (int v = 0; v < tree.num_nodes(); ++v)
        by_sig[sig[trie.state_of_tree_node[v]]].push_back(v);
    std::vector<std::vector<int>> cells;
    cells.reserve(by_sig.size());
    for (auto& [s, members] : by_sig) cells.push_back(std::move(members));
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return cells;
}

PartitionReport check_partition(const RouteTree& tree, const Partition& p) {
    PartitionReport rep;
    rep.same_original = true;
    rep.same_height_or_depth = true;
    rep.no_interleaving = true;

    std::vector<std::pair<int, int>> hrange;  // per cell: [min, max] node height
    for (const auto& cell : p) {
        if (cell.empty()) continue;
        int orig = tree.node_original[cell.front()];
        int hmin = tree.node_height[cell.front()], hmax = hmin;
        int dmin = tree.node_depth[cell.front()], dmax = dmin;
        for (int v : cell) {
            if (tree.node_original[v] != orig) rep.same_original = false;
            hmin = std::min(hmin, tree.node_height[v]);
            hmax = std::max(hmax, tree.node_height[v]);
            dmin = std::min(dmin, tree.node_depth[v]);
            dmax = std::max(dmax, tree.node_depth[v]);
        }
        if (hmin != hmax && dmin != dmax) rep.same_height_or_depth = false;
        hrange.emplace_back(hmin, hmax);
    }
    for (std::size_t x = 0; x < hrange.size() && rep.no_interleaving; ++x)
        for (std::size_t y = 0; y < hrange.size(); ++y) {
            if (x == y) continue;
            if (hrange[y].second > hrange[x].first && hrange[y].first < hrange[x].second) {
                rep.no_interleaving = false;
                break;
            }
        }
    rep.legal = rep.same_original && rep.same_height_or_depth && rep.no_interleaving;
    return rep;
}

CoDAG merge(const OriginalNetwork& net, const RouteTree& tree, const Partition& p) {
    std::vector<int> cell_of(tree.num_nodes(), -1);
    Partition cells = p;

    // All leaves are destination replicas with empty continuations; their
    // cells collapse into the single destination node.
    {
        std::vector<char> is_leaf(tree.num_nodes(), 0);
        for (int leaf : tree.leaves) is_leaf[leaf] = 1;
        std::set<std::size_t> leaf_cells;
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (int v : cells[c])
                if (is_leaf[v]) leaf_cells.insert(c);
        if (!leaf_cells.empty()) {
            std::size_t keep = *leaf_cells.begin();
            std::vector<std::vector<int>> reduced;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c == keep) {
                    auto merged = cells[c];
                    for (std::size_t other : leaf_cells)
                        if (other != keep)
                            merged.insert(merged.end(), cells[other].begin(),
                                          cells[other].end());
                    std::sort(merged.begin(), merged.end());
                    reduced.push_back(std::move(merged));
                } else if (!leaf_cells.count(c)) {
                    reduced.push_back(cells[c]);
                }
            }
            cells = std::move(reduced);
        }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) throw IllegalPartitionError("empty partition cell");
        for (int v : cells[c]) {
            if (v < 0 || v >= tree.num_nodes() || cell_of[v] != -1)
                throw IllegalPartitionError("partition is not a disjoint cover");
            cell_of[v] = static_cast<int>(c);
        }
    }
    for (int v = 0; v < tree.num_nodes(); ++v)
        if (cell_of[v] == -1) throw IllegalPartitionError("partition misses a node");
    for (const auto& cell : cells) {
        int orig = tree.node_original[cell.front()];
        for (int v : cell)
            if (tree.node_original[v] != orig)
                throw IllegalPartitionError("cell mixes distinct original nodes");
    }

    CoDAG g;
    g.network = net;
    g.num_nodes = static_cast<int>(cells.size());
    g.node_original.resize(g.num_nodes);
    for (std::size_t c = 0; c < cells.size(); ++c)
        g.node_original[c] = tree.node_original[cells[c].front()];
    g.origin = cell_of[0];
    g.destination = cell_of[tree.leaves.front()];

    std::map<std::tuple<int, int, int>, int> arc_ids;
    for (int v = 1; v < tree.num_nodes(); ++v) {
        std::tuple<int, int, int> key{cell_of[tree.parent_node[v]], cell_of[v],
                                      tree.parent_label[v]};
        arc_ids.try_emplace(key, 0);
    }
    int next = 0;
    for (auto& [key, id] : arc_ids) id = next++;
    g.arcs.resize(arc_ids.size());
    for (const auto& [key, id] : arc_ids)
        g.arcs[id] = {std::get<0>(key), std::get<1>(key), std::get<2>(key)};

    try {
        g.refresh();
    } catch (const NotADagError&) {
        throw IllegalPartitionError("merged graph contains a cycle");
    }
    return g;
}

CoDAG build_codag(const OriginalNetwork& net, long cap) {
    validate_network(net);
    auto tree = expand_tree(net, cap);
    auto partition = build_partition(tree);
    return merge(net, tree, partition);
}

}  // namespace codag

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"

namespace blockcut {

/// A global minimum edge cut: the two sides and the exact number of
/// crossing edges. Sides are nonempty, disjoint, and cover the input nodes.
struct CutResult {
    std::uint64_t cut_size = 0;
    NodeSet side_a;
    NodeSet side_b;
};

namespace detail {

inline void require_connected(const Graph& g, const char* op) {
    if (g.num_nodes() < 2)
        throw domain_error(std::string(op) + ": graph must have at least 2 nodes");
    if (connected_components(g).size() != 1)
        throw domain_error(std::string(op) + ": graph must be connected");
}

} // namespace detail

/// If some node has degree 1, the single incident edge is a cut of size 1,
/// which is globally minimal for a connected graph. Returns the cut
/// isolating the smallest-id such node, or nothing when min degree > 1.
inline std::optional<CutResult> degree_one_shortcut(const Graph& g) {
    detail::require_connected(g, "degree_one_shortcut");
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (g.degree(v) != 1) continue;
        CutResult cut;
        cut.cut_size = 1;
        cut.side_a = {v};
        cut.side_b.reserve(g.num_nodes() - 1);
        for (NodeId u = 0; u < g.num_nodes(); ++u)
            if (u != v) cut.side_b.push_back(u);
        return cut;
    }
    return std::nullopt;
}

/// Exact global minimum edge cut of a connected graph via deterministic
/// Stoer-Wagner contraction. Among the minimum-value cuts encountered over
/// the contraction sequence, returns the one maximizing min(|A|,|B|); any
/// remaining tie is broken by the lexicographically smallest side_a.
inline CutResult global_min_cut(const Graph& g) {
    detail::require_connected(g, "global_min_cut");
    const std::size_t n = g.num_nodes();

    // Supernode weight maps and member lists; contraction merges t into s.
    std::vector<std::unordered_map<NodeId, std::uint64_t>> weight(n);
    std::vector<NodeSet> members(n);
    std::vector<char> active(n, 1);
    for (NodeId v = 0; v < n; ++v) {
        members[v] = {v};
        for (NodeId w : g.neighbors(v)) weight[v][w] = 1;
    }

    const std::uint64_t no_value = ~std::uint64_t{0};
    std::uint64_t best_value = no_value;
    NodeSet best_side; // canonical side_a (lexicographically smaller side)

    auto canonical_sides = [&](const NodeSet& side) {
        NodeSet other;
        other.reserve(n - side.size());
        std::size_t i = 0;
        for (NodeId v = 0; v < n; ++v) {
            if (i < side.size() && side[i] == v)
                ++i;
            else
                other.push_back(v);
        }
        // The sorted side containing node 0 is lexicographically smaller.
        if (!side.empty() && side[0] == 0) return std::make_pair(side, other);
        return std::make_pair(other, side);
    };

    auto consider = [&](std::uint64_t value, NodeSet side) {
        std::sort(side.begin(), side.end());
        auto [a, b] = canonical_sides(side);
        if (best_value == no_value || value < best_value) {
            best_value = value;
            best_side = std::move(a);
            return;
        }
        if (value > best_value) return;
        std::size_t bal_new = std::min(a.size(), n - a.size());
        std::size_t bal_old = std::min(best_side.size(), n - best_side.size());
        if (bal_new > bal_old || (bal_new == bal_old && a < best_side)) best_side = std::move(a);
    };

    std::size_t remaining = n;
    while (remaining > 1) {
        // Maximum-adjacency search from the smallest active supernode.
        NodeId start = 0;
        while (!active[start]) ++start;

        std::vector<std::uint64_t> conn(n, 0);
        std::vector<char> added(n, 0);
        // Max-heap over (connection weight, id); ties prefer the smaller id.
        using Entry = std::pair<std::uint64_t, NodeId>;
        auto cmp = [](const Entry& x, const Entry& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second > y.second;
        };
        std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

        NodeId last = start, second_last = start;
        std::uint64_t last_conn = 0;
        added[start] = 1;
        for (auto [u, w] : weight[start]) {
            conn[u] = w;
            heap.emplace(conn[u], u);
        }
        std::size_t added_count = 1;
        while (added_count < remaining) {
            NodeId next = 0;
            std::uint64_t next_conn = 0;
            while (true) {
                if (heap.empty())
                    throw domain_error("global_min_cut: graph became disconnected internally");
                auto [w, u] = heap.top();
                heap.pop();
                if (added[u] || w != conn[u]) continue; // stale entry
                next = u;
                next_conn = w;
                break;
            }
            added[next] = 1;
            ++added_count;
            second_last = last;
            last = next;
            last_conn = next_conn;
            for (auto [u, w] : weight[next]) {
                if (added[u]) continue;
                conn[u] += w;
                heap.emplace(conn[u], u);
            }
        }

        // Cut of the phase: the last-added supernode versus the rest.
        consider(last_conn, members[last]);

        // Contract `last` into `second_last`.
        NodeId s = second_last, t = last;
        for (auto [u, w] : weight[t]) {
            if (u == s) continue;
            weight[s][u] += w;
            weight[u][s] += w;
            weight[u].erase(t);
        }
        weight[s].erase(t);
        weight[t].clear();
        members[s].insert(members[s].end(), members[t].begin(), members[t].end());
        members[t].clear();
        members[t].shrink_to_fit();
        active[t] = 0;
        --remaining;
    }

    CutResult result;
    result.cut_size = best_value;
    result.side_a = std::move(best_side);
    result.side_b.reserve(n - result.side_a.size());
    std::size_t i = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (i < result.side_a.size() && result.side_a[i] == v)
            ++i;
        else
            result.side_b.push_back(v);
    }
    return result;
}

/// Exact minimum cut value by enumerating every proper bipartition.
/// Test oracle; refuses graphs with more than 20 nodes.
inline std::uint64_t min_cut_value_bruteforce(const Graph& g) {
    detail::require_connected(g, "min_cut_value_bruteforce");
    const std::size_t n = g.num_nodes();
    if (n > 20) throw domain_error("min_cut_value_bruteforce: n > 20 refused");
    auto edge_list = g.edges();
    std::uint64_t best = ~std::uint64_t{0};
    // Node 0 fixed on side A; mask bit i-1 puts node i on side B.
    const std::uint32_t limit = 1u << (n - 1);
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        std::uint64_t crossing = 0;
        for (auto [u, v] : edge_list) {
            bool au = (u == 0) || !((mask >> (u - 1)) & 1u);
            bool av = (v == 0) || !((mask >> (v - 1)) & 1u);
            crossing += (au != av);
        }
        best = std::min(best, crossing);
    }
    return best;
}

} // namespace blockcut

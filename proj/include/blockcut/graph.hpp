#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blockcut/errors.hpp"

namespace blockcut {

using NodeId = std::uint32_t;

/// Sorted vector of distinct internal node ids.
using NodeSet = std::vector<NodeId>;

/// Undirected, unweighted, simple graph with dense internal ids and a
/// mapping back to the original node labels. Immutable after construction;
/// safe to share across concurrent readers.
class Graph {
  public:
    Graph() = default;

    std::size_t num_nodes() const { return adj_.size(); }
    std::size_t num_edges() const { return num_edges_; }

    /// Neighbor list of v, sorted ascending.
    const std::vector<NodeId>& neighbors(NodeId v) const {
        check_node(v);
        return adj_[v];
    }

    std::size_t degree(NodeId v) const {
        check_node(v);
        return adj_[v].size();
    }

    bool has_edge(NodeId u, NodeId v) const {
        check_node(u);
        check_node(v);
        const auto& nbrs = adj_[u];
        return std::binary_search(nbrs.begin(), nbrs.end(), v);
    }

    const std::string& label(NodeId v) const {
        check_node(v);
        return labels_[v];
    }

    std::optional<NodeId> find_label(std::string_view label) const {
        auto it = label_index_.find(std::string(label));
        if (it == label_index_.end()) return std::nullopt;
        return it->second;
    }

    /// Edges as (u, v) pairs with u < v, ordered lexicographically.
    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        out.reserve(num_edges_);
        for (NodeId u = 0; u < adj_.size(); ++u)
            for (NodeId v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

  private:
    friend class GraphBuilder;

    void check_node(NodeId v) const {
        if (v >= adj_.size())
            throw domain_error("node id " + std::to_string(v) + " out of range (num_nodes=" +
                               std::to_string(adj_.size()) + ")");
    }

    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_index_;
    std::size_t num_edges_ = 0;
};

/// Accumulates labeled nodes and edges, then produces a simple Graph.
/// Self-loops and duplicate edges are dropped at build time, matching the
/// preprocessing applied to every input network.
class GraphBuilder {
  public:
    /// Registers a label (idempotent) and returns its dense internal id.
    /// Ids are assigned in first-appearance order.
    NodeId add_node(const std::string& label) {
        auto it = label_index_.find(label);
        if (it != label_index_.end()) return it->second;
        NodeId id = static_cast<NodeId>(labels_.size());
        label_index_.emplace(label, id);
        labels_.push_back(label);
        return id;
    }

    bool has_node(const std::string& label) const { return label_index_.count(label) > 0; }

    void add_edge(const std::string& u, const std::string& v) {
        NodeId a = add_node(u);
        NodeId b = add_node(v);
        edges_.emplace_back(a, b);
    }

    /// Adds an edge between already-registered internal ids.
    void add_edge_ids(NodeId u, NodeId v) {
        if (u >= labels_.size() || v >= labels_.size())
            throw domain_error("add_edge_ids: node id out of range");
        edges_.emplace_back(u, v);
    }

    std::size_t num_nodes() const { return labels_.size(); }

    Graph build() && {
        Graph g;
        g.labels_ = std::move(labels_);
        g.label_index_ = std::move(label_index_);
        g.adj_.resize(g.labels_.size());
        for (auto [u, v] : edges_) {
            if (u == v) continue; // self-loop
            g.adj_[u].push_back(v);
            g.adj_[v].push_back(u);
        }
        g.num_edges_ = 0;
        for (auto& nbrs : g.adj_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
            g.num_edges_ += nbrs.size();
        }
        g.num_edges_ /= 2;
        return g;
    }

  private:
    std::unordered_map<std::string, NodeId> label_index_;
    std::vector<std::string> labels_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
};

namespace detail {

/// Splits a line into whitespace-separated tokens.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

inline bool is_comment_or_blank(std::string_view line) {
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r') continue;
        return c == '#' || c == '%';
    }
    return true;
}

} // namespace detail

/// Reads a tab- or whitespace-delimited edge list. Self-loops and duplicate
/// edges are silently dropped; blank lines and #/% comments are skipped.
/// Node labels become dense internal ids in first-appearance order.
inline Graph load_edgelist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open edge list: " + path.string());
    GraphBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        auto tokens = detail::split_tokens(line);
        if (tokens.size() != 2)
            throw parse_error("expected two node labels, got " + std::to_string(tokens.size()),
                              lineno);
        builder.add_edge(std::string(tokens[0]), std::string(tokens[1]));
    }
    if (in.bad()) throw io_error("read failure on edge list: " + path.string());
    return std::move(builder).build();
}

/// Writes the graph as a tab-delimited edge list (one "u\tv" line per edge,
/// original labels, LF endings). Reloading the result reproduces the graph.
inline void save_edgelist(const Graph& g, std::ostream& out) {
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v) out << g.label(u) << '\t' << g.label(v) << '\n';
}

namespace detail {

inline void check_node_set(const Graph& g, const NodeSet& nodes) {
    NodeId prev = 0;
    bool first = true;
    for (NodeId v : nodes) {
        if (v >= g.num_nodes())
            throw domain_error("node id " + std::to_string(v) + " out of range");
        if (!first && v <= prev) throw domain_error("node set must be sorted and distinct");
        prev = v;
        first = false;
    }
}

} // namespace detail

/// Connected components of the subgraph induced by `nodes`, ordered by
/// smallest member id; each component is itself sorted.
inline std::vector<NodeSet> connected_components(const Graph& g, const NodeSet& nodes) {
    detail::check_node_set(g, nodes);
    std::vector<NodeSet> components;
    std::vector<char> visited(nodes.size(), 0);
    std::vector<NodeId> stack;
    auto local_index = [&](NodeId v) -> std::optional<std::size_t> {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
        if (it == nodes.end() || *it != v) return std::nullopt;
        return static_cast<std::size_t>(it - nodes.begin());
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (visited[i]) continue;
        NodeSet comp;
        visited[i] = 1;
        stack.push_back(nodes[i]);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (NodeId w : g.neighbors(u)) {
                auto j = local_index(w);
                if (j && !visited[*j]) {
                    visited[*j] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

/// Convenience overload over the full node set.
inline std::vector<NodeSet> connected_components(const Graph& g) {
    NodeSet all(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) all[v] = v;
    return connected_components(g, all);
}

/// Subgraph induced by a node set, in local id space, plus the mapping from
/// local ids back to the parent graph's ids (parent_ids[local] = parent id).
struct InducedSubgraph {
    Graph graph;
    NodeSet parent_ids;
};

inline InducedSubgraph induced_subgraph(const Graph& g, const NodeSet& nodes) {
    detail::check_node_set(g, nodes);
    GraphBuilder builder;
    for (NodeId v : nodes) builder.add_node(g.label(v));
    auto local_index = [&](NodeId v) -> std::optional<NodeId> {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
        if (it == nodes.end() || *it != v) return std::nullopt;
        return static_cast<NodeId>(it - nodes.begin());
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (NodeId w : g.neighbors(nodes[i])) {
            if (w <= nodes[i]) continue;
            auto j = local_index(w);
            if (j) builder.add_edge_ids(static_cast<NodeId>(i), *j);
        }
    }
    return InducedSubgraph{std::move(builder).build(), nodes};
}

} // namespace blockcut

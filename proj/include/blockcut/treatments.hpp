#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/mincut.hpp"
#include "blockcut/parallel.hpp"
#include "blockcut/partition.hpp"

namespace blockcut {

/// Well-connectedness threshold: a connected cluster of n nodes passes when
/// its minimum edge cut is strictly greater than threshold(n).
struct ThresholdRule {
    enum class Kind { log10, constant, none };

    Kind kind = Kind::log10;
    double c = 0.0;

    double threshold(std::size_t n) const {
        switch (kind) {
            case Kind::log10: return std::log10(static_cast<double>(n));
            case Kind::constant: return c;
            case Kind::none: return -std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    static ThresholdRule log10_rule() { return {Kind::log10, 0.0}; }
    static ThresholdRule constant_rule(double c) {
        if (c < 0.0) throw domain_error("threshold constant must be >= 0");
        return {Kind::constant, c};
    }
    static ThresholdRule none_rule() { return {Kind::none, 0.0}; }

    /// Accepts "log10", "none", or a nonnegative number.
    static ThresholdRule parse(const std::string& text) {
        if (text == "log10") return log10_rule();
        if (text == "none") return none_rule();
        try {
            std::size_t pos = 0;
            double value = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return constant_rule(value);
        } catch (const std::logic_error&) {
            throw domain_error("invalid threshold rule '" + text +
                               "' (expected log10, none, or a nonnegative number)");
        }
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::log10: return "log10";
            case Kind::constant: {
                std::string s = std::to_string(c);
                return s;
            }
            case Kind::none: return "none";
        }
        return "";
    }
};

enum class ClusterClass { singleton, disconnected, poorly_connected, well_connected };

inline const char* to_string(ClusterClass c) {
    switch (c) {
        case ClusterClass::singleton: return "singleton";
        case ClusterClass::disconnected: return "disconnected";
        case ClusterClass::poorly_connected: return "poorly_connected";
        case ClusterClass::well_connected: return "well_connected";
    }
    return "";
}

namespace detail {

/// Min cut of a connected graph, using the degree-one shortcut as an exact
/// answer (a size-1 cut is always globally minimal) before the full search.
inline CutResult min_cut_with_shortcut(const Graph& g) {
    if (auto cut = degree_one_shortcut(g)) return *cut;
    return global_min_cut(g);
}

struct ClusterOutcome {
    std::vector<NodeSet> pieces;               // parent-id node sets
    ClusterClass cls = ClusterClass::singleton; // classification of the input cluster
    std::optional<std::uint64_t> min_cut;       // present iff poorly/well connected
};

/// Shared per-cluster worker for CC, WCC, and classification. `mode`
/// selects how deep the splitting goes.
enum class TreatMode { classify_only, components_only, well_connected };

inline ClusterOutcome process_cluster(const Graph& g, const NodeSet& cluster,
                                      const ThresholdRule& rule, TreatMode mode) {
    ClusterOutcome out;
    if (cluster.size() == 1) {
        out.cls = ClusterClass::singleton;
        out.pieces.push_back(cluster);
        return out;
    }

    auto root = induced_subgraph(g, cluster);
    if (mode == TreatMode::classify_only) {
        if (connected_components(root.graph).size() > 1) {
            out.cls = ClusterClass::disconnected;
        } else {
            double tau = rule.threshold(cluster.size());
            CutResult cut = min_cut_with_shortcut(root.graph);
            out.min_cut = cut.cut_size;
            out.cls = static_cast<double>(cut.cut_size) > tau ? ClusterClass::well_connected
                                                              : ClusterClass::poorly_connected;
        }
        out.pieces.push_back(cluster);
        return out;
    }

    // Iterative splitting in local id space; translate to parent ids at the end.
    struct Item {
        Graph graph;
        NodeSet parents; // parent ids of local nodes
    };
    std::vector<Item> queue;
    queue.push_back({std::move(root.graph), cluster});

    auto translate = [](const NodeSet& parents, const NodeSet& locals) {
        NodeSet out_set;
        out_set.reserve(locals.size());
        for (NodeId v : locals) out_set.push_back(parents[v]);
        std::sort(out_set.begin(), out_set.end());
        return out_set;
    };

    while (!queue.empty()) {
        Item item = std::move(queue.back());
        queue.pop_back();
        const std::size_t n = item.graph.num_nodes();
        if (n == 1) {
            out.pieces.push_back(item.parents);
            continue;
        }
        auto components = connected_components(item.graph);
        if (components.size() > 1) {
            // Decompose into all components at once.
            for (const auto& comp : components) {
                auto sub = induced_subgraph(item.graph, comp);
                queue.push_back({std::move(sub.graph), translate(item.parents, comp)});
            }
            continue;
        }
        if (mode == TreatMode::components_only) {
            out.pieces.push_back(item.parents);
            continue;
        }
        double tau = rule.threshold(n);
        // The degree-one shortcut yields an exact minimum cut (size 1 cannot
        // be beaten in a connected graph), so it both certifies failure when
        // 1 <= tau and skips the full computation.
        CutResult cut = min_cut_with_shortcut(item.graph);
        if (static_cast<double>(cut.cut_size) > tau) {
            out.pieces.push_back(item.parents);
            continue;
        }
        // Split along the minimum cut and re-examine both sides.
        auto sub_a = induced_subgraph(item.graph, cut.side_a);
        auto sub_b = induced_subgraph(item.graph, cut.side_b);
        queue.push_back({std::move(sub_a.graph), translate(item.parents, cut.side_a)});
        queue.push_back({std::move(sub_b.graph), translate(item.parents, cut.side_b)});
    }
    return out;
}

inline void require_coverage(const Graph& g, const Partition& p, const char* op) {
    if (p.num_nodes() != g.num_nodes())
        throw domain_error(std::string(op) + ": partition covers " +
                           std::to_string(p.num_nodes()) + " nodes but graph has " +
                           std::to_string(g.num_nodes()));
}

inline Partition run_treatment(const Graph& g, const Partition& p, const ThresholdRule& rule,
                               TreatMode mode, int num_threads) {
    require_coverage(g, p, mode == TreatMode::components_only ? "treat_cc" : "treat_wcc");
    auto clusters = p.clusters();
    std::vector<std::vector<NodeSet>> pieces(clusters.size());
    parallel_for(clusters.size(), num_threads, [&](std::size_t c) {
        pieces[c] = process_cluster(g, clusters[c], rule, mode).pieces;
    });
    std::vector<NodeSet> flat;
    for (auto& cluster_pieces : pieces)
        for (auto& piece : cluster_pieces) flat.push_back(std::move(piece));
    return Partition::from_clusters(g.num_nodes(), flat);
}

} // namespace detail

/// Replaces every cluster with its connected components.
inline Partition treat_cc(const Graph& g, const Partition& p, int num_threads = 1) {
    return detail::run_treatment(g, p, ThresholdRule::none_rule(),
                                 detail::TreatMode::components_only, num_threads);
}

/// Splits clusters until every one is a singleton or has a minimum edge cut
/// strictly greater than rule(n): disconnected clusters are decomposed into
/// their components in one step, then connected-but-not-well-connected
/// clusters are split along a balanced global minimum cut, recursing on
/// both sides.
inline Partition treat_wcc(const Graph& g, const Partition& p,
                           ThresholdRule rule = ThresholdRule::log10_rule(),
                           int num_threads = 1) {
    return detail::run_treatment(g, p, rule, detail::TreatMode::well_connected, num_threads);
}

/// Classification of one cluster. Singleton clusters always pass; the
/// degree-one shortcut supplies the (exact) cut value 1 when applicable.
inline ClusterClass classify_cluster(const Graph& g, const NodeSet& members,
                                     ThresholdRule rule = ThresholdRule::log10_rule()) {
    if (members.empty()) throw domain_error("classify_cluster: empty cluster");
    detail::check_node_set(g, members);
    return detail::process_cluster(g, members, rule, detail::TreatMode::classify_only).cls;
}

/// Per-cluster classification plus aggregate percentages over the
/// non-singleton clusters. min_cut is reported for connected clusters only.
struct ClusterReport {
    ClusterId id = 0;
    std::size_t size = 0;
    ClusterClass cls = ClusterClass::singleton;
    std::optional<std::uint64_t> min_cut;
};

struct ConnectivityProfile {
    std::vector<ClusterReport> clusters;
    std::size_t num_singletons = 0;
    std::size_t num_non_singleton = 0;
    // Absent when the partition has no non-singleton clusters.
    std::optional<double> pct_disconnected;
    std::optional<double> pct_poorly_connected;
    std::optional<double> pct_well_connected;
};

inline ConnectivityProfile profile(const Graph& g, const Partition& p,
                                   ThresholdRule rule = ThresholdRule::log10_rule(),
                                   int num_threads = 1) {
    detail::require_coverage(g, p, "profile");
    auto clusters = p.clusters();
    ConnectivityProfile result;
    result.clusters.resize(clusters.size());
    parallel_for(clusters.size(), num_threads, [&](std::size_t c) {
        auto outcome =
            detail::process_cluster(g, clusters[c], rule, detail::TreatMode::classify_only);
        result.clusters[c] =
            ClusterReport{static_cast<ClusterId>(c), clusters[c].size(), outcome.cls,
                          outcome.min_cut};
    });
    std::size_t disconnected = 0, poorly = 0, well = 0;
    for (const auto& report : result.clusters) {
        switch (report.cls) {
            case ClusterClass::singleton: ++result.num_singletons; break;
            case ClusterClass::disconnected: ++disconnected; break;
            case ClusterClass::poorly_connected: ++poorly; break;
            case ClusterClass::well_connected: ++well; break;
        }
    }
    result.num_non_singleton = disconnected + poorly + well;
    if (result.num_non_singleton > 0) {
        double denom = static_cast<double>(result.num_non_singleton);
        result.pct_disconnected = 100.0 * static_cast<double>(disconnected) / denom;
        result.pct_poorly_connected = 100.0 * static_cast<double>(poorly) / denom;
        result.pct_well_connected = 100.0 * static_cast<double>(well) / denom;
    }
    return result;
}

} // namespace blockcut

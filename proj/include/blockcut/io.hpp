#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blockcut/dl.hpp"
#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/metrics.hpp"
#include "blockcut/partition.hpp"
#include "blockcut/treatments.hpp"

namespace blockcut {

/// Writes content to path atomically: a temp file in the same directory is
/// renamed over the target, so interrupted runs never leave partial output.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open output file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw io_error("write failure on: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                       ec.message());
    }
}

/// Result of reading a clustering file against an edge list: the graph
/// (augmented with isolated nodes for labels seen only in the clustering),
/// the normalized partition, the source label of every output cluster, and
/// counters for the two kinds of reconciliation that occurred.
struct LoadedClustering {
    Graph graph;
    Partition partition;
    std::vector<std::string> cluster_labels;  // per normalized cluster id
    std::size_t isolated_nodes_added = 0;     // labels only in the clustering file
    std::size_t defaulted_singletons = 0;     // graph nodes missing from the file
};

/// Raw "node_label<TAB>cluster_label" rows of a clustering file. Duplicate
/// node lines are parse errors.
inline std::vector<std::pair<std::string, std::string>>
parse_clustering_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open clustering file: " + path.string());
    std::vector<std::pair<std::string, std::string>> assignments;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        auto tokens = detail::split_tokens(line);
        if (tokens.size() != 2)
            throw parse_error("expected node and cluster labels, got " +
                              std::to_string(tokens.size()) + " fields",
                              lineno);
        std::string node(tokens[0]);
        if (!seen.insert(node).second)
            throw parse_error("duplicate assignment for node '" + node + "'", lineno);
        assignments.emplace_back(std::move(node), std::string(tokens[1]));
    }
    if (in.bad()) throw io_error("read failure on clustering file: " + path.string());
    return assignments;
}

/// A clustering resolved against a fixed graph.
struct ResolvedClustering {
    Partition partition;
    std::vector<std::string> cluster_labels; // per normalized cluster id
    std::size_t defaulted_singletons = 0;    // graph nodes missing from the file
};

/// Maps file assignments onto graph nodes. Every graph node absent from the
/// file becomes its own singleton cluster (labeled by the node itself).
inline ResolvedClustering
resolve_clustering(const Graph& g,
                   const std::vector<std::pair<std::string, std::string>>& assignments) {
    constexpr ClusterId unset = std::numeric_limits<ClusterId>::max();
    std::vector<ClusterId> raw(g.num_nodes(), unset);
    std::vector<std::string> raw_labels;
    std::unordered_map<std::string, ClusterId> cluster_index;
    for (const auto& [node, cluster] : assignments) {
        auto id = g.find_label(node);
        if (!id) throw domain_error("clustering mentions unknown node '" + node + "'");
        auto [it, inserted] =
            cluster_index.emplace(cluster, static_cast<ClusterId>(raw_labels.size()));
        if (inserted) raw_labels.push_back(cluster);
        raw[*id] = it->second;
    }
    ResolvedClustering out;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (raw[v] != unset) continue;
        raw[v] = static_cast<ClusterId>(raw_labels.size());
        raw_labels.push_back(g.label(v));
        ++out.defaulted_singletons;
    }
    out.partition = Partition::from_assignment(raw);
    out.cluster_labels.assign(out.partition.num_clusters(), "");
    for (NodeId v = 0; v < g.num_nodes(); ++v)
        out.cluster_labels[out.partition.assignment()[v]] = raw_labels[raw[v]];
    return out;
}

/// Builds the graph from an edge list plus the node labels mentioned by any
/// of the given clustering files (those become isolated nodes when absent
/// from the edge list).
inline Graph build_graph_with_clustering_labels(
    const std::filesystem::path& edgelist_path,
    const std::vector<const std::vector<std::pair<std::string, std::string>>*>& clusterings,
    std::size_t* isolated_added = nullptr) {
    std::ifstream edges(edgelist_path);
    if (!edges) throw io_error("cannot open edge list: " + edgelist_path.string());
    GraphBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(edges, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        auto tokens = detail::split_tokens(line);
        if (tokens.size() != 2)
            throw parse_error("expected two node labels, got " + std::to_string(tokens.size()),
                              lineno);
        builder.add_edge(std::string(tokens[0]), std::string(tokens[1]));
    }
    if (edges.bad()) throw io_error("read failure on edge list: " + edgelist_path.string());
    std::size_t added = 0;
    for (const auto* assignments : clusterings) {
        for (const auto& [node, cluster] : *assignments) {
            if (!builder.has_node(node)) ++added;
            builder.add_node(node);
        }
    }
    if (isolated_added) *isolated_added = added;
    return std::move(builder).build();
}

/// Parses "node_label<TAB>cluster_label" lines. Nodes of the edge list
/// absent from the file become fresh singleton clusters; labels absent from
/// the edge list become isolated nodes.
inline LoadedClustering load_graph_and_clustering(const std::filesystem::path& edgelist_path,
                                                  const std::filesystem::path& clustering_path) {
    auto assignments = parse_clustering_file(clustering_path);
    LoadedClustering result;
    result.graph =
        build_graph_with_clustering_labels(edgelist_path, {&assignments},
                                           &result.isolated_nodes_added);
    auto resolved = resolve_clustering(result.graph, assignments);
    result.partition = std::move(resolved.partition);
    result.cluster_labels = std::move(resolved.cluster_labels);
    result.defaulted_singletons = resolved.defaulted_singletons;
    return result;
}

/// Serializes a clustering as "node_label<TAB>cluster_id" in node id order,
/// cluster ids renumbered densely from 0.
inline std::string clustering_to_string(const Graph& g, const Partition& p) {
    if (p.num_nodes() != g.num_nodes())
        throw domain_error("clustering_to_string: partition does not cover graph");
    std::ostringstream out;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
        out << g.label(v) << '\t' << p.assignment()[v] << '\n';
    return out.str();
}

inline void save_clustering(const Graph& g, const Partition& p,
                            const std::filesystem::path& path) {
    atomic_write_file(path, clustering_to_string(g, p));
}

inline std::string edgelist_to_string(const Graph& g) {
    std::ostringstream out;
    save_edgelist(g, out);
    return out.str();
}

inline nlohmann::json dl_report_to_json(const DlReport& report) {
    return nlohmann::json{{"model", to_string(report.config.model)},
                          {"beta", report.config.beta},
                          {"edges_dl", report.config.edges_dl},
                          {"num_nodes", report.num_nodes},
                          {"num_edges", report.num_edges},
                          {"num_blocks", report.num_blocks},
                          {"likelihood", report.likelihood},
                          {"degree_prior", report.degree_prior},
                          {"partition_prior", report.partition_prior},
                          {"edge_matrix_prior", report.edge_matrix_prior},
                          {"total", report.total}};
}

inline nlohmann::json profile_to_json(const ConnectivityProfile& profile,
                                      const ThresholdRule& rule) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& report : profile.clusters) {
        nlohmann::json row{{"cluster", report.id},
                           {"size", report.size},
                           {"class", to_string(report.cls)}};
        if (report.min_cut)
            row["min_cut"] = *report.min_cut;
        else
            row["min_cut"] = nullptr;
        clusters.push_back(std::move(row));
    }
    nlohmann::json summary{{"num_clusters", profile.clusters.size()},
                           {"num_singletons", profile.num_singletons},
                           {"num_non_singleton", profile.num_non_singleton}};
    auto pct = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    summary["pct_disconnected"] = pct(profile.pct_disconnected);
    summary["pct_poorly_connected"] = pct(profile.pct_poorly_connected);
    summary["pct_well_connected"] = pct(profile.pct_well_connected);
    return nlohmann::json{{"threshold_rule", rule.to_string()},
                          {"clusters", std::move(clusters)},
                          {"summary", std::move(summary)}};
}

inline nlohmann::json eval_rows_to_json(const std::vector<ThresholdEvalRow>& rows) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        out.push_back(nlohmann::json{{"threshold", row.threshold},
                                     {"retained_nodes", row.retained_nodes},
                                     {"retained_clusters", row.retained_clusters},
                                     {"ari", opt(row.ari)},
                                     {"nmi", opt(row.nmi)},
                                     {"ami", opt(row.ami)},
                                     {"precision", opt(row.precision)},
                                     {"recall", opt(row.recall)}});
    }
    return out;
}

inline std::string eval_rows_to_csv(const std::vector<ThresholdEvalRow>& rows) {
    std::ostringstream out;
    out << "threshold,retained_nodes,retained_clusters,ari,nmi,ami,precision,recall\n";
    auto opt = [](const std::optional<double>& v) {
        if (!v) return std::string();
        std::ostringstream cell;
        cell.precision(17);
        cell << *v;
        return cell.str();
    };
    out.precision(17);
    for (const auto& row : rows) {
        out << row.threshold << ',' << row.retained_nodes << ',' << row.retained_clusters << ','
            << opt(row.ari) << ',' << opt(row.nmi) << ',' << opt(row.ami) << ','
            << opt(row.precision) << ',' << opt(row.recall) << '\n';
    }
    return out.str();
}

} // namespace blockcut

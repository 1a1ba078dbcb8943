#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/partition.hpp"

namespace blockcut {

/// Joint cluster-membership counts between a ground-truth and an estimated
/// partition, with marginals.
struct ContingencyTable {
    std::vector<std::uint64_t> gt_sizes;  // a_i
    std::vector<std::uint64_t> est_sizes; // b_j
    // Sorted nonzero cells (i, j, n_ij).
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> cells;
    std::uint64_t total = 0;

    static ContingencyTable build(const Partition& gt, const Partition& est) {
        if (gt.num_nodes() != est.num_nodes())
            throw domain_error("metrics: partitions cover different node universes");
        ContingencyTable table;
        table.total = gt.num_nodes();
        table.gt_sizes.assign(gt.num_clusters(), 0);
        table.est_sizes.assign(est.num_clusters(), 0);
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
        for (std::size_t v = 0; v < gt.num_nodes(); ++v) {
            std::uint32_t i = gt.assignment()[v];
            std::uint32_t j = est.assignment()[v];
            ++table.gt_sizes[i];
            ++table.est_sizes[j];
            ++counts[{i, j}];
        }
        table.cells.reserve(counts.size());
        for (auto& [key, n] : counts) table.cells.emplace_back(key.first, key.second, n);
        return table;
    }
};

namespace detail {

inline std::uint64_t pairs_of(std::uint64_t n) { return n * (n - 1) / 2; }

inline long double entropy_nats(const std::vector<std::uint64_t>& sizes, std::uint64_t total) {
    long double h = 0.0L;
    for (auto n : sizes) {
        if (n == 0) continue;
        long double p = static_cast<long double>(n) / static_cast<long double>(total);
        h -= p * std::log(p);
    }
    return h;
}

inline long double mutual_information_nats(const ContingencyTable& t) {
    long double mi = 0.0L;
    long double total = static_cast<long double>(t.total);
    for (auto [i, j, n] : t.cells) {
        long double p = static_cast<long double>(n) / total;
        long double ratio = (static_cast<long double>(n) * total) /
                            (static_cast<long double>(t.gt_sizes[i]) *
                             static_cast<long double>(t.est_sizes[j]));
        mi += p * std::log(ratio);
    }
    return mi;
}

/// E[MI] under the hypergeometric permutation model (Vinh et al.).
inline long double expected_mutual_information_nats(const ContingencyTable& t) {
    const long double log_n_fact = std::lgammal(static_cast<long double>(t.total) + 1.0L);
    auto lfact = [](std::uint64_t x) { return std::lgammal(static_cast<long double>(x) + 1.0L); };
    long double emi = 0.0L;
    long double total = static_cast<long double>(t.total);
    for (std::uint64_t a : t.gt_sizes) {
        for (std::uint64_t b : t.est_sizes) {
            std::uint64_t lower = (a + b > t.total) ? a + b - t.total : 1;
            std::uint64_t upper = std::min(a, b);
            for (std::uint64_t nij = lower; nij <= upper; ++nij) {
                long double log_p = lfact(a) + lfact(b) + lfact(t.total - a) +
                                    lfact(t.total - b) - log_n_fact - lfact(nij) -
                                    lfact(a - nij) - lfact(b - nij) -
                                    lfact(t.total - a - b + nij);
                long double term = (static_cast<long double>(nij) / total) *
                                   std::log((static_cast<long double>(nij) * total) /
                                            (static_cast<long double>(a) *
                                             static_cast<long double>(b)));
                emi += std::exp(log_p) * term;
            }
        }
    }
    return emi;
}

} // namespace detail

/// Adjusted Rand index in [-1, 1]; 1.0 for identical partitions.
inline double ari(const Partition& gt, const Partition& est) {
    auto t = ContingencyTable::build(gt, est);
    long double index = 0.0L, sum_a = 0.0L, sum_b = 0.0L;
    for (auto [i, j, n] : t.cells) index += detail::pairs_of(n);
    for (auto a : t.gt_sizes) sum_a += detail::pairs_of(a);
    for (auto b : t.est_sizes) sum_b += detail::pairs_of(b);
    long double total_pairs = detail::pairs_of(t.total);
    if (total_pairs == 0.0L) return 1.0; // N < 2: partitions are trivially equal
    long double expected = sum_a * sum_b / total_pairs;
    long double max_index = (sum_a + sum_b) / 2.0L;
    long double denom = max_index - expected;
    if (std::abs(denom) < 1e-12L) return 1.0; // both partitions trivial and identical
    return static_cast<double>((index - expected) / denom);
}

/// NMI normalized by the arithmetic mean of the two entropies; in [0, 1].
/// Two trivial (single-cluster) partitions score 1.0 by convention.
inline double nmi(const Partition& gt, const Partition& est) {
    auto t = ContingencyTable::build(gt, est);
    long double h_gt = detail::entropy_nats(t.gt_sizes, t.total);
    long double h_est = detail::entropy_nats(t.est_sizes, t.total);
    long double mean_h = (h_gt + h_est) / 2.0L;
    if (mean_h <= 1e-15L) return 1.0; // both single-cluster (identical)
    long double mi = detail::mutual_information_nats(t);
    double value = static_cast<double>(mi / mean_h);
    return std::clamp(value, 0.0, 1.0);
}

/// AMI with the hypergeometric expected MI and arithmetic-mean
/// normalization: (MI - E[MI]) / (mean(H) - E[MI]).
inline double ami(const Partition& gt, const Partition& est) {
    auto t = ContingencyTable::build(gt, est);
    long double h_gt = detail::entropy_nats(t.gt_sizes, t.total);
    long double h_est = detail::entropy_nats(t.est_sizes, t.total);
    long double mean_h = (h_gt + h_est) / 2.0L;
    long double mi = detail::mutual_information_nats(t);
    long double emi = detail::expected_mutual_information_nats(t);
    long double denom = mean_h - emi;
    if (std::abs(denom) < 1e-12L)
        return (std::abs(mi - emi) < 1e-12L && gt == est) ? 1.0 : 0.0;
    return static_cast<double>((mi - emi) / denom);
}

/// Confusion counts over unordered node pairs, viewing each partition as an
/// equivalence relation. When TP and FP are both 0 precision is 1.0; the
/// symmetric convention applies to recall.
struct PairConfusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    double precision = 1.0;
    double recall = 1.0;
};

inline PairConfusion pair_confusion(const Partition& gt, const Partition& est) {
    auto t = ContingencyTable::build(gt, est);
    std::uint64_t same_both = 0, same_gt = 0, same_est = 0;
    for (auto [i, j, n] : t.cells) same_both += detail::pairs_of(n);
    for (auto a : t.gt_sizes) same_gt += detail::pairs_of(a);
    for (auto b : t.est_sizes) same_est += detail::pairs_of(b);
    PairConfusion pc;
    pc.tp = same_both;
    pc.fp = same_est - same_both;
    pc.fn = same_gt - same_both;
    pc.tn = detail::pairs_of(t.total) - pc.tp - pc.fp - pc.fn;
    pc.precision = (pc.tp + pc.fp == 0)
                       ? 1.0
                       : static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fp);
    pc.recall = (pc.tp + pc.fn == 0)
                    ? 1.0
                    : static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fn);
    return pc;
}

/// Internal edge density: edges inside the set over C(n,2); singletons are
/// defined to have density 0.0.
inline double density(const Graph& g, const NodeSet& members) {
    if (members.empty()) throw domain_error("density: empty cluster");
    detail::check_node_set(g, members);
    if (members.size() == 1) return 0.0;
    std::uint64_t internal = 0;
    for (NodeId v : members)
        for (NodeId w : g.neighbors(v))
            if (w > v && std::binary_search(members.begin(), members.end(), w)) ++internal;
    return static_cast<double>(internal) /
           static_cast<double>(detail::pairs_of(members.size()));
}

/// One row of the density-thresholded evaluation table. Metric fields are
/// absent when the threshold retains no nodes.
struct ThresholdEvalRow {
    double threshold = 0.0;
    std::size_t retained_nodes = 0;
    std::size_t retained_clusters = 0;
    std::optional<double> ari;
    std::optional<double> nmi;
    std::optional<double> ami;
    std::optional<double> precision;
    std::optional<double> recall;
};

/// For each threshold t: keep every ground-truth cluster when t == 0.0
/// (singletons included), else those with density strictly greater than t;
/// restrict the node universe to the retained clusters, intersect the
/// estimated clustering with that universe, and evaluate all metrics there.
inline std::vector<ThresholdEvalRow> filtered_eval(const Graph& g, const Partition& gt,
                                                   const Partition& est,
                                                   std::span<const double> thresholds) {
    if (gt.num_nodes() != g.num_nodes() || est.num_nodes() != g.num_nodes())
        throw domain_error("filtered_eval: partitions must cover the graph");
    for (std::size_t i = 0; i + 1 < thresholds.size(); ++i)
        if (thresholds[i] > thresholds[i + 1])
            throw domain_error("filtered_eval: thresholds must be ascending");
    auto gt_clusters = gt.clusters();
    std::vector<double> gt_density(gt_clusters.size());
    for (std::size_t c = 0; c < gt_clusters.size(); ++c) gt_density[c] = density(g, gt_clusters[c]);

    std::vector<ThresholdEvalRow> rows;
    rows.reserve(thresholds.size());
    for (double t : thresholds) {
        ThresholdEvalRow row;
        row.threshold = t;
        NodeSet universe;
        for (std::size_t c = 0; c < gt_clusters.size(); ++c) {
            bool keep = (t == 0.0) || gt_density[c] > t;
            if (!keep) continue;
            ++row.retained_clusters;
            universe.insert(universe.end(), gt_clusters[c].begin(), gt_clusters[c].end());
        }
        std::sort(universe.begin(), universe.end());
        row.retained_nodes = universe.size();
        if (!universe.empty()) {
            std::vector<ClusterId> gt_sub(universe.size()), est_sub(universe.size());
            for (std::size_t i = 0; i < universe.size(); ++i) {
                gt_sub[i] = gt.assignment()[universe[i]];
                est_sub[i] = est.assignment()[universe[i]];
            }
            Partition gt_r = Partition::from_assignment(gt_sub);
            Partition est_r = Partition::from_assignment(est_sub);
            row.ari = ari(gt_r, est_r);
            row.nmi = nmi(gt_r, est_r);
            row.ami = ami(gt_r, est_r);
            auto pc = pair_confusion(gt_r, est_r);
            row.precision = pc.precision;
            row.recall = pc.recall;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace blockcut

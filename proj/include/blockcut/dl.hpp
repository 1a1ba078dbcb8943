#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/partition.hpp"

namespace blockcut {

enum class SbmModel { dc, ndc };

inline const char* to_string(SbmModel m) { return m == SbmModel::dc ? "dc" : "ndc"; }

/// Weighting of the description length: total = likelihood
/// + beta * (degree prior [DC only] + partition prior
///           + [edges_dl] * edge count matrix prior).
struct DlConfig {
    SbmModel model = SbmModel::dc;
    double beta = 1.0;
    bool edges_dl = true;

    void validate() const {
        if (beta < 0.0 || beta > 1.0) throw domain_error("beta must lie in [0, 1]");
    }
};

/// Per-partition aggregates: block sizes n_r, block degree sums e_r, the
/// degree vector k, and the sparse symmetric block-pair edge counts e_rs
/// with the diagonal counting twice the internal edges.
struct BlockStats {
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0;
    std::size_t num_blocks = 0;
    std::vector<std::uint64_t> block_sizes;       // n_r
    std::vector<std::uint64_t> block_degree_sums; // e_r = sum_s e_rs
    std::vector<std::uint64_t> node_degrees;      // k
    // Upper-triangle entries (r <= s, count > 0), sorted by (r, s).
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> block_pair_edges;
};

inline BlockStats block_stats(const Graph& g, const Partition& p) {
    if (p.num_nodes() != g.num_nodes())
        throw domain_error("block_stats: partition does not cover the graph");
    BlockStats stats;
    stats.num_nodes = g.num_nodes();
    stats.num_edges = g.num_edges();
    stats.num_blocks = p.num_clusters();
    stats.block_sizes.assign(stats.num_blocks, 0);
    stats.block_degree_sums.assign(stats.num_blocks, 0);
    stats.node_degrees.resize(g.num_nodes());
    std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
    const auto& assign = p.assignment();
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        stats.node_degrees[v] = g.degree(v);
        std::uint32_t r = assign[v];
        ++stats.block_sizes[r];
        stats.block_degree_sums[r] += g.degree(v);
        for (NodeId w : g.neighbors(v)) {
            if (w < v) continue;
            std::uint32_t s = assign[w];
            std::uint32_t lo = std::min(r, s), hi = std::max(r, s);
            // Diagonal entries count each internal edge twice.
            pair_counts[(static_cast<std::uint64_t>(lo) << 32) | hi] += (lo == hi) ? 2 : 1;
        }
    }
    stats.block_pair_edges.reserve(pair_counts.size());
    for (auto [key, count] : pair_counts)
        stats.block_pair_edges.emplace_back(static_cast<std::uint32_t>(key >> 32),
                                            static_cast<std::uint32_t>(key & 0xffffffffu), count);
    std::sort(stats.block_pair_edges.begin(), stats.block_pair_edges.end());
    return stats;
}

namespace detail {

// Log-factorials and log-binomials in extended precision: description
// lengths are differences of lgamma values up to ~1e7, so double-precision
// lgamma alone cannot hold 1e-9 absolute error.
inline double log_factorial(std::uint64_t n) {
    return static_cast<double>(std::lgammal(static_cast<long double>(n) + 1.0L));
}

inline double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw domain_error("log_binomial: k > n");
    if (k == 0 || k == n) return 0.0;
    long double value = std::lgammal(static_cast<long double>(n) + 1.0L) -
                        std::lgammal(static_cast<long double>(k) + 1.0L) -
                        std::lgammal(static_cast<long double>(n - k) + 1.0L);
    return static_cast<double>(value);
}

/// ln((2m)!!) for even argument 2m, as (2m)!! = 2^m * m!.
inline double log_double_factorial_even(std::uint64_t e_rr) {
    if (e_rr % 2 != 0) throw domain_error("e_rr must be even");
    std::uint64_t m = e_rr / 2;
    return static_cast<double>(static_cast<long double>(m) * 0.6931471805599453094172321214581766L +
                               std::lgammal(static_cast<long double>(m) + 1.0L));
}

} // namespace detail

/// -log p(e): ln C(B(B+1)/2 + E - 1, E).
inline double edge_matrix_prior(std::size_t num_blocks, std::size_t num_edges) {
    if (num_blocks < 1) throw domain_error("edge_matrix_prior: B must be >= 1");
    std::uint64_t slots = static_cast<std::uint64_t>(num_blocks) * (num_blocks + 1) / 2;
    return detail::log_binomial(slots + num_edges - 1, num_edges);
}

/// -log p(b): ln N + ln C(N-1, B-1) + ln(N! / prod_r n_r!).
inline double partition_prior(std::size_t num_nodes, std::span<const std::uint64_t> block_sizes) {
    std::uint64_t total = 0;
    for (auto n : block_sizes) {
        if (n == 0) throw domain_error("partition_prior: empty block");
        total += n;
    }
    if (total != num_nodes) throw domain_error("partition_prior: block sizes do not sum to N");
    if (num_nodes == 0) return 0.0;
    long double value = std::log(static_cast<long double>(num_nodes));
    value += detail::log_binomial(num_nodes - 1, block_sizes.size() - 1);
    value += std::lgammal(static_cast<long double>(num_nodes) + 1.0L);
    for (auto n : block_sizes) value -= std::lgammal(static_cast<long double>(n) + 1.0L);
    return static_cast<double>(value);
}

/// -log p(k|e,b), uniform variant: sum_r ln multiset(n_r, e_r)
/// = sum_r ln C(n_r + e_r - 1, e_r).
inline double degree_prior(const BlockStats& stats) {
    long double value = 0.0L;
    for (std::size_t r = 0; r < stats.num_blocks; ++r)
        value += detail::log_binomial(stats.block_sizes[r] + stats.block_degree_sums[r] - 1,
                                      stats.block_degree_sums[r]);
    return static_cast<double>(value);
}

/// -log p(A|k,e,b) for the degree-corrected model on simple graphs:
/// sum_r ln e_r! - sum_{r<s} ln e_rs! - sum_r ln (e_rr)!! - sum_i ln k_i!.
inline double likelihood_dc(const BlockStats& stats) {
    long double value = 0.0L;
    for (std::size_t r = 0; r < stats.num_blocks; ++r)
        value += detail::log_factorial(stats.block_degree_sums[r]);
    for (auto [r, s, count] : stats.block_pair_edges) {
        if (r == s)
            value -= detail::log_double_factorial_even(count);
        else
            value -= detail::log_factorial(count);
    }
    for (auto k : stats.node_degrees) value -= detail::log_factorial(k);
    return static_cast<double>(value);
}

/// -log p(A|e,b) for the non-degree-corrected model on simple graphs:
/// sum_{r<s} ln C(n_r n_s, e_rs) + sum_r ln C(C(n_r,2), e_rr/2).
inline double likelihood_ndc(const BlockStats& stats) {
    long double value = 0.0L;
    for (auto [r, s, count] : stats.block_pair_edges) {
        std::uint64_t capacity;
        std::uint64_t edges;
        if (r == s) {
            capacity = stats.block_sizes[r] * (stats.block_sizes[r] - 1) / 2;
            edges = count / 2;
        } else {
            capacity = stats.block_sizes[r] * stats.block_sizes[s];
            edges = count;
        }
        if (edges > capacity)
            throw domain_error("likelihood_ndc: edge count exceeds block-pair capacity");
        value += detail::log_binomial(capacity, edges);
    }
    return static_cast<double>(value);
}

/// The four description-length terms plus the weighted total, in nats.
struct DlReport {
    double likelihood = 0.0;
    double degree_prior = 0.0; // 0 for NDC
    double partition_prior = 0.0;
    double edge_matrix_prior = 0.0;
    double total = 0.0;
    DlConfig config;
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0;
    std::size_t num_blocks = 0;
};

inline DlReport report_from_stats(const BlockStats& stats, const DlConfig& cfg) {
    cfg.validate();
    DlReport report;
    report.config = cfg;
    report.num_nodes = stats.num_nodes;
    report.num_edges = stats.num_edges;
    report.num_blocks = stats.num_blocks;
    report.likelihood = cfg.model == SbmModel::dc ? likelihood_dc(stats) : likelihood_ndc(stats);
    report.degree_prior = cfg.model == SbmModel::dc ? degree_prior(stats) : 0.0;
    report.partition_prior = partition_prior(stats.num_nodes, stats.block_sizes);
    report.edge_matrix_prior = edge_matrix_prior(stats.num_blocks, stats.num_edges);
    report.total = report.likelihood +
                   cfg.beta * (report.degree_prior + report.partition_prior +
                               (cfg.edges_dl ? report.edge_matrix_prior : 0.0));
    return report;
}

/// Description length of (graph, partition) under the configured flat model.
inline DlReport compute_dl(const Graph& g, const Partition& p, const DlConfig& cfg) {
    return report_from_stats(block_stats(g, p), cfg);
}

} // namespace blockcut

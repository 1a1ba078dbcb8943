#pragma once

// Independent brute-force oracles used to pin expected values. These stay
// deliberately naive and share no computation path with the library: graph
// counts come from explicit enumeration, pair metrics from O(N^2) pair
// loops, expected mutual information from exact hypergeometric ratios.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "blockcut/dl.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/partition.hpp"

namespace oracles {

using blockcut::BlockStats;
using blockcut::Graph;
using blockcut::NodeId;
using blockcut::Partition;

/// All set partitions of {0..n-1} via restricted growth strings.
inline std::vector<Partition> all_partitions(std::size_t n) {
    std::vector<Partition> out;
    std::vector<blockcut::ClusterId> rgs(n, 0);
    std::function<void(std::size_t, blockcut::ClusterId)> rec = [&](std::size_t i,
                                                                    blockcut::ClusterId max_used) {
        if (i == n) {
            out.push_back(Partition::from_assignment(rgs));
            return;
        }
        for (blockcut::ClusterId c = 0; c <= max_used; ++c) {
            rgs[i] = c;
            rec(i + 1, std::max(max_used, static_cast<blockcut::ClusterId>(c + 1)));
        }
    };
    if (n == 0) return out;
    rec(1, 1); // node 0 pinned to cluster 0
    return out;
}

/// Number of labeled simple graphs on the node set of `stats` whose block
/// statistics (under the same partition) equal `stats`, by enumerating all
/// 2^C(n,2) graphs. n <= 6 or so.
inline std::uint64_t count_graphs_matching_stats(const Partition& p, const BlockStats& stats) {
    const std::size_t n = p.num_nodes();
    std::vector<std::pair<NodeId, NodeId>> all_pairs;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) all_pairs.emplace_back(u, v);
    const std::size_t m = all_pairs.size();
    auto key_of = [&](std::uint64_t mask) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cells;
        for (std::size_t i = 0; i < m; ++i) {
            if (!((mask >> i) & 1ull)) continue;
            auto [u, v] = all_pairs[i];
            std::uint32_t r = p.assignment()[u], s = p.assignment()[v];
            if (r > s) std::swap(r, s);
            cells[{r, s}] += (r == s) ? 2 : 1;
        }
        return cells;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> want;
    for (auto [r, s, count] : stats.block_pair_edges) want[{r, s}] = count;
    std::uint64_t matching = 0;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask)
        if (key_of(mask) == want) ++matching;
    return matching;
}

/// Half-edge pairing enumeration for the DC likelihood. Over all perfect
/// matchings of the degree-sequence half-edges, counts (a) matchings whose
/// block-pair edge counts equal those of (g, p) and (b) the subset realizing
/// g exactly as a simple graph. Returns -ln(b / a). Requires 2E <= 12.
inline double dc_likelihood_by_pairing(const Graph& g, const Partition& p) {
    std::vector<NodeId> half_edges;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
        for (std::size_t i = 0; i < g.degree(v); ++i) half_edges.push_back(v);
    const std::size_t h = half_edges.size();
    if (h == 0) return 0.0;

    // Target block-pair counts from the graph itself.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> want;
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> adjacency;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (v < u) continue;
            adjacency[{u, v}] = 1;
            std::uint32_t r = p.assignment()[u], s = p.assignment()[v];
            if (r > s) std::swap(r, s);
            want[{r, s}] += (r == s) ? 2 : 1;
        }
    }

    std::uint64_t consistent = 0, realizing = 0;
    std::vector<char> used(h, 0);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::function<void()> rec = [&] {
        std::size_t first = h;
        for (std::size_t i = 0; i < h; ++i) {
            if (!used[i]) {
                first = i;
                break;
            }
        }
        if (first == h) {
            std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
            std::map<std::pair<NodeId, NodeId>, std::uint64_t> multi;
            bool simple = true;
            for (auto [u, v] : pairs) {
                if (u == v) simple = false;
                NodeId a = std::min(u, v), b = std::max(u, v);
                if (++multi[{a, b}] > 1) simple = false;
                std::uint32_t r = p.assignment()[u], s = p.assignment()[v];
                if (r > s) std::swap(r, s);
                counts[{r, s}] += (r == s) ? 2 : 1;
            }
            if (counts != want) return;
            ++consistent;
            if (simple && multi == adjacency) ++realizing;
            return;
        }
        used[first] = 1;
        for (std::size_t j = first + 1; j < h; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            pairs.emplace_back(half_edges[first], half_edges[j]);
            rec();
            pairs.pop_back();
            used[j] = 0;
        }
        used[first] = 0;
    };
    rec();
    return -std::log(static_cast<double>(realizing) / static_cast<double>(consistent));
}

/// Exact binomial coefficient (fits u64 for the n <= 20 universe used here).
inline std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

struct PairCounts {
    std::uint64_t same_both = 0, same_gt = 0, same_est = 0, diff_both = 0;
};

/// O(N^2) pair loop, no contingency table.
inline PairCounts count_pairs(const Partition& gt, const Partition& est) {
    PairCounts pc;
    const std::size_t n = gt.num_nodes();
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            bool g_same = gt.assignment()[u] == gt.assignment()[v];
            bool e_same = est.assignment()[u] == est.assignment()[v];
            if (g_same && e_same)
                ++pc.same_both;
            else if (g_same)
                ++pc.same_gt;
            else if (e_same)
                ++pc.same_est;
            else
                ++pc.diff_both;
        }
    }
    return pc;
}

/// ARI from the pair-counting identity 2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d)).
inline double ari_bruteforce(const Partition& gt, const Partition& est) {
    auto [a, b, c, d] = count_pairs(gt, est);
    long double num = 2.0L * (static_cast<long double>(a) * d - static_cast<long double>(b) * c);
    long double den = static_cast<long double>(a + b) * (b + d) +
                      static_cast<long double>(a + c) * (c + d);
    if (den == 0.0L) return 1.0;
    return static_cast<double>(num / den);
}

inline std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>
contingency_map(const Partition& gt, const Partition& est) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cells;
    for (NodeId v = 0; v < gt.num_nodes(); ++v)
        ++cells[{gt.assignment()[v], est.assignment()[v]}];
    return cells;
}

inline double entropy_of(const std::vector<std::uint64_t>& sizes, std::uint64_t n) {
    double h = 0.0;
    for (auto s : sizes)
        if (s > 0) h -= (static_cast<double>(s) / n) * std::log(static_cast<double>(s) / n);
    return h;
}

inline double mi_bruteforce(const Partition& gt, const Partition& est) {
    auto cells = contingency_map(gt, est);
    std::vector<std::uint64_t> a(gt.num_clusters(), 0), b(est.num_clusters(), 0);
    for (auto& [key, count] : cells) {
        a[key.first] += count;
        b[key.second] += count;
    }
    const double n = static_cast<double>(gt.num_nodes());
    double mi = 0.0;
    for (auto& [key, count] : cells) {
        double pij = count / n;
        mi += pij * std::log(count * n / (static_cast<double>(a[key.first]) * b[key.second]));
    }
    return mi;
}

inline double nmi_bruteforce(const Partition& gt, const Partition& est) {
    std::vector<std::uint64_t> a(gt.num_clusters(), 0), b(est.num_clusters(), 0);
    for (NodeId v = 0; v < gt.num_nodes(); ++v) {
        ++a[gt.assignment()[v]];
        ++b[est.assignment()[v]];
    }
    double ha = entropy_of(a, gt.num_nodes());
    double hb = entropy_of(b, est.num_nodes());
    if (ha + hb == 0.0) return 1.0;
    return mi_bruteforce(gt, est) / ((ha + hb) / 2.0);
}

/// E[MI] by exact hypergeometric ratios of u64 binomials (valid for N <= 20).
inline double emi_bruteforce(const Partition& gt, const Partition& est) {
    std::vector<std::uint64_t> a(gt.num_clusters(), 0), b(est.num_clusters(), 0);
    for (NodeId v = 0; v < gt.num_nodes(); ++v) {
        ++a[gt.assignment()[v]];
        ++b[est.assignment()[v]];
    }
    const std::uint64_t n = gt.num_nodes();
    long double emi = 0.0L;
    for (auto ai : a) {
        for (auto bj : b) {
            std::uint64_t lo = (ai + bj > n) ? ai + bj - n : 1;
            for (std::uint64_t nij = lo; nij <= std::min(ai, bj); ++nij) {
                long double prob = static_cast<long double>(binom_u64(bj, nij)) *
                                   static_cast<long double>(binom_u64(n - bj, ai - nij)) /
                                   static_cast<long double>(binom_u64(n, ai));
                long double term = (static_cast<long double>(nij) / n) *
                                   std::log(static_cast<long double>(nij) * n /
                                            (static_cast<long double>(ai) * bj));
                emi += prob * term;
            }
        }
    }
    return static_cast<double>(emi);
}

inline double ami_bruteforce(const Partition& gt, const Partition& est) {
    std::vector<std::uint64_t> a(gt.num_clusters(), 0), b(est.num_clusters(), 0);
    for (NodeId v = 0; v < gt.num_nodes(); ++v) {
        ++a[gt.assignment()[v]];
        ++b[est.assignment()[v]];
    }
    double mean_h = (entropy_of(a, gt.num_nodes()) + entropy_of(b, est.num_nodes())) / 2.0;
    double mi = mi_bruteforce(gt, est);
    double emi = emi_bruteforce(gt, est);
    double denom = mean_h - emi;
    if (std::abs(denom) < 1e-12) return (gt == est) ? 1.0 : 0.0;
    return (mi - emi) / denom;
}

} // namespace oracles

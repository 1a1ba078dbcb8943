#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/partition.hpp"

namespace blockcut {

/// m disjoint c-cliques plus a number of random inter-clique bridge edges.
struct CliqueFixtureSpec {
    std::size_t num_cliques = 1;
    std::size_t clique_size = 2;
    std::size_t bridges = 0;
    std::uint64_t seed = 0;
};

/// Independent Bernoulli edges: probability p_in inside a block, p_out
/// between blocks.
struct PlantedSpec {
    std::vector<std::size_t> block_sizes;
    double p_in = 0.0;
    double p_out = 0.0;
    std::uint64_t seed = 0;
};

struct Fixture {
    Graph graph;
    Partition ground_truth;
};

namespace detail {

inline GraphBuilder numbered_builder(std::size_t num_nodes) {
    GraphBuilder builder;
    for (std::size_t v = 0; v < num_nodes; ++v) builder.add_node(std::to_string(v));
    return builder;
}

/// Uniform k-subset of {0..population-1} via Floyd's algorithm.
inline std::vector<std::uint64_t> sample_distinct(std::uint64_t population, std::uint64_t k,
                                                  std::mt19937_64& rng) {
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> out;
    out.reserve(k);
    for (std::uint64_t i = population - k; i < population; ++i) {
        std::uniform_int_distribution<std::uint64_t> dist(0, i);
        std::uint64_t t = dist(rng);
        if (chosen.insert(t).second)
            out.push_back(t);
        else {
            chosen.insert(i);
            out.push_back(i);
        }
    }
    return out;
}

/// Unranks pair index 0..C(n,2)-1 to (i, j) with i < j, row-major order.
inline std::pair<std::uint64_t, std::uint64_t> unrank_pair(std::uint64_t index, std::uint64_t n) {
    // Row i starts at offset i*n - i*(i+1)/2 - i ... solve incrementally.
    std::uint64_t i = 0;
    std::uint64_t row_len = n - 1;
    while (index >= row_len) {
        index -= row_len;
        ++i;
        --row_len;
    }
    return {i, i + 1 + index};
}

} // namespace detail

/// Deterministic clique assembly with ground truth: one cluster per clique.
inline Fixture gen_cliques(const CliqueFixtureSpec& spec) {
    if (spec.num_cliques < 1) throw domain_error("gen_cliques: need at least one clique");
    if (spec.clique_size < 2) throw domain_error("gen_cliques: clique size must be >= 2");
    const std::size_t m = spec.num_cliques, c = spec.clique_size;
    const std::size_t n = m * c;
    const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t intra_pairs =
        static_cast<std::uint64_t>(m) * (static_cast<std::uint64_t>(c) * (c - 1) / 2);
    const std::uint64_t inter_pairs = all_pairs - intra_pairs;
    if (spec.bridges > inter_pairs)
        throw domain_error("gen_cliques: more bridges than inter-clique pairs");

    auto builder = detail::numbered_builder(n);
    std::vector<ClusterId> assignment(n);
    for (std::size_t q = 0; q < m; ++q) {
        for (std::size_t a = 0; a < c; ++a) {
            assignment[q * c + a] = static_cast<ClusterId>(q);
            for (std::size_t b = a + 1; b < c; ++b)
                builder.add_edge_ids(static_cast<NodeId>(q * c + a),
                                     static_cast<NodeId>(q * c + b));
        }
    }
    if (spec.bridges > 0) {
        // Rejection sampling of distinct inter-clique pairs.
        std::mt19937_64 rng(spec.seed);
        std::uniform_int_distribution<std::uint64_t> dist(0, all_pairs - 1);
        std::unordered_set<std::uint64_t> chosen;
        while (chosen.size() < spec.bridges) {
            std::uint64_t index = dist(rng);
            auto [u, v] = detail::unrank_pair(index, n);
            if (u / c == v / c) continue; // intra-clique pair
            if (!chosen.insert(index).second) continue;
            builder.add_edge_ids(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    }
    return Fixture{std::move(builder).build(), Partition::from_assignment(assignment)};
}

/// Planted-partition sampler. Edge counts per block pair are drawn
/// binomially and placed on uniformly chosen distinct pairs, which matches
/// independent per-pair Bernoulli sampling exactly.
inline Fixture gen_planted(const PlantedSpec& spec) {
    if (spec.p_in < 0.0 || spec.p_in > 1.0 || spec.p_out < 0.0 || spec.p_out > 1.0)
        throw domain_error("gen_planted: probabilities must lie in [0, 1]");
    if (spec.p_out > spec.p_in) throw domain_error("gen_planted: requires p_out <= p_in");
    std::size_t n = 0;
    for (std::size_t size : spec.block_sizes) {
        if (size == 0) throw domain_error("gen_planted: empty block");
        n += size;
    }
    auto builder = detail::numbered_builder(n);
    std::vector<ClusterId> assignment(n);
    std::vector<std::size_t> offsets;
    offsets.reserve(spec.block_sizes.size());
    std::size_t start = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
        offsets.push_back(start);
        for (std::size_t v = start; v < start + spec.block_sizes[b]; ++v)
            assignment[v] = static_cast<ClusterId>(b);
        start += spec.block_sizes[b];
    }

    std::mt19937_64 rng(spec.seed);
    auto sample_block_pair = [&](std::size_t bi, std::size_t bj, double p) {
        std::uint64_t ni = spec.block_sizes[bi];
        std::uint64_t population =
            (bi == bj) ? ni * (ni - 1) / 2 : ni * spec.block_sizes[bj];
        if (population == 0 || p <= 0.0) return;
        std::uint64_t count;
        if (p >= 1.0) {
            count = population;
        } else {
            std::binomial_distribution<std::uint64_t> binom(population, p);
            count = binom(rng);
        }
        auto picks = detail::sample_distinct(population, count, rng);
        for (std::uint64_t index : picks) {
            std::uint64_t u, v;
            if (bi == bj) {
                auto [a, b] = detail::unrank_pair(index, ni);
                u = offsets[bi] + a;
                v = offsets[bi] + b;
            } else {
                u = offsets[bi] + index / spec.block_sizes[bj];
                v = offsets[bj] + index % spec.block_sizes[bj];
            }
            builder.add_edge_ids(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    };
    for (std::size_t bi = 0; bi < spec.block_sizes.size(); ++bi) {
        sample_block_pair(bi, bi, spec.p_in);
        for (std::size_t bj = bi + 1; bj < spec.block_sizes.size(); ++bj)
            sample_block_pair(bi, bj, spec.p_out);
    }
    return Fixture{std::move(builder).build(), Partition::from_assignment(assignment)};
}

} // namespace blockcut

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "blockcut/graph.hpp"
#include "blockcut/mincut.hpp"
#include "blockcut/partition.hpp"
#include "blockcut/synthgen.hpp"
#include "blockcut/treatments.hpp"
#include "test_util.hpp"

using namespace blockcut;
using Catch::Approx;

namespace {

/// Two K5s joined by the single edge 4-5.
Graph bridged_k5_pair() {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < 5; ++u)
        for (NodeId v = u + 1; v < 5; ++v) edges.emplace_back(u, v);
    for (NodeId u = 5; u < 10; ++u)
        for (NodeId v = u + 1; v < 10; ++v) edges.emplace_back(u, v);
    edges.emplace_back(4, 5);
    return testutil::graph_from_edges(10, edges);
}

} // namespace

TEST_CASE("threshold rule variants") {
    CHECK(ThresholdRule::log10_rule().threshold(10) == Approx(1.0));
    CHECK(ThresholdRule::constant_rule(2.5).threshold(100) == Approx(2.5));
    CHECK(ThresholdRule::none_rule().threshold(7) < -1e300);
    CHECK(ThresholdRule::parse("log10").kind == ThresholdRule::Kind::log10);
    CHECK(ThresholdRule::parse("none").kind == ThresholdRule::Kind::none);
    CHECK(ThresholdRule::parse("1.5").c == Approx(1.5));
    CHECK_THROWS_AS(ThresholdRule::parse("bogus"), domain_error);
    CHECK_THROWS_AS(ThresholdRule::parse("-1"), domain_error);
}

TEST_CASE("treat_cc splits a disconnected cluster into components") {
    Graph g = testutil::graph_from_edges(4, {{0, 1}, {2, 3}});
    Partition p = Partition::one_block(4);
    Partition out = treat_cc(g, p);
    CHECK(out.num_clusters() == 2);
    CHECK(out == testutil::partition_of(4, {{0, 1}, {2, 3}}));
}

TEST_CASE("treat_cc leaves connected clusters alone") {
    Graph tri = testutil::complete_graph(3);
    Partition p = Partition::one_block(3);
    CHECK(treat_cc(tri, p) == p);
}

TEST_CASE("treat_cc decomposes only the disconnected cluster") {
    // Edges 0-1, 1-2, 3-4; node 5 isolated. Clusters {0,1,2} and {3,4,5}.
    Graph g = testutil::graph_from_edges(6, {{0, 1}, {1, 2}, {3, 4}});
    Partition p = testutil::partition_of(6, {{0, 1, 2}, {3, 4, 5}});
    Partition out = treat_cc(g, p);
    CHECK(out == testutil::partition_of(6, {{0, 1, 2}, {3, 4}, {5}}));
}

TEST_CASE("treat_wcc splits a bridged pair of K5s") {
    // n=10, min cut 1, threshold log10(10)=1: 1 > 1 fails, so split; each K5
    // then passes (cut 4 > log10(5)).
    Graph g = bridged_k5_pair();
    Partition out = treat_wcc(g, Partition::one_block(10));
    CHECK(out.num_clusters() == 2);
    CHECK(out == testutil::partition_of(10, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}));
}

TEST_CASE("treat_wcc keeps a K5 and a connected pair") {
    Graph k5 = testutil::complete_graph(5);
    CHECK(treat_wcc(k5, Partition::one_block(5)) == Partition::one_block(5));

    Graph pair = testutil::path_graph(2);
    CHECK(treat_wcc(pair, Partition::one_block(2)) == Partition::one_block(2));
}

TEST_CASE("classify_cluster boundary cases") {
    // Two K5s bridged: n=10, min cut 1, log10(10) = 1, 1 > 1 is false.
    Graph g10 = bridged_k5_pair();
    NodeSet all10;
    for (NodeId v = 0; v < 10; ++v) all10.push_back(v);
    CHECK(classify_cluster(g10, all10) == ClusterClass::poorly_connected);

    // Bridged K4+K5 gives n=9 with min cut 1 > log10(9) ~ 0.954.
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < 4; ++u)
        for (NodeId v = u + 1; v < 4; ++v) edges.emplace_back(u, v);
    for (NodeId u = 4; u < 9; ++u)
        for (NodeId v = u + 1; v < 9; ++v) edges.emplace_back(u, v);
    edges.emplace_back(3, 4);
    Graph g9 = testutil::graph_from_edges(9, edges);
    NodeSet all9;
    for (NodeId v = 0; v < 9; ++v) all9.push_back(v);
    CHECK(classify_cluster(g9, all9) == ClusterClass::well_connected);

    Graph isolated = testutil::graph_from_edges(1, {});
    CHECK(classify_cluster(isolated, {0}) == ClusterClass::singleton);
    CHECK_THROWS_AS(classify_cluster(isolated, {}), domain_error);
}

TEST_CASE("profile aggregates over non-singleton clusters") {
    // K3 cluster, a disconnected pair, and a singleton.
    Graph g = testutil::graph_from_edges(6, {{0, 1}, {1, 2}, {0, 2}});
    Partition p = testutil::partition_of(6, {{0, 1, 2}, {3, 4}, {5}});
    auto prof = profile(g, p);
    REQUIRE(prof.clusters.size() == 3);
    CHECK(prof.num_singletons == 1);
    CHECK(prof.num_non_singleton == 2);
    CHECK(*prof.pct_disconnected == Approx(50.0));
    CHECK(*prof.pct_poorly_connected == Approx(0.0));
    CHECK(*prof.pct_well_connected == Approx(50.0));
    CHECK(prof.clusters[0].cls == ClusterClass::well_connected);
    CHECK(prof.clusters[0].min_cut.has_value());
    CHECK(*prof.clusters[0].min_cut == 2);
    CHECK(prof.clusters[1].cls == ClusterClass::disconnected);
    CHECK_FALSE(prof.clusters[1].min_cut.has_value());
}

TEST_CASE("profile of an all-singleton partition reports absent aggregates") {
    Graph g = testutil::graph_from_edges(3, {});
    auto prof = profile(g, Partition::singletons(3));
    CHECK(prof.num_non_singleton == 0);
    CHECK_FALSE(prof.pct_disconnected.has_value());
    CHECK_FALSE(prof.pct_poorly_connected.has_value());
    CHECK_FALSE(prof.pct_well_connected.has_value());
}

TEST_CASE("profile of a fully well-connected clustering") {
    auto fixture = gen_cliques({4, 5, 0, 1});
    auto prof = profile(fixture.graph, fixture.ground_truth);
    CHECK(*prof.pct_disconnected == Approx(0.0));
    CHECK(*prof.pct_well_connected == Approx(100.0));
}

TEST_CASE("treatments audit: postconditions, idempotence, composition, refinement") {
    std::mt19937_64 rng(99);
    ThresholdRule rule = ThresholdRule::log10_rule();
    for (int trial = 0; trial < 25; ++trial) {
        Fixture fixture;
        if (trial % 2 == 0) {
            CliqueFixtureSpec spec;
            spec.num_cliques = 2 + rng() % 5;
            spec.clique_size = 3 + rng() % 4;
            spec.bridges = rng() % 4;
            spec.seed = rng();
            fixture = gen_cliques(spec);
        } else {
            PlantedSpec spec;
            std::size_t blocks = 2 + rng() % 3;
            for (std::size_t b = 0; b < blocks; ++b) spec.block_sizes.push_back(4 + rng() % 8);
            spec.p_in = 0.5;
            spec.p_out = 0.05;
            spec.seed = rng();
            fixture = gen_planted(spec);
        }
        const Graph& g = fixture.graph;
        // A coarse random partition that may merge pieces arbitrarily.
        Partition input = testutil::random_partition(g.num_nodes(), 3, rng);

        Partition cc = treat_cc(g, input);
        Partition wcc = treat_wcc(g, input, rule);

        for (const auto& cluster : cc.clusters())
            CHECK(connected_components(g, cluster).size() == 1);
        for (const auto& cluster : wcc.clusters()) {
            if (cluster.size() == 1) continue;
            auto sub = induced_subgraph(g, cluster);
            REQUIRE(connected_components(sub.graph).size() == 1);
            if (cluster.size() <= 12) {
                auto value = min_cut_value_bruteforce(sub.graph);
                CHECK(static_cast<double>(value) > rule.threshold(cluster.size()));
            } else {
                CHECK(static_cast<double>(global_min_cut(sub.graph).cut_size) >
                      rule.threshold(cluster.size()));
            }
        }

        CHECK(treat_cc(g, cc) == cc);
        CHECK(treat_wcc(g, wcc, rule) == wcc);
        CHECK(treat_wcc(g, cc, rule) == wcc); // WCC absorbs the CC step
        CHECK(cc.refines(input));
        CHECK(wcc.refines(input));
        CHECK(wcc.refines(cc));
    }
}

TEST_CASE("treatment output does not depend on thread count") {
    std::mt19937_64 rng(4242);
    PlantedSpec spec;
    spec.block_sizes = {30, 30, 30, 30};
    spec.p_in = 0.3;
    spec.p_out = 0.02;
    spec.seed = 5;
    auto fixture = gen_planted(spec);
    Partition input = testutil::random_partition(fixture.graph.num_nodes(), 5, rng);
    Partition sequential = treat_wcc(fixture.graph, input, ThresholdRule::log10_rule(), 1);
    Partition parallel = treat_wcc(fixture.graph, input, ThresholdRule::log10_rule(), 4);
    CHECK(sequential == parallel);
    CHECK(treat_cc(fixture.graph, input, 1) == treat_cc(fixture.graph, input, 4));
}

TEST_CASE("wcc with the none rule equals cc") {
    std::mt19937_64 rng(77);
    Graph g = testutil::random_connected_graph(20, 10, rng);
    Partition input = testutil::random_partition(g.num_nodes(), 4, rng);
    CHECK(treat_wcc(g, input, ThresholdRule::none_rule()) == treat_cc(g, input));
}

TEST_CASE("treatments reject partitions of the wrong size") {
    Graph g = testutil::path_graph(3);
    CHECK_THROWS_AS(treat_cc(g, Partition::one_block(5)), domain_error);
    CHECK_THROWS_AS(treat_wcc(g, Partition::one_block(2)), domain_error);
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "test_util.hpp"

using namespace blockcut;
using Catch::Approx;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_edgelist drops duplicates and self-loops") {
    auto path = write_temp("bc_graph_dups.tsv", "1\t2\n2\t3\n2\t3\n3\t3\n");
    Graph g = load_edgelist(path);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.has_edge(*g.find_label("1"), *g.find_label("2")));
    CHECK(g.has_edge(*g.find_label("2"), *g.find_label("3")));
    CHECK_FALSE(g.has_edge(*g.find_label("1"), *g.find_label("3")));
}

TEST_CASE("load_edgelist empty file gives empty graph") {
    auto path = write_temp("bc_graph_empty.tsv", "");
    Graph g = load_edgelist(path);
    CHECK(g.num_nodes() == 0);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("load_edgelist triangle on string labels") {
    auto path = write_temp("bc_graph_tri.tsv", "a\tb\nb\tc\nc\ta\n");
    Graph g = load_edgelist(path);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 3);
    for (NodeId v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
}

TEST_CASE("load_edgelist skips comments and blank lines") {
    auto path = write_temp("bc_graph_comments.tsv", "# header\n\n1\t2\n   \n% other\n2\t3\n");
    Graph g = load_edgelist(path);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
}

TEST_CASE("load_edgelist reports malformed lines with their number") {
    auto path = write_temp("bc_graph_bad.tsv", "1\t2\n1 2 3\n");
    try {
        load_edgelist(path);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("load_edgelist missing file") {
    CHECK_THROWS_AS(load_edgelist("/nonexistent/path/file.tsv"), io_error);
}

TEST_CASE("edge list round-trip is the identity") {
    // Identity as a labeled graph: internal ids may be assigned in a
    // different first-appearance order after reloading.
    auto labeled_edges = [](const Graph& g) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto [u, v] : g.edges()) {
            std::string a = g.label(u), b = g.label(v);
            if (b < a) std::swap(a, b);
            out.emplace_back(std::move(a), std::move(b));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = testutil::random_connected_graph(2 + trial, trial, rng);
        std::ostringstream out;
        save_edgelist(g, out);
        auto path = write_temp("bc_graph_rt.tsv", out.str());
        Graph g2 = load_edgelist(path);
        REQUIRE(g2.num_nodes() == g.num_nodes());
        REQUIRE(g2.num_edges() == g.num_edges());
        CHECK(labeled_edges(g2) == labeled_edges(g));
    }
}

TEST_CASE("connected_components basic cases") {
    Graph g = testutil::graph_from_edges(4, {{0, 1}, {2, 3}});
    auto comps = connected_components(g, {0, 1, 2, 3});
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == NodeSet{0, 1});
    CHECK(comps[1] == NodeSet{2, 3});

    Graph tri = testutil::complete_graph(3);
    CHECK(connected_components(tri, {0, 1, 2}).size() == 1);
}

TEST_CASE("connected_components respects the induced subgraph") {
    // Edges 0-1, 1-2, 3-4 restricted to {0,1,3,4}: induced edges 0-1 and 3-4.
    Graph g = testutil::graph_from_edges(5, {{0, 1}, {1, 2}, {3, 4}});
    auto comps = connected_components(g, {0, 1, 3, 4});
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == NodeSet{0, 1});
    CHECK(comps[1] == NodeSet{3, 4});
}

TEST_CASE("connected_components rejects out-of-range nodes") {
    Graph g = testutil::path_graph(3);
    CHECK_THROWS_AS(connected_components(g, {0, 5}), domain_error);
}

TEST_CASE("components partition their input set") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = testutil::random_connected_graph(12, 5, rng);
        // Random subset.
        NodeSet subset;
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            if (rng() % 2) subset.push_back(v);
        auto comps = connected_components(g, subset);
        std::size_t covered = 0;
        NodeSet seen;
        for (const auto& comp : comps) {
            covered += comp.size();
            seen.insert(seen.end(), comp.begin(), comp.end());
        }
        CHECK(covered == subset.size());
        std::sort(seen.begin(), seen.end());
        CHECK(seen == subset); // disjoint cover
    }
}

TEST_CASE("induced_subgraph examples") {
    Graph k4 = testutil::complete_graph(4);
    auto sub = induced_subgraph(k4, {0, 1, 2});
    CHECK(sub.graph.num_nodes() == 3);
    CHECK(sub.graph.num_edges() == 3);
    CHECK(sub.parent_ids == NodeSet{0, 1, 2});

    NodeSet all{0, 1, 2, 3};
    auto full = induced_subgraph(k4, all);
    CHECK(full.graph.num_edges() == k4.num_edges());

    Graph p4 = testutil::path_graph(4);
    auto sparse = induced_subgraph(p4, {0, 2});
    CHECK(sparse.graph.num_nodes() == 2);
    CHECK(sparse.graph.num_edges() == 0);
}

TEST_CASE("induced subgraph never gains edges") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = testutil::random_connected_graph(10, 8, rng);
        NodeSet subset;
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            if (rng() % 3) subset.push_back(v);
        if (subset.empty()) continue;
        auto sub = induced_subgraph(g, subset);
        CHECK(sub.graph.num_edges() <= g.num_edges());
    }
}

#include <doctest.h>

#include <sstream>

#include "satbridge/error.hpp"
#include "satbridge/graph.hpp"

#include "oracles.hpp"

using namespace satbridge;

TEST_CASE("from_edges normalizes and validates") {
    Graph g = Graph::from_edges(3, {{2, 0}, {1, 2}});
    CHECK(g.n_nodes() == 3);
    CHECK(g.n_edges() == 2);
    CHECK(g.edges()[0] == std::pair<int, int>{0, 2});
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(2, 0));
    CHECK(!g.has_edge(0, 1));
    CHECK(g.degree(2) == 2);

    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0}}), ArgumentError);
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1}, {1, 0}}), ArgumentError);
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 2}}), ArgumentError);
}

TEST_CASE("adjacency is consistent with edges") {
    std::uint64_t state = 42;
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = refimpl::random_graph(10, 0.4, state);
        std::vector<std::vector<int>> adj(g.n_nodes());
        for (auto [u, v] : g.edges()) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (int v = 0; v < g.n_nodes(); ++v) {
            std::sort(adj[v].begin(), adj[v].end());
            CHECK(adj[v] == g.neighbors(v));
            CHECK(g.degree(v) == static_cast<int>(adj[v].size()));
        }
    }
}

TEST_CASE("parse_gset") {
    SUBCASE("smallest legal file") {
        std::istringstream in("2 1\n1 2 1\n");
        Graph g = parse_gset(in);
        CHECK(g.n_nodes() == 2);
        CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}});
    }
    SUBCASE("weight column optional, non-unit weights counted") {
        std::istringstream in("3 2\n1 2\n2 3 5\n");
        ParseStats stats;
        Graph g = parse_gset(in, &stats);
        CHECK(g.n_edges() == 2);
        CHECK(stats.nonunit_weights == 1);
    }
    SUBCASE("self-loop rejected") {
        std::istringstream in("2 1\n1 1 1\n");
        CHECK_THROWS_AS(parse_gset(in), ParseError);
    }
    SUBCASE("edge count must match header") {
        std::istringstream in("3 2\n1 2 1\n");
        CHECK_THROWS_AS(parse_gset(in), ParseError);
    }
    SUBCASE("out-of-range index names the line") {
        std::istringstream in("2 1\n1 3 1\n");
        CHECK_THROWS_WITH_AS(parse_gset(in), doctest::Contains("line 2"), ParseError);
    }
}

TEST_CASE("parse_dimacs") {
    SUBCASE("path graph") {
        std::istringstream in("c comment\np edge 3 2\ne 1 2\ne 2 3\n");
        Graph g = parse_dimacs(in);
        CHECK(g.n_nodes() == 3);
        CHECK(g.n_edges() == 2);
        CHECK(g.has_edge(0, 1));
        CHECK(g.has_edge(1, 2));
    }
    SUBCASE("duplicates are deduplicated and counted") {
        std::istringstream in("p edge 2 2\ne 1 2\ne 2 1\n");
        ParseStats stats;
        Graph g = parse_dimacs(in, &stats);
        CHECK(g.n_edges() == 1);
        CHECK(stats.duplicate_edges == 1);
    }
    SUBCASE("edge before p line") {
        std::istringstream in("e 1 2\n");
        CHECK_THROWS_AS(parse_dimacs(in), ParseError);
    }
    SUBCASE("missing p line") {
        std::istringstream in("c nothing\n");
        CHECK_THROWS_AS(parse_dimacs(in), ParseError);
    }
    SUBCASE("token count mismatch") {
        std::istringstream in("p edge 3 1\ne 1 2 9\n");
        CHECK_THROWS_AS(parse_dimacs(in), ParseError);
    }
}

TEST_CASE("gen_random_regular") {
    SUBCASE("n=4 gamma=3 is K4") {
        Graph g = gen_random_regular(4, 3, 7);
        CHECK(g.n_edges() == 6);
        for (int u = 0; u < 4; ++u)
            for (int v = u + 1; v < 4; ++v) CHECK(g.has_edge(u, v));
    }
    SUBCASE("all degrees equal gamma over many seeds") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Graph g = gen_random_regular(20, 3, seed);
            for (int v = 0; v < 20; ++v) CHECK(g.degree(v) == 3);
        }
    }
    SUBCASE("deterministic") {
        Graph a = gen_random_regular(100, 3, 1);
        Graph b = gen_random_regular(100, 3, 1);
        CHECK(a.edges() == b.edges());
        for (int v = 0; v < 100; ++v) CHECK(a.degree(v) == 3);
    }
    SUBCASE("argument errors") {
        CHECK_THROWS_AS(gen_random_regular(5, 3, 0), ArgumentError);  // odd n*gamma
        CHECK_THROWS_AS(gen_random_regular(4, 4, 0), ArgumentError);  // gamma >= n
    }
}

TEST_CASE("constraints and objectives match brute-force definitions") {
    std::uint64_t state = 7;
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = refimpl::random_graph(7, 0.35, state);
        for (std::uint64_t bits = 0; bits < (1u << 7); ++bits) {
            std::vector<std::uint8_t> in(7);
            for (int v = 0; v < 7; ++v) in[v] = (bits >> v) & 1;

            long cut = 0;
            bool indep = true;
            bool dom = true;
            for (auto [u, v] : g.edges()) {
                cut += in[u] != in[v];
                if (in[u] && in[v]) indep = false;
            }
            for (int v = 0; v < 7; ++v) {
                bool d = in[v] != 0;
                for (int u : g.neighbors(v)) d = d || in[u];
                dom = dom && d;
            }
            CHECK(objective_value(ProblemKind::MaxCut, g, in) == cut);
            CHECK(satisfies_constraints(ProblemKind::MIS, g, in) == indep);
            CHECK(satisfies_constraints(ProblemKind::MDS, g, in) == dom);
            CHECK(satisfies_constraints(ProblemKind::MaxCut, g, in));
        }
    }
}

TEST_CASE("problem kind round-trips and sense") {
    for (auto kind : {ProblemKind::MaxCut, ProblemKind::MIS, ProblemKind::MDS})
        CHECK(problem_kind_from_string(to_string(kind)) == kind);
    CHECK(is_maximization(ProblemKind::MaxCut));
    CHECK(is_maximization(ProblemKind::MIS));
    CHECK(!is_maximization(ProblemKind::MDS));
    CHECK_THROWS_AS(problem_kind_from_string("tsp"), ArgumentError);
}

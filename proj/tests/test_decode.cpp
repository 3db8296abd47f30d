#include <doctest.h>

#include "satbridge/decode.hpp"
#include "satbridge/error.hpp"

#include "oracles.hpp"

using namespace satbridge;

namespace {

CoInstance make(ProblemKind kind, Graph g) {
    CoInstance inst;
    inst.graph = std::move(g);
    inst.kind = kind;
    return inst;
}

std::vector<std::uint8_t> mask_of(int n, const NodeSet& set) {
    std::vector<std::uint8_t> mask(n, 0);
    for (int v : set) mask[v] = 1;
    return mask;
}

Graph petersen() {
    return Graph::from_edges(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},
                                  {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
                                  {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}});
}

}  // namespace

TEST_CASE("threshold_decode tie rule") {
    CoInstance inst = make(ProblemKind::MaxCut, Graph::from_edges(2, {{0, 1}}));
    CHECK(threshold_decode({0.9, 0.1}, inst) == NodeSet{0});
    CHECK(threshold_decode({0.5, 0.5}, inst) == NodeSet{});
    CoInstance tri = make(ProblemKind::MIS, Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}));
    NodeSet raw = threshold_decode({0.6, 0.6, 0.6}, tri);
    CHECK(raw == NodeSet{0, 1, 2});
    CHECK(!satisfies_constraints(ProblemKind::MIS, tri.graph, mask_of(3, raw)));
    CHECK_THROWS_AS(threshold_decode({0.5}, tri), ArgumentError);
}

TEST_CASE("repair") {
    SUBCASE("triangle MIS greedy order") {
        CoInstance tri = make(ProblemKind::MIS, Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}));
        CHECK(repair(tri, {0, 1, 2}, {0.9, 0.8, 0.7}) == NodeSet{0});
    }
    SUBCASE("already-feasible MIS set returned unchanged") {
        CoInstance tri = make(ProblemKind::MIS, Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}));
        CHECK(repair(tri, {1}, {0.9, 0.1, 0.8}) == NodeSet{1});
    }
    SUBCASE("K1,4 MDS from empty raw set") {
        CoInstance star = make(ProblemKind::MDS,
                               Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
        CHECK(repair(star, {}, {0.9, 0.1, 0.1, 0.1, 0.1}) == NodeSet{0});
    }
    SUBCASE("MaxCut is identity") {
        CoInstance edge = make(ProblemKind::MaxCut, Graph::from_edges(2, {{0, 1}}));
        CHECK(repair(edge, {1}, {0.2, 0.9}) == NodeSet{1});
    }
    SUBCASE("repair always yields feasibility on random graphs") {
        std::uint64_t state = 17;
        for (int trial = 0; trial < 40; ++trial) {
            Graph g = refimpl::random_graph(10, 0.35, state);
            std::vector<double> probs(10);
            for (int v = 0; v < 10; ++v) probs[v] = ((state >> (v + 3)) & 127) / 127.0;
            for (auto kind : {ProblemKind::MIS, ProblemKind::MDS}) {
                CoInstance inst = make(kind, g);
                NodeSet raw = threshold_decode(probs, inst);
                NodeSet fixed = repair(inst, raw, probs);
                CHECK(satisfies_constraints(kind, g, mask_of(10, fixed)));
            }
        }
    }
}

TEST_CASE("2-improvement canonical and boundary cases") {
    SUBCASE("path a-b-c: {b} -> {a, c}") {
        CoInstance path = make(ProblemKind::MIS, Graph::from_edges(3, {{0, 1}, {1, 2}}));
        CHECK(local_search_2improve(path, {1}, 10) == NodeSet{0, 2});
    }
    SUBCASE("maximum set on C5 is unchanged") {
        CoInstance c5 = make(ProblemKind::MIS,
                             Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}));
        CHECK(refimpl::brute_best(ProblemKind::MIS, c5.graph) == 2);
        CHECK(local_search_2improve(c5, {0, 2}, 50) == NodeSet{0, 2});
    }
    SUBCASE("Petersen: greedy start reaches the optimum of 4") {
        CoInstance inst = make(ProblemKind::MIS, petersen());
        CHECK(refimpl::brute_best(ProblemKind::MIS, inst.graph) == 4);
        NodeSet result = local_search_2improve(inst, greedy_mis(inst.graph), 120);
        CHECK(result.size() == 4);
        CHECK(satisfies_constraints(ProblemKind::MIS, inst.graph, mask_of(10, result)));
    }
    SUBCASE("infeasible input rejected") {
        CoInstance tri = make(ProblemKind::MIS, Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}));
        CHECK_THROWS_AS(local_search_2improve(tri, {0, 1}, 10), ArgumentError);
    }
}

TEST_CASE("greedy + 2-improvement MIS near-optimal on 100 random graphs") {
    std::uint64_t state = 23;
    int within_one = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 6 + trial % 7;  // up to 12
        Graph g = refimpl::random_graph(n, 0.25 + 0.05 * (trial % 5), state);
        CoInstance inst = make(ProblemKind::MIS, g);
        NodeSet start = greedy_mis(g);
        long optimum = refimpl::brute_best(ProblemKind::MIS, g);
        long prev = static_cast<long>(start.size());
        NodeSet cur = start;
        for (int pass = 0; pass < 120; ++pass) {
            NodeSet next = local_search_2improve(inst, cur, 1);
            CHECK(satisfies_constraints(ProblemKind::MIS, g, mask_of(n, next)));
            CHECK(static_cast<long>(next.size()) >= prev);  // monotone improvement
            if (next.size() == cur.size()) break;
            prev = static_cast<long>(next.size());
            cur = next;
        }
        CHECK(static_cast<long>(cur.size()) <= optimum);
        if (static_cast<long>(cur.size()) >= optimum - 1) ++within_one;
    }
    CHECK(within_one >= 80);
}

TEST_CASE("MDS local search") {
    SUBCASE("redundant removal") {
        Graph star = Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
        CoInstance inst = make(ProblemKind::MDS, star);
        NodeSet result = local_search_2improve(inst, {0, 1, 2}, 10);
        CHECK(result == NodeSet{0});
    }
    SUBCASE("1-swap toward higher probability preserves domination") {
        // path 0-1-2: {0} is not dominating; {1} is. start {1}, probs favor 1
        Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
        CoInstance inst = make(ProblemKind::MDS, path);
        NodeSet result = local_search_2improve(inst, {1}, 10, {0.9, 0.1, 0.2});
        CHECK(satisfies_constraints(ProblemKind::MDS, path, mask_of(3, result)));
        CHECK(result.size() == 1);
    }
    SUBCASE("size never increases on random graphs") {
        std::uint64_t state = 31;
        for (int trial = 0; trial < 30; ++trial) {
            Graph g = refimpl::random_graph(9, 0.3, state);
            CoInstance inst = make(ProblemKind::MDS, g);
            NodeSet start = greedy_mds(g);
            NodeSet result = local_search_2improve(inst, start, 50);
            CHECK(result.size() <= start.size());
            CHECK(satisfies_constraints(ProblemKind::MDS, g, mask_of(9, result)));
            CHECK(static_cast<long>(result.size()) >=
                  refimpl::brute_best(ProblemKind::MDS, g));
        }
    }
}

TEST_CASE("MaxCut 1-flip search never decreases the cut") {
    std::uint64_t state = 41;
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = refimpl::random_graph(12, 0.35, state);
        NodeSet side = greedy_maxcut(g, rng, 100);
        long cut = objective_value(ProblemKind::MaxCut, g, mask_of(12, side));
        // local optimum: no single flip improves
        for (int v = 0; v < 12; ++v) {
            auto mask = mask_of(12, side);
            mask[v] ^= 1;
            CHECK(objective_value(ProblemKind::MaxCut, g, mask) <= cut);
        }
        NodeSet again = local_search_maxcut(g, side, 100);
        CHECK(objective_value(ProblemKind::MaxCut, g, mask_of(12, again)) == cut);
    }
}

TEST_CASE("greedy baselines are feasible") {
    std::uint64_t state = 53;
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = refimpl::random_graph(11, 0.3, state);
        CHECK(satisfies_constraints(ProblemKind::MIS, g, mask_of(11, greedy_mis(g))));
        CHECK(satisfies_constraints(ProblemKind::MDS, g, mask_of(11, greedy_mds(g))));
    }
}

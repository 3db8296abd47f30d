#pragma once

#include <cstdint>
#include <vector>

#include "satbridge/graph.hpp"
#include "satbridge/maxsat.hpp"

namespace satbridge {

// Variable-clause incidence graph of a formula. Edges carry the literal
// polarity so x and !x stay distinguishable downstream.
struct BipartiteGraph {
    struct Edge {
        int var = 0;
        int clause = 0;
        bool negated = false;
    };

    int n_vars = 0;
    int n_clauses = 0;
    std::vector<Edge> edges;                   // clause order, literal order within clause
    std::vector<std::vector<int>> var_edges;   // edge indices per variable
    std::vector<std::vector<int>> clause_edges;

    int var_degree(int v) const { return static_cast<int>(var_edges[v].size()); }
    int clause_degree(int c) const { return static_cast<int>(clause_edges[c].size()); }
};

enum class MdsClauseMode {
    PerNode,  // x_i OR (x_j for j in N(i)) for every node i (default)
    PerEdge,  // x_i OR x_j per edge, the formula as literally printed
};

struct ReduceOptions {
    MdsClauseMode mds_mode = MdsClauseMode::PerNode;
    bool polarity_edges = true;  // off reproduces the affiliation-only lift
};

// Hard clauses first (edge/node order), then soft clauses (node/edge order).
// MIS: hard !x_i|!x_j per edge, soft x_i per node.
// MDS: hard domination clause per node, soft !x_i per node.
// MaxCut: soft x_i|x_j and !x_i|!x_j per edge.
Formula reduce_to_maxsat(const CoInstance& instance, const ReduceOptions& opts = {});

BipartiteGraph build_bipartite(const Formula& formula, bool polarity_edges = true);

struct SolutionReport {
    std::vector<int> selected;
    long objective = 0;
    bool feasible = false;
};

SolutionReport recover_solution(const CoInstance& instance, const Assignment& assignment);

}  // namespace satbridge

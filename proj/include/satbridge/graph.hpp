#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace satbridge {

// Undirected simple graph. Immutable after construction.
class Graph {
public:
    Graph() = default;

    // Validates node ranges, rejects self-loops and duplicate edges, and
    // builds the adjacency lists. Edge endpoints are normalized to (min,max).
    static Graph from_edges(int n_nodes, std::vector<std::pair<int, int>> edges);

    int n_nodes() const { return n_nodes_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    bool has_edge(int u, int v) const;

private:
    int n_nodes_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;  // sorted neighbor lists
};

enum class ProblemKind { MaxCut, MIS, MDS };

const char* to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

// true iff the objective is maximized (MaxCut, MIS).
bool is_maximization(ProblemKind kind);

// Constraint predicate over node subsets. `selected` is a 0/1 vector of
// length n_nodes.
bool satisfies_constraints(ProblemKind kind, const Graph& g, const std::vector<std::uint8_t>& selected);

// Objective value of a subset: cut size (MaxCut) or |S| (MIS, MDS).
long objective_value(ProblemKind kind, const Graph& g, const std::vector<std::uint8_t>& selected);

struct CoInstance {
    Graph graph;
    ProblemKind kind = ProblemKind::MaxCut;
    std::string name;
};

struct ParseStats {
    int duplicate_edges = 0;   // deduplicated "e" lines (DIMACS)
    int nonunit_weights = 0;   // GSET weights != 1, recorded then discarded
};

// GSET edge list: "n m" header then "u v [w]" lines, 1-based.
Graph parse_gset(std::istream& in, ParseStats* stats = nullptr);

// DIMACS: "c" comments, "p edge n m", then "e u v" lines, 1-based.
Graph parse_dimacs(std::istream& in, ParseStats* stats = nullptr);

// Pairing-model gamma-regular graph with full restart on self-loop or
// multi-edge collisions. Deterministic for a fixed seed.
Graph gen_random_regular(int n, int gamma, std::uint64_t seed);

}  // namespace satbridge

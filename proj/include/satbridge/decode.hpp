#pragma once

#include <vector>

#include "satbridge/graph.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

using NodeSet = std::vector<int>;  // sorted node ids

// Nodes with probability strictly above 0.5; ties are left out. For MaxCut
// the set is one side of the partition and needs no repair.
NodeSet threshold_decode(const std::vector<double>& probs, const CoInstance& instance);

// Greedy feasibility repair driven by the probabilities.
// MIS: rebuild in descending probability, keeping independent nodes.
// MDS: add each undominated node's highest-probability dominator, then drop
// redundant members in ascending probability order.
// MaxCut: identity (every partition is feasible).
NodeSet repair(const CoInstance& instance, const NodeSet& raw, const std::vector<double>& probs);

// 2-improvement local search. MIS: first-improvement scan in index order,
// swapping a selected node for two of its mutually non-adjacent 1-tight
// neighbors; up to `steps` passes. MDS: redundant removal plus 1-swaps that
// preserve domination and raise probability. Probabilities may be empty
// (MDS swaps then require a strict domination gain, i.e. never fire).
// Infeasible input is an argument error.
NodeSet local_search_2improve(const CoInstance& instance, const NodeSet& set, int steps,
                              const std::vector<double>& probs = {});

// 1-flip hill climbing on the cut: move any node whose flip gain is
// positive, first improvement in index order, up to `steps` passes.
NodeSet local_search_maxcut(const Graph& graph, const NodeSet& side, int steps);

// Probability-free baselines used for benchmark sanity deltas.
NodeSet greedy_mis(const Graph& graph);
NodeSet greedy_mds(const Graph& graph);
NodeSet greedy_maxcut(const Graph& graph, Rng& rng, int steps);

}  // namespace satbridge

#include "satbridge/decode.hpp"

#include <algorithm>
#include <numeric>

#include "satbridge/error.hpp"

namespace satbridge {

namespace {

std::vector<std::uint8_t> to_mask(int n, const NodeSet& set) {
    std::vector<std::uint8_t> mask(n, 0);
    for (int v : set) mask[v] = 1;
    return mask;
}

NodeSet from_mask(const std::vector<std::uint8_t>& mask) {
    NodeSet set;
    for (size_t v = 0; v < mask.size(); ++v)
        if (mask[v]) set.push_back(static_cast<int>(v));
    return set;
}

// Node order by descending probability, index ascending on ties.
std::vector<int> by_prob_desc(const std::vector<double>& probs) {
    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    return order;
}

bool dominated(const Graph& g, const std::vector<std::uint8_t>& in, int v) {
    if (in[v]) return true;
    for (int u : g.neighbors(v))
        if (in[u]) return true;
    return false;
}

// Count of nodes only `v` dominates; 0 means v is redundant.
bool mds_redundant(const Graph& g, const std::vector<std::uint8_t>& in, int v) {
    auto covered_without = [&](int w) {
        if (w != v && in[w]) return true;
        for (int u : g.neighbors(w))
            if (u != v && in[u]) return true;
        return false;
    };
    if (!covered_without(v)) return false;
    for (int u : g.neighbors(v))
        if (!covered_without(u)) return false;
    return true;
}

NodeSet repair_mis(const Graph& g, const std::vector<double>& probs) {
    std::vector<std::uint8_t> in(g.n_nodes(), 0);
    for (int v : by_prob_desc(probs)) {
        bool free = true;
        for (int u : g.neighbors(v))
            if (in[u]) { free = false; break; }
        if (free) in[v] = 1;
    }
    return from_mask(in);
}

NodeSet repair_mds(const Graph& g, const NodeSet& raw, const std::vector<double>& probs) {
    std::vector<std::uint8_t> in = to_mask(g.n_nodes(), raw);
    for (int v = 0; v < g.n_nodes(); ++v) {
        if (dominated(g, in, v)) continue;
        int best = v;
        for (int u : g.neighbors(v))
            if (probs[u] > probs[best]) best = u;
        in[best] = 1;
    }
    std::vector<int> order = by_prob_desc(probs);
    std::reverse(order.begin(), order.end());  // ascending probability
    for (int v : order)
        if (in[v] && mds_redundant(g, in, v)) in[v] = 0;
    return from_mask(in);
}

NodeSet mis_2improve(const Graph& g, const NodeSet& set, int steps) {
    std::vector<std::uint8_t> in = to_mask(g.n_nodes(), set);
    std::vector<int> tight(g.n_nodes(), 0);  // selected-neighbor count
    for (int v = 0; v < g.n_nodes(); ++v)
        if (in[v])
            for (int u : g.neighbors(v)) ++tight[u];

    auto insert = [&](int v) {
        in[v] = 1;
        for (int u : g.neighbors(v)) ++tight[u];
    };
    auto remove = [&](int v) {
        in[v] = 0;
        for (int u : g.neighbors(v)) --tight[u];
    };

    for (int pass = 0; pass < steps; ++pass) {
        bool moved = false;
        // Free insertions first: any unselected node with no selected neighbor.
        for (int v = 0; v < g.n_nodes(); ++v)
            if (!in[v] && tight[v] == 0) {
                insert(v);
                moved = true;
            }
        // 2-improvement: swap v out, two mutually non-adjacent 1-tight
        // neighbors of v in.
        for (int v = 0; v < g.n_nodes() && !moved; ++v) {
            if (!in[v]) continue;
            const auto& nb = g.neighbors(v);
            for (size_t i = 0; i < nb.size() && !moved; ++i) {
                if (in[nb[i]] || tight[nb[i]] != 1) continue;
                for (size_t j = i + 1; j < nb.size(); ++j) {
                    if (in[nb[j]] || tight[nb[j]] != 1) continue;
                    if (g.has_edge(nb[i], nb[j])) continue;
                    remove(v);
                    insert(nb[i]);
                    insert(nb[j]);
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) break;
    }
    return from_mask(in);
}

NodeSet mds_improve(const Graph& g, const NodeSet& set, int steps,
                    const std::vector<double>& probs) {
    std::vector<std::uint8_t> in = to_mask(g.n_nodes(), set);
    auto prob = [&](int v) { return probs.empty() ? 0.0 : probs[v]; };
    for (int pass = 0; pass < steps; ++pass) {
        bool moved = false;
        for (int v = 0; v < g.n_nodes(); ++v)
            if (in[v] && mds_redundant(g, in, v)) {
                in[v] = 0;
                moved = true;
            }
        // 1-swap: trade a dominator for a higher-probability neighbor when
        // domination is preserved.
        for (int v = 0; v < g.n_nodes() && !moved; ++v) {
            if (!in[v]) continue;
            for (int u : g.neighbors(v)) {
                if (in[u] || prob(u) <= prob(v)) continue;
                in[v] = 0;
                in[u] = 1;
                bool ok = true;
                for (int w = 0; w < g.n_nodes() && ok; ++w) ok = dominated(g, in, w);
                if (ok) {
                    moved = true;
                    break;
                }
                in[v] = 1;
                in[u] = 0;
            }
        }
        if (!moved) break;
    }
    return from_mask(in);
}

}  // namespace

NodeSet threshold_decode(const std::vector<double>& probs, const CoInstance& instance) {
    if (static_cast<int>(probs.size()) != instance.graph.n_nodes())
        throw ArgumentError("threshold_decode: probs length != node count");
    NodeSet set;
    for (size_t v = 0; v < probs.size(); ++v)
        if (probs[v] > 0.5) set.push_back(static_cast<int>(v));
    return set;
}

NodeSet repair(const CoInstance& instance, const NodeSet& raw, const std::vector<double>& probs) {
    const Graph& g = instance.graph;
    if (static_cast<int>(probs.size()) != g.n_nodes())
        throw ArgumentError("repair: probs length != node count");
    switch (instance.kind) {
        case ProblemKind::MaxCut:
            return raw;
        case ProblemKind::MIS: {
            if (satisfies_constraints(ProblemKind::MIS, g, to_mask(g.n_nodes(), raw))) return raw;
            return repair_mis(g, probs);
        }
        case ProblemKind::MDS:
            return repair_mds(g, raw, probs);
    }
    throw ArgumentError("repair: unknown problem kind");
}

NodeSet local_search_2improve(const CoInstance& instance, const NodeSet& set, int steps,
                              const std::vector<double>& probs) {
    const Graph& g = instance.graph;
    if (!satisfies_constraints(instance.kind, g, to_mask(g.n_nodes(), set)))
        throw ArgumentError("local_search_2improve: infeasible input set");
    switch (instance.kind) {
        case ProblemKind::MaxCut:
            return local_search_maxcut(g, set, steps);
        case ProblemKind::MIS:
            return mis_2improve(g, set, steps);
        case ProblemKind::MDS:
            return mds_improve(g, set, steps, probs);
    }
    throw ArgumentError("local_search_2improve: unknown problem kind");
}

NodeSet local_search_maxcut(const Graph& graph, const NodeSet& side, int steps) {
    std::vector<std::uint8_t> in = to_mask(graph.n_nodes(), side);
    for (int pass = 0; pass < steps; ++pass) {
        bool moved = false;
        for (int v = 0; v < graph.n_nodes(); ++v) {
            int gain = 0;  // cut delta if v switches sides
            for (int u : graph.neighbors(v)) gain += (in[u] == in[v]) ? 1 : -1;
            if (gain > 0) {
                in[v] ^= 1;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return from_mask(in);
}

NodeSet greedy_mis(const Graph& graph) {
    std::vector<int> order(graph.n_nodes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return graph.degree(a) < graph.degree(b); });
    std::vector<std::uint8_t> in(graph.n_nodes(), 0);
    for (int v : order) {
        bool free = true;
        for (int u : graph.neighbors(v))
            if (in[u]) { free = false; break; }
        if (free) in[v] = 1;
    }
    return from_mask(in);
}

NodeSet greedy_mds(const Graph& graph) {
    std::vector<std::uint8_t> in(graph.n_nodes(), 0);
    std::vector<std::uint8_t> covered(graph.n_nodes(), 0);
    int uncovered = graph.n_nodes();
    while (uncovered > 0) {
        int best = -1, best_gain = -1;
        for (int v = 0; v < graph.n_nodes(); ++v) {
            if (in[v]) continue;
            int gain = covered[v] ? 0 : 1;
            for (int u : graph.neighbors(v)) gain += covered[u] ? 0 : 1;
            if (gain > best_gain) {
                best_gain = gain;
                best = v;
            }
        }
        in[best] = 1;
        if (!covered[best]) { covered[best] = 1; --uncovered; }
        for (int u : graph.neighbors(best))
            if (!covered[u]) { covered[u] = 1; --uncovered; }
    }
    return from_mask(in);
}

NodeSet greedy_maxcut(const Graph& graph, Rng& rng, int steps) {
    NodeSet side;
    for (int v = 0; v < graph.n_nodes(); ++v)
        if (rng.next_bool()) side.push_back(v);
    return local_search_maxcut(graph, side, steps);
}

}  // namespace satbridge

#include "satbridge/reduce.hpp"

#include "satbridge/error.hpp"

namespace satbridge {

Formula reduce_to_maxsat(const CoInstance& instance, const ReduceOptions& opts) {
    const Graph& g = instance.graph;
    Formula f;
    f.n_vars = g.n_nodes();
    switch (instance.kind) {
        case ProblemKind::MIS:
            for (auto [u, v] : g.edges())
                f.clauses.push_back(make_clause({neg(u), neg(v)}, /*hard=*/true));
            for (int v = 0; v < g.n_nodes(); ++v)
                f.clauses.push_back(make_clause({pos(v)}, /*hard=*/false));
            break;
        case ProblemKind::MDS:
            if (opts.mds_mode == MdsClauseMode::PerNode) {
                for (int v = 0; v < g.n_nodes(); ++v) {
                    std::vector<Literal> lits{pos(v)};
                    for (int u : g.neighbors(v)) lits.push_back(pos(u));
                    // isolated node: degenerates to the unit clause x_v
                    f.clauses.push_back(make_clause(std::move(lits), /*hard=*/true));
                }
            } else {
                for (auto [u, v] : g.edges())
                    f.clauses.push_back(make_clause({pos(u), pos(v)}, /*hard=*/true));
            }
            for (int v = 0; v < g.n_nodes(); ++v)
                f.clauses.push_back(make_clause({neg(v)}, /*hard=*/false));
            break;
        case ProblemKind::MaxCut:
            for (auto [u, v] : g.edges()) {
                f.clauses.push_back(make_clause({pos(u), pos(v)}, /*hard=*/false));
                f.clauses.push_back(make_clause({neg(u), neg(v)}, /*hard=*/false));
            }
            break;
    }
    return f;
}

BipartiteGraph build_bipartite(const Formula& formula, bool polarity_edges) {
    formula.validate();
    BipartiteGraph b;
    b.n_vars = formula.n_vars;
    b.n_clauses = formula.n_clauses();
    b.var_edges.assign(b.n_vars, {});
    b.clause_edges.assign(b.n_clauses, {});
    for (int c = 0; c < b.n_clauses; ++c) {
        for (const auto& lit : formula.clauses[c].literals) {
            int e = static_cast<int>(b.edges.size());
            b.edges.push_back({lit.var, c, polarity_edges && lit.negated});
            b.var_edges[lit.var].push_back(e);
            b.clause_edges[c].push_back(e);
        }
    }
    return b;
}

SolutionReport recover_solution(const CoInstance& instance, const Assignment& assignment) {
    const Graph& g = instance.graph;
    if (static_cast<int>(assignment.size()) != g.n_nodes())
        throw ArgumentError("assignment length does not match node count");
    SolutionReport r;
    std::vector<std::uint8_t> selected(assignment.begin(), assignment.end());
    for (int v = 0; v < g.n_nodes(); ++v)
        if (selected[v]) r.selected.push_back(v);
    r.objective = objective_value(instance.kind, g, selected);
    r.feasible = satisfies_constraints(instance.kind, g, selected);
    return r;
}

}  // namespace satbridge

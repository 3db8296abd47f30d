#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satbridge/maxsat.hpp"
#include "satbridge/reduce.hpp"

namespace satbridge {

struct OracleResult {
    Assignment assignment;
    std::uint64_t soft_optimum = 0;
    bool proven = false;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 50'000'000;

// Branch and bound over hard-clause unit propagation with the admissible
// bound: satisfied soft weight + weight of soft clauses not yet falsified.
// Ties are broken toward the lexicographically smallest assignment
// (false < true, variable 0 most significant) so labels are reproducible.
// Throws InfeasibleError when the hard clauses are proven unsatisfiable.
OracleResult solve_exact(const Formula& formula, std::uint64_t budget = kDefaultOracleBudget);

struct LabeledInstance {
    Formula formula;
    BipartiteGraph bipartite;
    std::vector<std::uint8_t> labels;  // per variable
    std::string source;                // generator spec or CO origin tag
    bool proven = false;
};

struct LabelStats {
    int labeled = 0;
    int dropped = 0;  // budget exhausted or infeasible
};

// Labels each formula with the oracle optimum; instances the oracle cannot
// prove within the budget are dropped and counted.
std::vector<LabeledInstance> label_dataset(const std::vector<Formula>& formulas,
                                           std::uint64_t budget = kDefaultOracleBudget,
                                           LabelStats* stats = nullptr,
                                           const std::string& source_tag = "",
                                           bool polarity_edges = true);

// Runs an external Max-SAT solver (competition output convention) on a
// temporary WCNF file. The reported optimum is always recomputed locally.
OracleResult external_solve(const Formula& formula, const std::vector<std::string>& solver_command,
                            double timeout_seconds);

}  // namespace satbridge

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace satbridge {

struct Literal {
    int var = 0;
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
};

inline Literal pos(int var) { return {var, false}; }
inline Literal neg(int var) { return {var, true}; }

struct Clause {
    std::vector<Literal> literals;
    bool hard = false;
    std::uint64_t weight = 1;  // soft clauses only; hard weight is implicit

    friend bool operator==(const Clause&, const Clause&) = default;
};

// Validates non-emptiness, duplicate literals, and tautologies.
Clause make_clause(std::vector<Literal> literals, bool hard, std::uint64_t weight = 1);

struct Formula {
    int n_vars = 0;
    std::vector<Clause> clauses;

    int n_clauses() const { return static_cast<int>(clauses.size()); }
    std::uint64_t total_soft_weight() const;
    // Checks literal ranges and per-clause invariants; throws on violation.
    void validate() const;

    friend bool operator==(const Formula&, const Formula&) = default;
};

using Assignment = std::vector<std::uint8_t>;

struct EvalResult {
    int hard_violations = 0;
    std::uint64_t soft_satisfied_weight = 0;

    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

EvalResult evaluate(const Formula& formula, const Assignment& assignment);

// DIMACS WCNF, pre-2022 "p wcnf n m top" dialect. Hard clauses carry
// weight == top == (sum of soft weights) + 1. Byte-deterministic.
std::string emit_wcnf(const Formula& formula);
Formula parse_wcnf(std::istream& in);

}  // namespace satbridge

#include "satbridge/maxsat.hpp"

#include <istream>
#include <sstream>

#include "satbridge/error.hpp"

namespace satbridge {

Clause make_clause(std::vector<Literal> literals, bool hard, std::uint64_t weight) {
    if (literals.empty()) throw ArgumentError("empty clause");
    if (!hard && weight < 1) throw ArgumentError("soft clause weight must be >= 1");
    for (size_t i = 0; i < literals.size(); ++i) {
        for (size_t j = i + 1; j < literals.size(); ++j) {
            if (literals[i].var != literals[j].var) continue;
            if (literals[i].negated == literals[j].negated)
                throw ArgumentError("duplicate literal in clause");
            throw ArgumentError("tautological clause");
        }
    }
    Clause c;
    c.literals = std::move(literals);
    c.hard = hard;
    c.weight = hard ? 1 : weight;  // hard weight is implicit; normalize for equality
    return c;
}

std::uint64_t Formula::total_soft_weight() const {
    std::uint64_t total = 0;
    for (const auto& c : clauses)
        if (!c.hard) total += c.weight;
    return total;
}

void Formula::validate() const {
    if (n_vars < 0) throw ArgumentError("negative variable count");
    for (const auto& c : clauses) {
        make_clause(c.literals, c.hard, c.weight);  // re-run clause checks
        for (const auto& lit : c.literals)
            if (lit.var < 0 || lit.var >= n_vars)
                throw ArgumentError("literal variable out of range");
    }
}

EvalResult evaluate(const Formula& formula, const Assignment& assignment) {
    if (static_cast<int>(assignment.size()) != formula.n_vars)
        throw ArgumentError("assignment length does not match n_vars");
    EvalResult r;
    for (const auto& c : formula.clauses) {
        bool sat = false;
        for (const auto& lit : c.literals) {
            bool value = assignment[lit.var] != 0;
            if (value != lit.negated) { sat = true; break; }
        }
        if (c.hard) {
            if (!sat) ++r.hard_violations;
        } else if (sat) {
            r.soft_satisfied_weight += c.weight;
        }
    }
    return r;
}

std::string emit_wcnf(const Formula& formula) {
    formula.validate();
    const std::uint64_t top = formula.total_soft_weight() + 1;
    std::ostringstream out;
    out << "p wcnf " << formula.n_vars << ' ' << formula.n_clauses() << ' ' << top << '\n';
    for (const auto& c : formula.clauses) {
        out << (c.hard ? top : c.weight);
        for (const auto& lit : c.literals)
            out << ' ' << (lit.negated ? -(lit.var + 1) : (lit.var + 1));
        out << " 0\n";
    }
    return out.str();
}

Formula parse_wcnf(std::istream& in) {
    std::string line;
    int lineno = 0;
    long n = -1, m = -1;
    unsigned long long top = 0;
    Formula f;
    auto fail = [&](const std::string& what) -> void {
        throw ParseError("line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first == "c") continue;
        if (first == "p") {
            if (n >= 0) fail("second header");
            std::string fmt;
            if (!(ss >> fmt >> n >> m >> top) || fmt != "wcnf" || n < 0 || m < 0 || top < 1)
                fail("expected \"p wcnf n m top\"");
            f.n_vars = static_cast<int>(n);
            continue;
        }
        if (n < 0) fail("clause before header");
        unsigned long long weight = 0;
        {
            std::istringstream ws(first);
            if (!(ws >> weight) || weight < 1) fail("expected clause weight");
        }
        if (weight > top) fail("clause weight exceeds top");
        std::vector<Literal> lits;
        long lit = 0;
        bool terminated = false;
        while (ss >> lit) {
            if (lit == 0) { terminated = true; break; }
            long var = (lit > 0 ? lit : -lit) - 1;
            if (var >= n) fail("literal out of range");
            lits.push_back({static_cast<int>(var), lit < 0});
        }
        if (!terminated) fail("clause not terminated by 0");
        std::string extra;
        if (ss >> extra) fail("tokens after clause terminator");
        bool hard = (weight == top);
        f.clauses.push_back(make_clause(std::move(lits), hard, hard ? 1 : weight));
    }
    if (n < 0) throw ParseError("missing \"p wcnf\" header");
    if (f.n_clauses() != m)
        throw ParseError("header declares " + std::to_string(m) + " clauses, file holds " +
                         std::to_string(f.n_clauses()));
    // The top convention requires top == soft sum + 1 for a faithful round
    // trip, but foreign files may use any larger sentinel; accept them.
    f.validate();
    return f;
}

}  // namespace satbridge

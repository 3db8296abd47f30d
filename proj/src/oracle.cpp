#include "satbridge/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "satbridge/error.hpp"

namespace satbridge {

namespace {

class Searcher {
public:
    Searcher(const Formula& f, std::uint64_t budget)
        : f_(f), budget_(budget), val_(f.n_vars, -1), total_soft_(f.total_soft_weight()) {}

    void run() { dfs(); }

    bool found() const { return found_; }
    bool exhausted() const { return exhausted_; }
    const Assignment& best() const { return best_; }
    std::uint64_t best_soft() const { return best_soft_; }

private:
    // Assigns hard-clause-forced literals until fixpoint. Returns false on a
    // hard conflict. Forced variables are appended to `trail`.
    bool propagate(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : f_.clauses) {
                if (!c.hard) continue;
                int unassigned = -1;
                int n_unassigned = 0;
                bool sat = false;
                for (const auto& lit : c.literals) {
                    int v = val_[lit.var];
                    if (v < 0) {
                        ++n_unassigned;
                        unassigned = static_cast<int>(&lit - c.literals.data());
                    } else if ((v != 0) != lit.negated) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (n_unassigned == 0) return false;
                if (n_unassigned == 1) {
                    const Literal& lit = c.literals[unassigned];
                    val_[lit.var] = lit.negated ? 0 : 1;
                    trail.push_back(lit.var);
                    changed = true;
                }
            }
        }
        return true;
    }

    std::uint64_t falsified_soft() const {
        std::uint64_t w = 0;
        for (const auto& c : f_.clauses) {
            if (c.hard) continue;
            bool open = false;
            for (const auto& lit : c.literals) {
                int v = val_[lit.var];
                if (v < 0 || (v != 0) != lit.negated) { open = true; break; }
            }
            if (!open) w += c.weight;
        }
        return w;
    }

    void dfs() {
        if (exhausted_) return;
        std::vector<int> trail;
        if (!propagate(trail)) {
            for (int v : trail) val_[v] = -1;
            return;
        }
        std::uint64_t bound = total_soft_ - falsified_soft();
        if (!(found_ && bound <= best_soft_)) {
            int branch_var = -1;
            for (int v = 0; v < f_.n_vars; ++v)
                if (val_[v] < 0) { branch_var = v; break; }
            if (branch_var < 0) {
                // leaf: hard clauses all satisfied (propagation would have
                // conflicted otherwise); bound is the exact soft weight here
                if (!found_ || bound > best_soft_) {
                    found_ = true;
                    best_soft_ = bound;
                    best_.assign(val_.begin(), val_.end());
                }
            } else if (++expanded_ > budget_) {
                exhausted_ = true;
            } else {
                val_[branch_var] = 0;  // false first: lexicographic tie-break
                dfs();
                val_[branch_var] = 1;
                dfs();
                val_[branch_var] = -1;
            }
        }
        for (int v : trail) val_[v] = -1;
    }

    const Formula& f_;
    std::uint64_t budget_;
    std::uint64_t expanded_ = 0;
    bool exhausted_ = false;
    std::vector<std::int8_t> val_;
    std::uint64_t total_soft_;
    Assignment best_;
    std::uint64_t best_soft_ = 0;
    bool found_ = false;
};

}  // namespace

OracleResult solve_exact(const Formula& formula, std::uint64_t budget) {
    formula.validate();
    Searcher s(formula, budget);
    s.run();
    if (!s.found()) {
        if (!s.exhausted()) throw InfeasibleError("hard clauses are unsatisfiable");
        OracleResult r;
        r.assignment.assign(formula.n_vars, 0);
        r.soft_optimum = evaluate(formula, r.assignment).soft_satisfied_weight;
        r.proven = false;
        return r;
    }
    OracleResult r;
    r.assignment = s.best();
    r.soft_optimum = s.best_soft();
    r.proven = !s.exhausted();
    return r;
}

std::vector<LabeledInstance> label_dataset(const std::vector<Formula>& formulas,
                                           std::uint64_t budget, LabelStats* stats,
                                           const std::string& source_tag, bool polarity_edges) {
    std::vector<LabeledInstance> out;
    out.reserve(formulas.size());
    for (const auto& f : formulas) {
        OracleResult res;
        try {
            res = solve_exact(f, budget);
        } catch (const InfeasibleError&) {
            if (stats) ++stats->dropped;
            continue;
        }
        if (!res.proven) {
            if (stats) ++stats->dropped;
            continue;
        }
        LabeledInstance inst;
        inst.formula = f;
        inst.bipartite = build_bipartite(f, polarity_edges);
        inst.labels = res.assignment;
        inst.source = source_tag;
        inst.proven = true;
        out.push_back(std::move(inst));
        if (stats) ++stats->labeled;
    }
    return out;
}

namespace {

struct ChildOutput {
    std::string stdout_text;
    int exit_status = -1;
    bool timed_out = false;
};

ChildOutput run_with_timeout(const std::vector<std::string>& argv_str, double timeout_seconds) {
    int pipefd[2];
    if (pipe(pipefd) != 0) throw ExternalSolverError("pipe() failed");
    pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw ExternalSolverError("fork() failed");
    }
    if (pid == 0) {
        dup2(pipefd[1], STDOUT_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        std::vector<char*> argv;
        for (const auto& s : argv_str) argv.push_back(const_cast<char*>(s.c_str()));
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
        _exit(127);
    }
    close(pipefd[1]);
    ChildOutput out;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_seconds));
    char buf[4096];
    bool open = true;
    while (open) {
        int wait_ms = -1;
        if (timeout_seconds > 0) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
            if (left <= 0) {
                out.timed_out = true;
                kill(pid, SIGKILL);
                break;
            }
            wait_ms = static_cast<int>(left);
        }
        struct pollfd pfd{pipefd[0], POLLIN, 0};
        int pr = poll(&pfd, 1, wait_ms);
        if (pr == 0) continue;  // re-check deadline
        if (pr < 0) {
            if (errno == EINTR) continue;
            break;
        }
        ssize_t n = read(pipefd[0], buf, sizeof(buf));
        if (n > 0)
            out.stdout_text.append(buf, static_cast<size_t>(n));
        else
            open = false;
    }
    close(pipefd[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    out.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

}  // namespace

OracleResult external_solve(const Formula& formula, const std::vector<std::string>& solver_command,
                            double timeout_seconds) {
    if (solver_command.empty()) throw ArgumentError("empty solver command");
    formula.validate();

    char path[] = "/tmp/satbridge_wcnf_XXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) throw ExternalSolverError("mkstemp failed");
    {
        std::string text = emit_wcnf(formula);
        ssize_t w = write(fd, text.data(), text.size());
        close(fd);
        if (w != static_cast<ssize_t>(text.size())) {
            unlink(path);
            throw ExternalSolverError("failed to write temporary WCNF");
        }
    }
    std::vector<std::string> argv = solver_command;
    argv.push_back(path);
    ChildOutput child = run_with_timeout(argv, timeout_seconds);
    unlink(path);

    auto fail = [&](const std::string& what) -> void {
        std::string log = child.stdout_text.substr(0, 2000);
        throw ExternalSolverError(what + "; captured output:\n" + log);
    };
    if (child.timed_out) fail("timeout after " + std::to_string(timeout_seconds) + "s");

    std::string status;
    std::string value_tokens;
    std::istringstream lines(child.stdout_text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("s ", 0) == 0) status = line.substr(2);
        if (line.rfind("v ", 0) == 0) value_tokens += " " + line.substr(2);
    }
    if (status.rfind("UNSATISFIABLE", 0) == 0)
        throw InfeasibleError("external solver reports unsatisfiable hard clauses");
    if (value_tokens.empty()) fail("no \"v\" line in solver output");

    Assignment assignment(formula.n_vars, 0);
    std::istringstream ts(value_tokens);
    std::string tok;
    std::vector<std::string> toks;
    while (ts >> tok) toks.push_back(tok);
    // Dialect detection: one token of 0/1 digits of length n_vars is the
    // bitstring form; anything else is signed literals.
    if (toks.size() == 1 && toks[0].find_first_not_of("01") == std::string::npos &&
        static_cast<int>(toks[0].size()) == formula.n_vars) {
        for (int i = 0; i < formula.n_vars; ++i) assignment[i] = toks[0][i] == '1';
    } else {
        for (const auto& t : toks) {
            long lit = 0;
            try {
                lit = std::stol(t);
            } catch (...) {
                fail("unparsable token in \"v\" line: " + t);
            }
            if (lit == 0) continue;  // tolerated terminator
            long var = (lit > 0 ? lit : -lit) - 1;
            if (var >= formula.n_vars) fail("literal out of range in \"v\" line");
            assignment[var] = lit > 0;
        }
    }

    EvalResult local = evaluate(formula, assignment);
    if (local.hard_violations > 0) fail("solver assignment violates hard clauses");
    OracleResult r;
    r.assignment = std::move(assignment);
    r.soft_optimum = local.soft_satisfied_weight;
    r.proven = status.rfind("OPTIMUM", 0) == 0;
    return r;
}

}  // namespace satbridge

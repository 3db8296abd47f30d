#include "satbridge/graph.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>

#include "satbridge/error.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

Graph Graph::from_edges(int n_nodes, std::vector<std::pair<int, int>> edges) {
    if (n_nodes < 0) throw ArgumentError("negative node count");
    std::set<std::pair<int, int>> seen;
    for (auto& [u, v] : edges) {
        if (u < 0 || u >= n_nodes || v < 0 || v >= n_nodes)
            throw ArgumentError("edge endpoint out of range");
        if (u == v) throw ArgumentError("self-loop on node " + std::to_string(u));
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second)
            throw ArgumentError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    Graph g;
    g.n_nodes_ = n_nodes;
    g.edges_ = std::move(edges);
    g.adj_.assign(n_nodes, {});
    for (auto [u, v] : g.edges_) {
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= n_nodes_ || v < 0 || v >= n_nodes_) return false;
    const auto& nbrs = adj_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

const char* to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::MaxCut: return "maxcut";
        case ProblemKind::MIS: return "mis";
        case ProblemKind::MDS: return "mds";
    }
    return "?";
}

ProblemKind problem_kind_from_string(const std::string& name) {
    if (name == "maxcut") return ProblemKind::MaxCut;
    if (name == "mis") return ProblemKind::MIS;
    if (name == "mds") return ProblemKind::MDS;
    throw ArgumentError("unknown problem kind: " + name);
}

bool is_maximization(ProblemKind kind) { return kind != ProblemKind::MDS; }

bool satisfies_constraints(ProblemKind kind, const Graph& g, const std::vector<std::uint8_t>& selected) {
    if (static_cast<int>(selected.size()) != g.n_nodes())
        throw ArgumentError("selection length does not match node count");
    switch (kind) {
        case ProblemKind::MaxCut:
            return true;
        case ProblemKind::MIS:
            for (auto [u, v] : g.edges())
                if (selected[u] && selected[v]) return false;
            return true;
        case ProblemKind::MDS:
            for (int v = 0; v < g.n_nodes(); ++v) {
                if (selected[v]) continue;
                bool dominated = false;
                for (int u : g.neighbors(v))
                    if (selected[u]) { dominated = true; break; }
                if (!dominated) return false;
            }
            return true;
    }
    return false;
}

long objective_value(ProblemKind kind, const Graph& g, const std::vector<std::uint8_t>& selected) {
    if (static_cast<int>(selected.size()) != g.n_nodes())
        throw ArgumentError("selection length does not match node count");
    if (kind == ProblemKind::MaxCut) {
        long cut = 0;
        for (auto [u, v] : g.edges())
            if (selected[u] != selected[v]) ++cut;
        return cut;
    }
    long size = 0;
    for (auto s : selected) size += s ? 1 : 0;
    return size;
}

namespace {

// Reads the next non-blank line; returns false at EOF.
bool next_content_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

[[noreturn]] void fail_at(int lineno, const std::string& what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

Graph parse_gset(std::istream& in, ParseStats* stats) {
    std::string line;
    int lineno = 0;
    if (!next_content_line(in, line, lineno)) throw ParseError("empty input");
    long n = 0, m = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n >> m) || n < 0 || m < 0) fail_at(lineno, "expected header \"n m\"");
        std::string extra;
        if (ss >> extra) fail_at(lineno, "trailing tokens after header");
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<size_t>(m));
    std::set<std::pair<int, int>> seen;
    while (next_content_line(in, line, lineno)) {
        std::istringstream ss(line);
        long u = 0, v = 0, w = 1;
        if (!(ss >> u >> v)) fail_at(lineno, "expected \"u v [w]\"");
        if (!(ss >> w)) w = 1;
        if (u < 1 || u > n || v < 1 || v > n) fail_at(lineno, "node index out of range");
        if (u == v) fail_at(lineno, "self-loop");
        if (w != 1 && stats) ++stats->nonunit_weights;
        int a = static_cast<int>(u - 1), b = static_cast<int>(v - 1);
        if (a > b) std::swap(a, b);
        if (!seen.insert({a, b}).second) fail_at(lineno, "duplicate edge");
        edges.emplace_back(a, b);
    }
    if (static_cast<long>(edges.size()) != m)
        throw ParseError("header declares " + std::to_string(m) + " edges, file holds " +
                         std::to_string(edges.size()));
    return Graph::from_edges(static_cast<int>(n), std::move(edges));
}

Graph parse_dimacs(std::istream& in, ParseStats* stats) {
    std::string line;
    int lineno = 0;
    long n = -1, m = -1;
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            if (n >= 0) fail_at(lineno, "second \"p\" line");
            std::string fmt;
            if (!(ss >> fmt >> n >> m) || n < 0 || m < 0) fail_at(lineno, "expected \"p edge n m\"");
            std::string extra;
            if (ss >> extra) fail_at(lineno, "trailing tokens on \"p\" line");
            continue;
        }
        if (tag == "e") {
            if (n < 0) fail_at(lineno, "edge line before \"p\" line");
            long u = 0, v = 0;
            if (!(ss >> u >> v)) fail_at(lineno, "expected \"e u v\"");
            std::string extra;
            if (ss >> extra) fail_at(lineno, "token count mismatch on edge line");
            if (u < 1 || u > n || v < 1 || v > n) fail_at(lineno, "node index out of range");
            if (u == v) fail_at(lineno, "self-loop");
            int a = static_cast<int>(u - 1), b = static_cast<int>(v - 1);
            if (a > b) std::swap(a, b);
            if (!seen.insert({a, b}).second) {
                if (stats) ++stats->duplicate_edges;
                continue;
            }
            edges.emplace_back(a, b);
            continue;
        }
        fail_at(lineno, "unknown line tag \"" + tag + "\"");
    }
    if (n < 0) throw ParseError("missing \"p\" line");
    return Graph::from_edges(static_cast<int>(n), std::move(edges));
}

Graph gen_random_regular(int n, int gamma, std::uint64_t seed) {
    if (n <= 0 || gamma <= 0) throw ArgumentError("n and gamma must be positive");
    if (gamma >= n) throw ArgumentError("gamma must be smaller than n");
    if ((static_cast<long>(n) * gamma) % 2 != 0) throw ArgumentError("n*gamma must be even");

    const int n_stubs = n * gamma;
    std::vector<int> stubs(n_stubs);
    for (int i = 0; i < n_stubs; ++i) stubs[i] = i / gamma;

    Rng rng(seed);
    const int kMaxRestarts = 20000;
    for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
        // Fisher-Yates over the stub array, then pair consecutive stubs.
        for (int i = n_stubs - 1; i > 0; --i) {
            int j = rng.next_int(i + 1);
            std::swap(stubs[i], stubs[j]);
        }
        std::set<std::pair<int, int>> seen;
        std::vector<std::pair<int, int>> edges;
        edges.reserve(n_stubs / 2);
        bool ok = true;
        for (int i = 0; i < n_stubs; i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) { ok = false; break; }
            if (u > v) std::swap(u, v);
            if (!seen.insert({u, v}).second) { ok = false; break; }
            edges.emplace_back(u, v);
        }
        if (ok) return Graph::from_edges(n, std::move(edges));
    }
    throw GenerationError("regular graph restart budget exhausted (n=" + std::to_string(n) +
                          ", gamma=" + std::to_string(gamma) + ")");
}

}  // namespace satbridge

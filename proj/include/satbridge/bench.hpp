#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "satbridge/graph.hpp"

namespace satbridge {

// Eq-style normalized cut quality for gamma-regular graphs:
// (z/n - gamma/4) / sqrt(gamma/4).
double p_value(long z, int n, int gamma);
long p_inverse(double p, int n, int gamma);  // rounds to the nearest cut size

// ---- dataset management ----

struct DatasetEntry {
    std::string name;     // file name under the data directory
    std::string url;
    std::string sha256;   // lowercase hex; empty = cannot be verified
    std::string format;   // "gset" or "dimacs"
};

// Bundled benchmark file list (GSET subset + frb30-15-1). Upstream never
// published digests; entries ship with empty checksums until recorded, so
// fetching them requires a manifest file that fills the sha256 fields.
std::vector<DatasetEntry> builtin_manifest();

// JSON array of {name, url, sha256, format}.
std::vector<DatasetEntry> parse_manifest(const nlohmann::json& j);

// Resolution order: explicit argument, $SATBRIDGE_DATA_DIR, "./data".
std::string dataset_dir(const std::string& override_dir = "");

struct FetchItem {
    std::string name;
    std::string status;  // "verified" | "downloaded" | "quarantined" | "missing" | "error"
    std::string detail;
};

struct FetchReport {
    std::vector<FetchItem> items;
    int downloaded = 0;
    int verified = 0;
    int failed = 0;
};

std::string sha256_file(const std::string& path);

// Downloads manifest entries into `dest`, verifying checksums. Files already
// present and verified are never re-downloaded; mismatching downloads are
// moved aside to <name>.quarantine. In offline mode nothing is downloaded
// and an IoError lists every missing file. Each download is retried up to
// `retries` extra times.
FetchReport fetch_datasets(const std::vector<DatasetEntry>& manifest, const std::string& dest,
                           bool offline = false, int retries = 2);

// ---- benchmark orchestration ----

struct BenchConfig {
    ProblemKind kind = ProblemKind::MaxCut;
    std::string source = "regular";  // "regular" or a graph file path
    std::string graph_format = "gset";  // file sources only
    int n = 100;
    int gamma = 3;
    int count = 20;
    std::uint64_t seed = 0;
    std::string checkpoint;  // empty = greedy baseline mode
    int local_search_steps = 120;
    bool maxcut_flip = true;  // 1-flip search after thresholding (MaxCut)
    int threads = 1;
    bool record_timing = false;  // off keeps reports byte-identical

    void validate() const;
};

BenchConfig bench_config_from_json(const nlohmann::json& j);

struct BenchRecord {
    std::string name;
    ProblemKind kind = ProblemKind::MaxCut;
    int n_nodes = 0;
    int n_edges = 0;
    long objective = 0;
    bool has_p = false;
    double p = 0;
    double wall_ms = 0;
    std::uint64_t seed = 0;
};

struct BenchReport {
    BenchConfig config;
    std::string mode;  // "checkpoint" or "greedy"
    std::vector<BenchRecord> records;
    double mean_objective = 0;
    double median_objective = 0;
    double mean_p = 0;    // MaxCut on regular graphs only
    double median_p = 0;

    std::string to_jsonl() const;  // versioned header line + one line per record + aggregate
    std::string render_table() const;
};

// predict -> decode -> re-verify per instance; any record that fails
// independent re-verification aborts the run. Deterministic for a fixed
// config and seed regardless of thread count.
BenchReport run_benchmark(const BenchConfig& cfg);

}  // namespace satbridge

#include "satbridge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "satbridge/decode.hpp"
#include "satbridge/error.hpp"
#include "satbridge/pipeline.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double p_value(long z, int n, int gamma) {
    if (n <= 0 || gamma <= 0) throw ArgumentError("p_value: n and gamma must be positive");
    double q = gamma / 4.0;
    return (static_cast<double>(z) / n - q) / std::sqrt(q);
}

long p_inverse(double p, int n, int gamma) {
    double q = gamma / 4.0;
    return std::lround(n * (p * std::sqrt(q) + q));
}

std::vector<DatasetEntry> builtin_manifest() {
    return {
        {"G14", "https://web.stanford.edu/~yyye/yyye/Gset/G14", "", "gset"},
        {"G15", "https://web.stanford.edu/~yyye/yyye/Gset/G15", "", "gset"},
        {"G22", "https://web.stanford.edu/~yyye/yyye/Gset/G22", "", "gset"},
        {"G55", "https://web.stanford.edu/~yyye/yyye/Gset/G55", "", "gset"},
        {"frb30-15-1.mis",
         "https://unsat.github.io/npbench/data/frb30-15-mis/frb30-15-1.mis", "", "dimacs"},
    };
}

std::vector<DatasetEntry> parse_manifest(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("manifest must be a JSON array");
    std::vector<DatasetEntry> out;
    for (const auto& e : j) {
        DatasetEntry d;
        d.name = e.at("name").get<std::string>();
        d.url = e.at("url").get<std::string>();
        if (e.contains("sha256")) d.sha256 = e.at("sha256").get<std::string>();
        if (e.contains("format")) d.format = e.at("format").get<std::string>();
        if (d.name.empty() || d.name.find('/') != std::string::npos)
            throw ParseError("manifest entry has invalid name: " + d.name);
        out.push_back(std::move(d));
    }
    return out;
}

std::string dataset_dir(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("SATBRIDGE_DATA_DIR"); env && *env) return env;
    return "data";
}

std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for hashing: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(f.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

bool curl_download(const std::string& url, const std::string& dest) {
    std::string cmd = "curl -fsSL --connect-timeout 20 --max-time 300 -o '" + dest + "' '" +
                      url + "' >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

}  // namespace

FetchReport fetch_datasets(const std::vector<DatasetEntry>& manifest, const std::string& dest,
                           bool offline, int retries) {
    FetchReport report;
    fs::create_directories(dest);
    std::vector<std::string> missing;
    for (const auto& entry : manifest) {
        fs::path path = fs::path(dest) / entry.name;
        FetchItem item{entry.name, "", ""};
        if (fs::exists(path) &&
            (entry.sha256.empty() || sha256_file(path.string()) == entry.sha256)) {
            item.status = "verified";
            ++report.verified;
            report.items.push_back(item);
            continue;
        }
        if (offline) {
            item.status = "missing";
            ++report.failed;
            missing.push_back(entry.name);
            report.items.push_back(item);
            continue;
        }
        if (entry.sha256.empty()) {
            item.status = "error";
            item.detail = "manifest entry has no checksum; refusing unverifiable download";
            ++report.failed;
            report.items.push_back(item);
            continue;
        }
        bool ok = false;
        for (int attempt = 0; attempt <= retries && !ok; ++attempt) {
            fs::path tmp = path;
            tmp += ".part";
            if (!curl_download(entry.url, tmp.string())) {
                std::error_code ec;
                fs::remove(tmp, ec);
                item.detail = "download failed";
                continue;
            }
            if (sha256_file(tmp.string()) != entry.sha256) {
                fs::path quarantine = path;
                quarantine += ".quarantine";
                fs::rename(tmp, quarantine);
                item.status = "quarantined";
                item.detail = "checksum mismatch, kept at " + quarantine.string();
                break;
            }
            fs::rename(tmp, path);
            ok = true;
        }
        if (ok) {
            item.status = "downloaded";
            ++report.downloaded;
        } else {
            if (item.status.empty()) item.status = "error";
            ++report.failed;
        }
        report.items.push_back(item);
    }
    if (offline && !missing.empty()) {
        std::string list;
        for (const auto& name : missing) list += (list.empty() ? "" : ", ") + name;
        throw IoError("offline: missing dataset files: " + list);
    }
    return report;
}

void BenchConfig::validate() const {
    if (count <= 0) throw ConfigError("bench: count must be positive");
    if (threads <= 0) throw ConfigError("bench: threads must be positive");
    if (local_search_steps < 0) throw ConfigError("bench: local_search_steps must be >= 0");
    if (source == "regular") {
        if (n <= 0 || gamma <= 0) throw ConfigError("bench: n and gamma must be positive");
    } else if (graph_format != "gset" && graph_format != "dimacs") {
        throw ConfigError("bench: graph_format must be gset or dimacs");
    }
}

BenchConfig bench_config_from_json(const nlohmann::json& j) {
    BenchConfig cfg;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("kind")) cfg.kind = problem_kind_from_string(j.at("kind").get<std::string>());
    get("source", cfg.source);
    get("graph_format", cfg.graph_format);
    get("n", cfg.n);
    get("gamma", cfg.gamma);
    get("count", cfg.count);
    get("seed", cfg.seed);
    get("checkpoint", cfg.checkpoint);
    get("local_search_steps", cfg.local_search_steps);
    get("maxcut_flip", cfg.maxcut_flip);
    get("threads", cfg.threads);
    get("record_timing", cfg.record_timing);
    cfg.validate();
    return cfg;
}

namespace {

std::vector<std::uint8_t> set_to_mask(int n, const NodeSet& set) {
    std::vector<std::uint8_t> mask(n, 0);
    for (int v : set) mask[v] = 1;
    return mask;
}

CoInstance make_instance(const BenchConfig& cfg, int index) {
    CoInstance inst;
    inst.kind = cfg.kind;
    if (cfg.source == "regular") {
        inst.graph = gen_random_regular(cfg.n, cfg.gamma, split_seed(cfg.seed, index));
        char name[64];
        std::snprintf(name, sizeof(name), "regular_n%d_g%d_%03d", cfg.n, cfg.gamma, index);
        inst.name = name;
    } else {
        std::ifstream f(cfg.source);
        if (!f) throw IoError("cannot open graph file: " + cfg.source);
        inst.graph = cfg.graph_format == "gset" ? parse_gset(f) : parse_dimacs(f);
        inst.name = fs::path(cfg.source).filename().string();
    }
    return inst;
}

BenchRecord solve_one(const BenchConfig& cfg, const Checkpoint* ckpt, int index) {
    auto t0 = std::chrono::steady_clock::now();
    CoInstance inst = make_instance(cfg, index);
    const Graph& g = inst.graph;
    NodeSet set;
    if (ckpt) {
        std::vector<double> probs = predict(*ckpt, inst);
        set = threshold_decode(probs, inst);
        if (inst.kind == ProblemKind::MaxCut) {
            if (cfg.maxcut_flip) set = local_search_maxcut(g, set, cfg.local_search_steps);
        } else {
            set = repair(inst, set, probs);
            set = local_search_2improve(inst, set, cfg.local_search_steps, probs);
        }
    } else {
        switch (inst.kind) {
            case ProblemKind::MaxCut: {
                Rng rng(split_seed(cfg.seed, 0x9000 + index));
                set = greedy_maxcut(g, rng, cfg.local_search_steps);
                break;
            }
            case ProblemKind::MIS:
                set = local_search_2improve(inst, greedy_mis(g), cfg.local_search_steps);
                break;
            case ProblemKind::MDS:
                set = local_search_2improve(inst, greedy_mds(g), cfg.local_search_steps);
                break;
        }
    }

    // Independent re-verification: the reported objective is recomputed from
    // the recovered assignment, never taken from the decoder.
    Assignment assignment = set_to_mask(g.n_nodes(), set);
    SolutionReport verified = recover_solution(inst, assignment);
    if (!verified.feasible)
        throw NumericError("benchmark: instance " + inst.name + " failed re-verification");
    if (verified.objective != objective_value(inst.kind, g, assignment))
        throw NumericError("benchmark: objective mismatch on " + inst.name);

    BenchRecord rec;
    rec.name = inst.name;
    rec.kind = inst.kind;
    rec.n_nodes = g.n_nodes();
    rec.n_edges = g.n_edges();
    rec.objective = verified.objective;
    rec.seed = split_seed(cfg.seed, index);
    if (inst.kind == ProblemKind::MaxCut && cfg.source == "regular") {
        rec.has_p = true;
        rec.p = p_value(rec.objective, cfg.n, cfg.gamma);
    }
    if (cfg.record_timing) {
        auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return rec;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0;
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    Checkpoint ckpt;
    bool have_ckpt = !cfg.checkpoint.empty();
    if (have_ckpt) ckpt = load_checkpoint(cfg.checkpoint);

    int count = cfg.source == "regular" ? cfg.count : 1;
    BenchReport report;
    report.config = cfg;
    report.mode = have_ckpt ? "checkpoint" : "greedy";
    report.records.resize(count);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                report.records[i] = solve_one(cfg, have_ckpt ? &ckpt : nullptr, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    int n_threads = std::min(cfg.threads, count);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> objs, ps;
    for (const auto& r : report.records) {
        objs.push_back(static_cast<double>(r.objective));
        if (r.has_p) ps.push_back(r.p);
    }
    report.mean_objective = mean_of(objs);
    report.median_objective = median_of(objs);
    report.mean_p = mean_of(ps);
    report.median_p = median_of(ps);
    return report;
}

std::string BenchReport::to_jsonl() const {
    std::string out;
    json header;
    header["schema"] = "satbridge-bench";
    header["version"] = 1;
    header["mode"] = mode;
    header["kind"] = to_string(config.kind);
    header["source"] = config.source;
    header["count"] = static_cast<int>(records.size());
    header["seed"] = config.seed;
    out += header.dump() + "\n";
    for (const auto& r : records) {
        json j;
        j["name"] = r.name;
        j["kind"] = to_string(r.kind);
        j["n"] = r.n_nodes;
        j["m"] = r.n_edges;
        j["objective"] = r.objective;
        if (r.has_p) j["p"] = r.p;
        if (config.record_timing) j["wall_ms"] = r.wall_ms;
        j["seed"] = r.seed;
        out += j.dump() + "\n";
    }
    json agg;
    agg["aggregate"] = true;
    agg["mean_objective"] = mean_objective;
    agg["median_objective"] = median_objective;
    if (!records.empty() && records.front().has_p) {
        agg["mean_p"] = mean_p;
        agg["median_p"] = median_p;
    }
    out += agg.dump() + "\n";
    return out;
}

std::string BenchReport::render_table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-24s %6s %8s %10s %10s\n", "instance", "n", "m",
                  "objective", "p");
    out << line;
    for (const auto& r : records) {
        if (r.has_p)
            std::snprintf(line, sizeof(line), "%-24s %6d %8d %10ld %10.4f\n", r.name.c_str(),
                          r.n_nodes, r.n_edges, r.objective, r.p);
        else
            std::snprintf(line, sizeof(line), "%-24s %6d %8d %10ld %10s\n", r.name.c_str(),
                          r.n_nodes, r.n_edges, r.objective, "-");
        out << line;
    }
    std::snprintf(line, sizeof(line), "mean objective %.4f | median %.4f", mean_objective,
                  median_objective);
    out << line;
    if (!records.empty() && records.front().has_p) {
        std::snprintf(line, sizeof(line), " | mean p %.4f | median p %.4f", mean_p, median_p);
        out << line;
    }
    out << '\n';
    return out.str();
}

}  // namespace satbridge

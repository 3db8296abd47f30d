#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "satbridge/bench.hpp"
#include "satbridge/error.hpp"

using namespace satbridge;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

DatasetEntry local_entry(const fs::path& dir, const std::string& name,
                         const std::string& content) {
    fs::path src = dir / (name + ".src");
    std::ofstream(src) << content;
    DatasetEntry e;
    e.name = name;
    e.url = "file://" + src.string();
    e.sha256 = sha256_file(src.string());
    e.format = "gset";
    return e;
}

}  // namespace

TEST_CASE("p_value and p_inverse") {
    CHECK(p_value(75, 100, 3) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p_value(136, 100, 3) == doctest::Approx(0.70436).epsilon(1e-4));
    CHECK_THROWS_AS(p_value(1, 0, 3), ArgumentError);
    for (long z : {60L, 75L, 100L, 136L, 150L})
        CHECK(p_inverse(p_value(z, 100, 3), 100, 3) == z);
}

TEST_CASE("manifest parsing") {
    nlohmann::json j = nlohmann::json::array(
        {{{"name", "a"}, {"url", "u"}, {"sha256", "ab"}, {"format", "gset"}},
         {{"name", "b"}, {"url", "v"}}});
    auto m = parse_manifest(j);
    REQUIRE(m.size() == 2);
    CHECK(m[0].sha256 == "ab");
    CHECK(m[1].sha256.empty());
    CHECK_THROWS_AS(parse_manifest(nlohmann::json::object()), ParseError);
    nlohmann::json bad = nlohmann::json::array({{{"name", "../evil"}, {"url", "u"}}});
    CHECK_THROWS_AS(parse_manifest(bad), ParseError);

    CHECK(builtin_manifest().size() == 5);
    for (const auto& e : builtin_manifest()) CHECK(e.sha256.empty());
}

TEST_CASE("fetch_datasets on local files") {
    fs::path srcdir = fresh_dir("sb_fetch_src");
    fs::path dest = fresh_dir("sb_fetch_dest");
    std::vector<DatasetEntry> manifest = {
        local_entry(srcdir, "tiny_a", "2 1\n1 2 1\n"),
        local_entry(srcdir, "tiny_b", "3 2\n1 2\n2 3\n"),
    };

    SUBCASE("download then idempotent re-fetch") {
        FetchReport r1 = fetch_datasets(manifest, dest.string());
        CHECK(r1.downloaded == 2);
        CHECK(r1.failed == 0);
        CHECK(fs::exists(dest / "tiny_a"));
        CHECK(sha256_file((dest / "tiny_a").string()) == manifest[0].sha256);

        FetchReport r2 = fetch_datasets(manifest, dest.string());
        CHECK(r2.downloaded == 0);
        CHECK(r2.verified == 2);
    }
    SUBCASE("checksum mismatch quarantines the download") {
        manifest[0].sha256.assign(64, '0');
        FetchReport r = fetch_datasets(manifest, dest.string());
        CHECK(r.failed == 1);
        CHECK(r.downloaded == 1);
        REQUIRE(r.items.size() == 2);
        CHECK(r.items[0].status == "quarantined");
        CHECK(!fs::exists(dest / "tiny_a"));
        CHECK(fs::exists(dest / "tiny_a.quarantine"));
    }
    SUBCASE("offline mode lists missing files") {
        fetch_datasets({manifest[0]}, dest.string());
        try {
            fetch_datasets(manifest, dest.string(), /*offline=*/true);
            FAIL("expected IoError");
        } catch (const IoError& e) {
            std::string msg = e.what();
            CHECK(msg.find("tiny_b") != std::string::npos);
            CHECK(msg.find("tiny_a") == std::string::npos);
        }
    }
    SUBCASE("entries without checksums are refused") {
        manifest[1].sha256.clear();
        FetchReport r = fetch_datasets(manifest, dest.string());
        CHECK(r.failed == 1);
        CHECK(r.items[1].status == "error");
        CHECK(r.items[1].detail.find("refusing") != std::string::npos);
        CHECK(!fs::exists(dest / "tiny_b"));
        // but an already-present file with an empty checksum counts as verified
        std::ofstream(dest / "tiny_b") << "anything";
        FetchReport r2 = fetch_datasets(manifest, dest.string());
        CHECK(r2.failed == 0);
        CHECK(r2.items[1].status == "verified");
    }
}

TEST_CASE("dataset_dir resolution") {
    CHECK(dataset_dir("/tmp/explicit") == "/tmp/explicit");
    setenv("SATBRIDGE_DATA_DIR", "/tmp/from_env", 1);
    CHECK(dataset_dir() == "/tmp/from_env");
    unsetenv("SATBRIDGE_DATA_DIR");
    CHECK(dataset_dir() == "data");
}

TEST_CASE("greedy benchmark on random regular graphs") {
    BenchConfig cfg;
    cfg.kind = ProblemKind::MaxCut;
    cfg.n = 40;
    cfg.gamma = 3;
    cfg.count = 12;
    cfg.seed = 5;

    BenchReport report = run_benchmark(cfg);
    CHECK(report.mode == "greedy");
    REQUIRE(report.records.size() == 12);
    for (const auto& r : report.records) {
        CHECK(r.n_nodes == 40);
        CHECK(r.n_edges == 60);
        CHECK(r.has_p);
        CHECK(std::isfinite(r.p));
        CHECK(p_inverse(r.p, 40, 3) == r.objective);
    }
    CHECK(report.mean_p > 0);  // 1-flip local optima beat the random-split baseline

    SUBCASE("reports are byte-identical across runs and thread counts") {
        std::string once = report.to_jsonl();
        CHECK(run_benchmark(cfg).to_jsonl() == once);
        BenchConfig mt = cfg;
        mt.threads = 4;
        CHECK(run_benchmark(mt).to_jsonl() == once);
        CHECK(once.find("\"schema\":\"satbridge-bench\"") != std::string::npos);
        CHECK(once.find("wall_ms") == std::string::npos);
    }
    SUBCASE("render_table mentions every instance") {
        std::string table = report.render_table();
        for (const auto& r : report.records) CHECK(table.find(r.name) != std::string::npos);
        CHECK(table.find("mean objective") != std::string::npos);
    }
}

TEST_CASE("benchmark on MIS and MDS stays feasible via re-verification") {
    for (auto kind : {ProblemKind::MIS, ProblemKind::MDS}) {
        BenchConfig cfg;
        cfg.kind = kind;
        cfg.n = 30;
        cfg.gamma = 3;
        cfg.count = 6;
        cfg.seed = 9;
        BenchReport report = run_benchmark(cfg);  // throws if any record is infeasible
        REQUIRE(report.records.size() == 6);
        for (const auto& r : report.records) {
            CHECK(!r.has_p);
            CHECK(r.objective > 0);
            CHECK(r.objective <= 30);
        }
    }
}

TEST_CASE("file-source benchmark reads the graph once") {
    fs::path dir = fresh_dir("sb_bench_file");
    fs::path gfile = dir / "toy.gset";
    std::ofstream(gfile) << "4 4\n1 2\n2 3\n3 4\n4 1\n";
    BenchConfig cfg;
    cfg.kind = ProblemKind::MaxCut;
    cfg.source = gfile.string();
    cfg.seed = 1;
    BenchReport report = run_benchmark(cfg);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].name == "toy.gset");
    // 1-flip local optima on C4 are cut 2 (opposite pairs) or 4 (bipartition)
    CHECK(report.records[0].objective >= 2);
    CHECK(report.records[0].objective <= 4);
    CHECK(!report.records[0].has_p);
}

TEST_CASE("bench config validation and json") {
    BenchConfig cfg;
    cfg.count = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.threads = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.source = "some.file";
    cfg.graph_format = "csv";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    nlohmann::json j = {{"kind", "mis"}, {"n", 50}, {"count", 3}, {"seed", 17},
                        {"record_timing", true}};
    BenchConfig parsed = bench_config_from_json(j);
    CHECK(parsed.kind == ProblemKind::MIS);
    CHECK(parsed.n == 50);
    CHECK(parsed.count == 3);
    CHECK(parsed.seed == 17);
    CHECK(parsed.record_timing);
    j["count"] = 0;
    CHECK_THROWS_AS(bench_config_from_json(j), ConfigError);
}

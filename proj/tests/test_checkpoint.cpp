#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "satbridge/checkpoint.hpp"
#include "satbridge/error.hpp"

using namespace satbridge;

namespace {

TrainConfig cfg_small() {
    TrainConfig cfg;
    cfg.d = 8;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.d_head = 4;
    cfg.frozen_layers = 1;
    cfg.seed = 11;
    return cfg;
}

std::string file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

Checkpoint sample_checkpoint() {
    Checkpoint ckpt;
    ckpt.params = ModelParams::init(cfg_small());
    ckpt.params.has_target_head = true;
    ckpt.params.target_head = ckpt.params.classifier;
    ckpt.params.target_head.W1.a[0] = 0.5;
    ckpt.opt = init_adam(ckpt.params);
    ckpt.opt.step = 42;
    ckpt.opt.m[3].a[1] = -0.25;
    ckpt.has_opt = true;
    ckpt.rng_state = 0xdeadbeefULL;
    return ckpt;
}

}  // namespace

TEST_CASE("save/load/save is byte-identical") {
    Checkpoint ckpt = sample_checkpoint();
    save_checkpoint(ckpt, "/tmp/sb_rt1.bin");
    Checkpoint loaded = load_checkpoint("/tmp/sb_rt1.bin");
    save_checkpoint(loaded, "/tmp/sb_rt2.bin");
    CHECK(file_bytes("/tmp/sb_rt1.bin") == file_bytes("/tmp/sb_rt2.bin"));

    CHECK(loaded.rng_state == ckpt.rng_state);
    CHECK(loaded.has_opt);
    CHECK(loaded.opt.step == 42);
    CHECK(loaded.opt.m[3].a[1] == -0.25);
    CHECK(loaded.params.has_target_head);
    CHECK(loaded.params.target_head.W1.a[0] == 0.5);
    auto a = param_entries(ckpt.params);
    auto b = param_entries(loaded.params);
    REQUIRE(a.size() == b.size());
    for (size_t t = 0; t < a.size(); ++t) {
        CHECK(a[t].first == b[t].first);
        CHECK(*a[t].second == *b[t].second);
    }
}

TEST_CASE("corruption is detected") {
    Checkpoint ckpt = sample_checkpoint();
    save_checkpoint(ckpt, "/tmp/sb_corrupt.bin");
    std::string bytes = file_bytes("/tmp/sb_corrupt.bin");

    SUBCASE("flipped payload byte fails the checksum") {
        std::string bad = bytes;
        bad[bad.size() / 2] ^= 0x40;
        std::ofstream(std::string("/tmp/sb_corrupt.bin"), std::ios::binary) << bad;
        CHECK_THROWS_AS(load_checkpoint("/tmp/sb_corrupt.bin"), ParseError);
    }
    SUBCASE("truncation fails") {
        std::ofstream(std::string("/tmp/sb_corrupt.bin"), std::ios::binary)
            << bytes.substr(0, bytes.size() - 16);
        CHECK_THROWS_AS(load_checkpoint("/tmp/sb_corrupt.bin"), ParseError);
    }
    SUBCASE("wrong magic fails") {
        std::string bad = bytes;
        bad[0] = 'X';
        std::ofstream(std::string("/tmp/sb_corrupt.bin"), std::ios::binary) << bad;
        CHECK_THROWS_AS(load_checkpoint("/tmp/sb_corrupt.bin"), ParseError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_checkpoint("/tmp/no_such_ckpt.bin"), IoError); }
}

TEST_CASE("config json round trip") {
    TrainConfig cfg = cfg_small();
    cfg.lambda = 0.35;
    cfg.unsupervised_target = true;
    cfg.polarity_edges = false;
    TrainConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.d == cfg.d);
    CHECK(back.lambda == cfg.lambda);
    CHECK(back.unsupervised_target);
    CHECK(!back.polarity_edges);
    CHECK(back.seed == cfg.seed);

    nlohmann::json j = config_to_json(cfg);
    j["precision"] = "f32";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

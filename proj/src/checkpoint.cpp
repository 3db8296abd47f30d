#include "satbridge/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "satbridge/error.hpp"

namespace satbridge {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a64(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
    json j;
    j["d"] = cfg.d;
    j["layers"] = cfg.layers;
    j["heads"] = cfg.heads;
    j["d_head"] = cfg.d_head;
    j["lr"] = cfg.lr;
    j["weight_decay"] = cfg.weight_decay;
    j["epochs_pretrain"] = cfg.epochs_pretrain;
    j["epochs_finetune"] = cfg.epochs_finetune;
    j["warmup_epochs"] = cfg.warmup_epochs;
    j["lambda"] = cfg.lambda;
    j["frozen_layers"] = cfg.frozen_layers;
    j["seed"] = cfg.seed;
    j["precision"] = cfg.precision;
    j["batch_size"] = cfg.batch_size;
    j["degree_channel"] = cfg.degree_channel;
    j["polarity_edges"] = cfg.polarity_edges;
    j["unsupervised_target"] = cfg.unsupervised_target;
    return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("d", cfg.d);
    get("layers", cfg.layers);
    get("heads", cfg.heads);
    get("d_head", cfg.d_head);
    get("lr", cfg.lr);
    get("weight_decay", cfg.weight_decay);
    get("epochs_pretrain", cfg.epochs_pretrain);
    get("epochs_finetune", cfg.epochs_finetune);
    get("warmup_epochs", cfg.warmup_epochs);
    get("lambda", cfg.lambda);
    get("frozen_layers", cfg.frozen_layers);
    get("seed", cfg.seed);
    get("precision", cfg.precision);
    get("batch_size", cfg.batch_size);
    get("degree_channel", cfg.degree_channel);
    get("polarity_edges", cfg.polarity_edges);
    get("unsupervised_target", cfg.unsupervised_target);
    cfg.validate();
    return cfg;
}

namespace {

constexpr char kMagic[4] = {'S', 'B', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const std::string& s, size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return v;
}

std::uint64_t read_u64(const std::string& s, size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return v;
}

void append_matrix(std::string& out, const Matrix& m) {
    static_assert(sizeof(double) == 8);
    for (double d : m.a) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        append_u64(out, bits);
    }
}

void read_matrix(const std::string& s, size_t& off, Matrix& m) {
    for (auto& d : m.a) {
        std::uint64_t bits = read_u64(s, off);
        off += 8;
        std::memcpy(&d, &bits, 8);
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    auto entries = param_entries(ckpt.params);
    json header;
    header["format_version"] = kVersion;
    header["config"] = config_to_json(ckpt.params.cfg);
    header["has_target_head"] = ckpt.params.has_target_head;
    json tensors = json::array();
    for (const auto& [name, mat] : entries)
        tensors.push_back({{"name", name}, {"rows", mat->rows}, {"cols", mat->cols}});
    header["tensors"] = tensors;
    header["optimizer"] = {{"present", ckpt.has_opt}, {"step", ckpt.opt.step}};
    header["rng_state"] = ckpt.rng_state;
    std::string header_text = header.dump();

    std::string payload;
    for (const auto& [name, mat] : entries) append_matrix(payload, *mat);
    if (ckpt.has_opt) {
        for (const auto& m : ckpt.opt.m) append_matrix(payload, m);
        for (const auto& v : ckpt.opt.v) append_matrix(payload, v);
    }

    std::string out;
    out.append(kMagic, 4);
    append_u32(out, kVersion);
    append_u64(out, header_text.size());
    out += header_text;
    out += payload;
    append_u64(out, fnv1a64(payload.data(), payload.size()));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 16 || std::memcmp(data.data(), kMagic, 4) != 0)
        throw ParseError("not a checkpoint file: " + path);
    if (read_u32(data, 4) != kVersion) throw ParseError("unsupported checkpoint version");
    std::uint64_t header_len = read_u64(data, 8);
    if (16 + header_len + 8 > data.size()) throw ParseError("truncated checkpoint header");
    json header = json::parse(data.substr(16, header_len));

    Checkpoint ckpt;
    TrainConfig cfg = config_from_json(header.at("config"));
    ckpt.params = ModelParams::init(cfg);
    if (header.at("has_target_head").get<bool>()) {
        ckpt.params.has_target_head = true;
        ckpt.params.target_head = ckpt.params.classifier;
    }
    ckpt.has_opt = header.at("optimizer").at("present").get<bool>();
    ckpt.rng_state = header.at("rng_state").get<std::uint64_t>();

    auto entries = param_entries(ckpt.params);
    const auto& tensors = header.at("tensors");
    if (tensors.size() != entries.size()) throw ParseError("checkpoint tensor table mismatch");
    size_t payload_off = 16 + header_len;
    size_t payload_len = data.size() - payload_off - 8;
    std::uint64_t want = read_u64(data, data.size() - 8);
    std::uint64_t got = fnv1a64(data.data() + payload_off, payload_len);
    if (want != got) throw ParseError("checkpoint checksum mismatch");

    size_t off = payload_off;
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& t = tensors[i];
        if (t.at("name").get<std::string>() != entries[i].first ||
            t.at("rows").get<int>() != entries[i].second->rows ||
            t.at("cols").get<int>() != entries[i].second->cols)
            throw ParseError("checkpoint tensor " + entries[i].first + " shape/name mismatch");
        read_matrix(data, off, *entries[i].second);
    }
    if (ckpt.has_opt) {
        ckpt.opt = init_adam(ckpt.params);
        ckpt.opt.step = header.at("optimizer").at("step").get<long>();
        for (auto& m : ckpt.opt.m) read_matrix(data, off, m);
        for (auto& v : ckpt.opt.v) read_matrix(data, off, v);
    }
    if (off != payload_off + payload_len) throw ParseError("checkpoint payload size mismatch");
    return ckpt;
}

}  // namespace satbridge

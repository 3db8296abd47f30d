#pragma once

#include <string>

#include "satbridge/adam.hpp"
#include "satbridge/model.hpp"

#include <nlohmann/json_fwd.hpp>

namespace satbridge {

// Versioned container: magic "SBCP", u32 version, u64 header length, JSON
// header (config + tensor table + optimizer/rng presence), raw f64
// little-endian tensor payload, u64 FNV-1a payload checksum.
struct Checkpoint {
    ModelParams params;
    AdamState opt;
    bool has_opt = false;
    std::uint64_t rng_state = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(const void* data, size_t len);

}  // namespace satbridge

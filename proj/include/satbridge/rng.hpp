#pragma once

#include <cstdint>

namespace satbridge {

// SplitMix64 output function; also used as the documented seed-split hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-item seed derivation: seed_i = hash(seed, i).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t i) {
    return splitmix64(seed ^ splitmix64(i + 1));
}

// Small deterministic generator with a single-word serializable state.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound > 0. Rejection-free modulo bias is
    // negligible for the bounds used here, but we reject anyway.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    int next_int(int bound) { return static_cast<int>(next_below(static_cast<std::uint64_t>(bound))); }

    // Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next_u64() & 1ULL) != 0; }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

}  // namespace satbridge

#pragma once

#include <cstdint>

namespace noisykmpp {

// splitmix64 finalizer. All randomness in the project bottoms out here, so
// sequences are bit-stable across platforms and languages.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Stable splitting rule: child streams are keyed by (master, stream) and do
// not overlap for distinct stream indices. Adding streams never perturbs
// existing ones.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master ^ 0x9E3779B97F4A7C15ULL) + stream);
}

// Counter-based generator: output i is mix64(seed + (i+1) * golden gamma).
// State is a single counter, so any draw can be reproduced from (seed, i).
class CounterRng {
public:
    CounterRng() = default;
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); safe input for inverse-CDF transforms.
    double next_open_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection-free scaling; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // 53-bit scaling is unbiased enough for desk-scale index draws and
        // keeps the draw count at exactly one per call.
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
    }

private:
    std::uint64_t state_ = 0;
};

} // namespace noisykmpp

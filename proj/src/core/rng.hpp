#pragma once

#include <cstdint>

namespace stableq {

/// SplitMix64 stream. Counter-based: the state advances by a fixed odd
/// constant and each output is a bijective mix of the state, so streams can
/// be derived cheaply and independent realisations are reproducible
/// regardless of thread scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double strictly inside (0, 1).
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Derives the seed of sub-stream `index` from a master seed. Used for
/// per-realisation streams in parallel simulation.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0xA0761D6478BD642FULL * (index + 1)));
    mix.next_u64();
    return mix.next_u64();
}

}  // namespace stableq

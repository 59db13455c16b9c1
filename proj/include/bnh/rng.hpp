#pragma once

#include <cstdint>

namespace bnh {

// Finalizer that mixes every input bit into every output bit (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based generator: the state is a Weyl counter advanced by a fixed
// odd increment and each output is a bijective hash of the counter
// (splitmix64). Not cryptographic; chosen for exact reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound), bound >= 1. Rejection keeps the draw unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0ull - bound) % bound;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Sub-stream derivation: stream i of a master seed starts from
// mix64(seed + GOLDEN * (i + 1)), so distinct (seed, i) pairs yield
// decorrelated, independently usable streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

}  // namespace bnh

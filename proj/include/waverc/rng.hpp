#pragma once

#include <cstdint>

namespace waverc {

/// splitmix64, used to derive independent stream seeds from a base seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix64(base ^ mix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix64(base ^ mix64(tag_a) ^ mix64(mix64(tag_b)));
}

/// xoshiro256** by Blackman & Vigna. Small, fast, and the output sequence is
/// pinned by this header rather than by the standard library, so replay
/// oracles in tests can reproduce draws independently of the platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // seed the state through splitmix64 as recommended by the authors
        for (auto& w : s_) {
            seed = mix64(seed);
            w = seed;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace waverc

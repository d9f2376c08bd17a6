#pragma once

#include <cstdint>

namespace rcga {

// Identifier stored in run results so traces can be checked against other
// implementations of the same generator.
inline constexpr const char* kRngAlgorithm = "splitmix64";

// SplitMix64 (Steele/Lea/Vigna). The state advances by a fixed odd constant
// and the output is a bijective mix of the state, which makes the whole
// sequence a pure function of the seed: identical seeds reproduce identical
// streams on every platform.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased draw from [0, bound), bound >= 1. Lemire's multiply-then-reject
    // scheme; the rejection loop keeps the draw exactly uniform while staying
    // deterministic as a function of the stream.
    uint64_t next_below(uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            const uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

  private:
    uint64_t state_;
};

} // namespace rcga

#pragma once

#include <cstdint>

namespace bpd {

/// xorshift64* (Vigna 2014): state ^= state >> 12; state ^= state << 25;
/// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D.
/// The seed is passed through one round of splitmix64 so that seeds 0, 1, 2, ...
/// give well-separated streams and the state is never zero.
///
/// This exact algorithm (and uniform01 below) is part of the region-generation
/// contract: an implementation in any language reproduces the same regions.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() noexcept {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    static std::uint64_t splitmix64(std::uint64_t x) noexcept {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace bpd

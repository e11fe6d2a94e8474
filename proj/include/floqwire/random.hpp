#pragma once

#include <cstdint>

namespace floqwire {

// Small counter-based generator (splitmix64). Deterministic given (seed,
// counter), cheap to split for independent Monte-Carlo streams, and the
// (seed, counter) pair is recorded with every measurement outcome.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed), seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        ++counter_;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    SplitMix64 split() {
        SplitMix64 child(next_u64());
        return child;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace floqwire

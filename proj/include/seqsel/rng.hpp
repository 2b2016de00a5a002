#pragma once

#include <cstdint>

namespace seqsel {

// xoshiro256** seeded through SplitMix64. Trial i of a run with seed s draws
// from the stream whose state is four SplitMix64 outputs started at
// s ^ (0x9E3779B97F4A7C15 * (i + 1)), so each trial's stream is independent
// of how trials are scheduled.
inline constexpr const char* kGeneratorName = "xoshiro256starstar-splitmix64-v1";

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : s_(state) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t s_;
};

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }
    static Xoshiro256 for_trial(std::uint64_t seed, std::uint64_t trial) {
        return Xoshiro256(seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
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

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace seqsel

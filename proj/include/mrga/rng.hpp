#pragma once

#include <cstdint>

namespace mrga {

// All randomness in the library flows through RngStream so that a run is
// reproducible bit for bit from a single 64-bit seed, on any platform.
// The generator is xoshiro256++ seeded through splitmix64; per-component
// streams are derived with mix_seed. Standard-library distributions are
// deliberately not used (their output is implementation-defined).

namespace detail {

constexpr std::uint64_t kSplitmix64Gamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Advances `state` by one splitmix64 step and returns the output.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += kSplitmix64Gamma;
    return splitmix64_finalize(state);
}

constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Derives an independent child seed from (seed, key). Used to give every
/// map task and the reducer its own stream: task i draws from
/// mix_seed(master_seed, i), the reducer from mix_seed(master_seed,
/// kReduceSeedKey). Bijective in `key` for a fixed seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
    return detail::splitmix64_finalize(seed + detail::kSplitmix64Gamma * (key + 1));
}

/// Key reserved for the reduce phase; block indices can never reach it.
constexpr std::uint64_t kReduceSeedKey = 0xFFFFFFFFFFFFFFFFull;

/// xoshiro256++ generator with a fixed draw discipline. Identical seeds
/// produce identical sequences on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi). Requires lo < hi.
    double uniform_real(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    /// Uniform integer in [0, n) via the multiply-shift reduction. n > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// True with probability p. Always consumes exactly one draw.
    bool bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_[4];
};

}  // namespace mrga

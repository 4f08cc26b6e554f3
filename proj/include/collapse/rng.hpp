#pragma once

#include <cmath>
#include <cstdint>

namespace collapse {

// SplitMix64 output function (Steele/Lea/Flood). Used for seed derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for the stream at `index` under `master`. Element `index` of the
// SplitMix64 sequence started at `master`, so distinct indices give
// distinct, decorrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master + index * 0x9e3779b97f4a7c15ULL;
    return splitmix64_next(state);
}

// xoshiro256++ (Blackman/Vigna). State seeded through SplitMix64 so that
// any 64-bit value, including 0, is an acceptable seed.
class Xoshiro256PlusPlus {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64_next(x);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~static_cast<result_type>(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// One random stream per trial: uniform and standard-normal draws, with the
// normal generated by the Marsaglia polar method (the second deviate of
// each accepted pair is cached). Self-contained so the draw sequence is
// reproducible across standard libraries and platforms.
class TrialRng {
public:
    TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
        : engine_(derive_seed(master_seed, trial_index)) {}

    explicit TrialRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform01() { return engine_.uniform01(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * engine_.uniform01() - 1.0;
            v = 2.0 * engine_.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    Xoshiro256PlusPlus engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace collapse

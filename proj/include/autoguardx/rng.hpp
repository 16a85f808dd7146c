#pragma once
// Deterministic, portable random streams.
//
// Every stream is a xoshiro256** generator whose state is expanded from a
// 64-bit seed by splitmix64 (Blackman/Vigna reference constants). Traces are
// reproducible across implementations because both algorithms are fully
// specified here and no standard-library distribution is used anywhere.
//
// Substreams are derived by label so that a node's behavior depends only on
// (scenario seed, label), never on fleet ordering.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace agx {

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    // Substream for (seed, label); independent of the order streams are made.
    static Rng for_label(uint64_t seed, std::string_view label) {
        return Rng(seed ^ fnv1a64(label));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, bound); bound 0 yields 0.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        // 128-bit multiply rejection-free mapping (Lemire); deterministic.
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        return static_cast<uint64_t>(m >> 64);
    }

    // Uniform integer in [lo, hi] inclusive.
    int64_t next_in(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; draws two uniforms per pair.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    void fill(uint8_t* out, size_t n) {
        size_t i = 0;
        while (i + 8 <= n) {
            uint64_t w = next_u64();
            for (int b = 0; b < 8; ++b) out[i++] = static_cast<uint8_t>(w >> (8 * b));
        }
        if (i < n) {
            uint64_t w = next_u64();
            while (i < n) {
                out[i++] = static_cast<uint8_t>(w);
                w >>= 8;
            }
        }
    }

    template <size_t N>
    std::array<uint8_t, N> bytes() {
        std::array<uint8_t, N> a;
        fill(a.data(), N);
        return a;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace agx

#pragma once

#include <cmath>
#include <cstdint>

namespace dimpc {

// splitmix64; also used to derive independent stream seeds.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-independent per-substream seed: hash(base, index).
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

// xoshiro256++ with an explicit Gaussian cache. No standard-library
// distributions anywhere: every draw must be bit-reproducible across builds.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1. Modulo bias is irrelevant at the
    // sample counts used here but rejection keeps streams well defined.
    uint64_t uniform_index(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t draw = next_u64();
        while (draw >= limit) draw = next_u64();
        return draw % n;
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    // Exponential with the given mean.
    double exponential(double mean) {
        double u = uniform();
        while (u >= 1.0) u = uniform();  // guard, uniform() < 1 already
        return -mean * std::log1p(-u);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4] = {};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace dimpc

#pragma once

#include <cstdint>

namespace relayplan {

// splitmix64: the sub-seed derivation for chunked Monte-Carlo runs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++, seeded from splitmix64. Small, fast, and fully owned here so
// streams never depend on standard-library implementation details.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53-bit resolution.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log argument.
    double next_double_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Sub-seed for chunk `index` of a run seeded with `seed`. Deriving every
// chunk seed from (seed, index) alone keeps results independent of how
// chunks are scheduled across threads.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xa0761d6478bd642fULL + index * 0xe7037ed1a0b428dbULL);
    return splitmix64(s);
}

inline constexpr std::int64_t kMcChunkSize = 1 << 16;

}  // namespace relayplan

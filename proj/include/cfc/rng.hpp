#pragma once

// SplitMix64 (Steele, Lea & Vigna; the java.util.SplittableRandom mixer,
// public-domain reference splitmix64.c). Chosen because the whole algorithm
// fits in a dozen lines, so seeds stay portable across reimplementations.

#include <cstdint>

namespace cfc {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Deterministic sub-seed for stream `index` of `seed`: the (index+1)-th
/// output of SplitMix64(seed), computed in closed form. Monte Carlo trials
/// each own a derived stream, so histograms are independent of how trials
/// are sharded across workers.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cfc

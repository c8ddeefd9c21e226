#pragma once

#include <cstdint>

namespace wfisher {

/// SplitMix64 with per-replicate substreams. The stream for replicate j
/// starts at state mix(seed + golden) ^ mix(j + c), so replicate
/// results do not depend on scheduling; identical (seed, stream) pairs
/// reproduce the same draws bit for bit.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed + kGolden) ^ mix(stream + 0x6A09E667F3BCC909ULL)) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix(state_);
    }

    /// Uniform draw in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace wfisher

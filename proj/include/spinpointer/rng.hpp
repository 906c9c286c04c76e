#pragma once

#include <cstdint>
#include <limits>

namespace spinpointer {

/// Counter-based stream generator (splitmix64). Each stream is fully
/// determined by its 64-bit state, so trial k of a run can be seeded
/// independently of execution order or thread placement.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// Derives a child seed from (parent, index). Chaining this twice gives the
/// per-(grid point, trial) streams used by the Monte Carlo driver.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return SplitMix64::mix(parent ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace spinpointer

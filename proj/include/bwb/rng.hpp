#pragma once

#include <cstdint>
#include <random>

namespace bwb {

/// SplitMix64 finalizer. Bijective on 64-bit words; used both as the
/// per-stream generator step and for deriving stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Splittable pseudo-random stream (SplitMix64).
///
/// Every stream is a pure function of its 64-bit key, so a run is fully
/// reproduced by one seed: submodules derive child streams with
/// derive_stream(seed, tag, replicate) and the results are independent of
/// thread scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection-free Lemire reduction with a
    /// correction loop for exactness.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            __uint128_t m = static_cast<__uint128_t>(r) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

/// Derive an independent stream key from (seed, tag).
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) {
    return mix64(mix64(seed) ^ mix64(tag ^ 0xa0761d6478bd642full));
}

/// Stream for replicate `rep` of the submodule identified by `tag`.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t rep) {
    return Rng(derive_key(derive_key(seed, tag), rep));
}

// Fixed module tags; one run seed reproduces every submodule stream.
namespace stream_tag {
constexpr std::uint64_t engine = 0x656e67696e650001ull;
constexpr std::uint64_t spine = 0x7370696e65000001ull;
constexpr std::uint64_t abpre = 0x6162707265000001ull;
constexpr std::uint64_t bprei = 0x6270726569000001ull;
constexpr std::uint64_t assumption_probe = 0x613570726f626501ull;
constexpr std::uint64_t experiment = 0x6578706572000001ull;
}  // namespace stream_tag

/// Entropy seed for runs where the user supplied none. The caller is
/// expected to print it so the run can be reproduced.
inline std::uint64_t entropy_seed() {
    std::random_device rd;
    std::uint64_t hi = rd(), lo = rd();
    return mix64((hi << 32) ^ lo);
}

}  // namespace bwb

// Seeded, counter-based random numbers. Streams are derived deterministically
// from (seed, stream index), so results never depend on evaluation order or
// thread count. Header-only.
#pragma once

#include <cstdint>

namespace ratedist {

/// splitmix64 finalizer (Steele/Lea/Flood mixing constants).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

/// Value of stream `key` at counter `ctr` (counter form of splitmix64).
inline std::uint64_t counter_u64(std::uint64_t key, std::uint64_t ctr) {
    return mix64(key + (ctr + 1) * golden_gamma);
}

/// Independent stream key for (seed, stream).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x51ED2701A9E3C47Bull));
}

/// Uniform double in [0, 1) from the top 52 bits.
inline double unit_from_u64(std::uint64_t u) {
    return static_cast<double>(u >> 12) * 0x1p-52;
}

/// Sequential view of one counter stream.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(stream_key(seed, stream)) {}

    std::uint64_t next_u64() { return counter_u64(key_, ctr_++); }
    /// Uniform in [0, 1).
    double next_unit() { return unit_from_u64(next_u64()); }
    /// Uniform in (0, 1].
    double next_unit_open() { return 1.0 - unit_from_u64(next_u64()); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return ctr_; }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace ratedist

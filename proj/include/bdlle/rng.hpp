#pragma once

#include <cstdint>

namespace bdlle {

/// Counter-based SplitMix64 stream.
///
/// The i-th 64-bit output is mix(seed + (i + 1) * 0x9E3779B97F4A7C15), where mix
/// is the SplitMix64 finalizer (Steele, Lea, Flood 2014). Because every output
/// is a pure function of (seed, counter), a stream can be positioned anywhere
/// with seek() and reproduces bit-exactly on any platform.
///
/// Derived variates:
///   uniform()  = (u64 >> 11) * 2^-53, in [0, 1)
///   normal()   = Box-Muller on (1 - uniform(), uniform()); both outputs of a
///                pair are used, cosine branch first.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }
    void seek(std::uint64_t counter) noexcept
    {
        counter_ = counter;
        has_spare_ = false;
    }

    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bdlle

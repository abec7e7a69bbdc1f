#pragma once

#include <cstdint>
#include <limits>

namespace lshmodel {

/// SplitMix64: a Weyl counter passed through a 64-bit finalizer.
///
/// Every draw is a pure function of (state, draw index), which makes it a
/// counter-based generator: a work item `i` derives its own stream with
/// `SplitMix64::stream(seed, i)` and the results never depend on which thread
/// ran it or in what order. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        // Two rounds of mixing so neighbouring (seed, index) pairs land far apart.
        return SplitMix64(mix(mix(seed) ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace lshmodel

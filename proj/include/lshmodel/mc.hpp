#pragma once

#include <cstdint>

namespace lshmodel::mc {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Samples are processed in fixed blocks of this size; each block's
// statistics are merged in block order.
inline constexpr std::uint64_t kSampleBlock = 1024;

// Monte Carlo estimate of p(m, ell, d): the mean over `samples` independent
// cell draws of the exact covered volume. Sample i draws its cells from
// SplitMix64::stream(seed, i), so the result depends only on the arguments.
//
// `workers` = 0 uses the OpenMP default thread count.
McEstimate mc_estimate_p(int m, int ell, int d, std::uint64_t samples, std::uint64_t seed,
                         int workers = 0);

// Single-threaded reference. Bit-identical to mc_estimate_p.
McEstimate mc_estimate_p_serial(int m, int ell, int d, std::uint64_t samples,
                                std::uint64_t seed);

} // namespace lshmodel::mc

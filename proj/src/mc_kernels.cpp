#include "lshmodel/mc.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lshmodel/geometry.hpp"
#include "lshmodel/rng.hpp"
#include "lshmodel/stats.hpp"

namespace lshmodel::mc {

namespace {

void validate(int m, int ell, int d, std::uint64_t samples) {
    if (m < 1 || m > kMaxCells)
        throw std::domain_error("m must be in [1, 20]");
    if (ell < 1 || ell > m)
        throw std::domain_error("ell must be in [1, m]");
    if (d < 1)
        throw std::domain_error("d must be >= 1");
    if (samples == 0)
        throw std::domain_error("samples must be positive");
}

RunningStats run_block(int m, int ell, int d, std::uint64_t seed, std::uint64_t begin,
                       std::uint64_t end) {
    RunningStats stats;
    for (std::uint64_t i = begin; i < end; ++i) {
        auto rng = SplitMix64::stream(seed, i);
        const CellSample sample = sample_cells(m, d, rng);
        stats.add(coverage_from_sums(intersection_sums(sample), ell));
    }
    return stats;
}

McEstimate finish(const std::vector<RunningStats>& blocks, std::uint64_t samples,
                  std::uint64_t seed) {
    RunningStats total;
    for (const auto& b : blocks)
        total.merge(b);
    return {total.mean, total.stderr_of_mean(), samples, seed};
}

std::uint64_t block_count(std::uint64_t samples) {
    return (samples + kSampleBlock - 1) / kSampleBlock;
}

} // namespace

McEstimate mc_estimate_p(int m, int ell, int d, std::uint64_t samples, std::uint64_t seed,
                         int workers) {
    validate(m, ell, d, samples);
    const auto nblocks = static_cast<std::int64_t>(block_count(samples));
    std::vector<RunningStats> blocks(static_cast<std::size_t>(nblocks));
    const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const auto begin = static_cast<std::uint64_t>(b) * kSampleBlock;
        const auto end = std::min(samples, begin + kSampleBlock);
        blocks[static_cast<std::size_t>(b)] = run_block(m, ell, d, seed, begin, end);
    }
    return finish(blocks, samples, seed);
}

McEstimate mc_estimate_p_serial(int m, int ell, int d, std::uint64_t samples,
                                std::uint64_t seed) {
    validate(m, ell, d, samples);
    const auto nblocks = block_count(samples);
    std::vector<RunningStats> blocks(nblocks);
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        const auto begin = b * kSampleBlock;
        const auto end = std::min(samples, begin + kSampleBlock);
        blocks[b] = run_block(m, ell, d, seed, begin, end);
    }
    return finish(blocks, samples, seed);
}

} // namespace lshmodel::mc

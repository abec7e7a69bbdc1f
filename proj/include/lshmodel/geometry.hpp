#pragma once

// Exact geometry of m unit cells that all contain the origin, clipped to the
// query cube [-1/2, 1/2]^d.
//
// A cell is described by its center offset x in [-1/2, 1/2]^d and occupies
// the box [x - 1/2, x + 1/2]. Along one axis a single cell covers 1 - |x| of
// the query interval; two cells on the same side cover 1 - max(|x|, |y|)
// together and 1 - |x - y| when they straddle the origin.

#include <cstddef>
#include <span>
#include <vector>

#include "lshmodel/rng.hpp"

namespace lshmodel::mc {

inline constexpr int kMaxCells = 20;

struct CellOffset {
    std::vector<double> offsets;

    std::size_t dim() const noexcept { return offsets.size(); }
};

// m cells of a common dimensionality, stored row-major (cell, axis).
class CellSample {
public:
    CellSample() = default;
    CellSample(std::size_t cells, std::size_t dim);
    // Validates ranges and equal dimensionality; throws std::domain_error.
    explicit CellSample(const std::vector<CellOffset>& cells);

    std::size_t cells() const noexcept { return cells_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> cell(std::size_t i) const noexcept {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<double> cell(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

    double offset(std::size_t i, std::size_t axis) const noexcept { return data_[i * dim_ + axis]; }

private:
    std::size_t cells_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

// Each component i.i.d. uniform on [-1/2, 1/2]. Requires 1 <= m <= 20, d >= 1.
CellSample sample_cells(int m, int d, SplitMix64& rng);

// Volume of (cap of the cells in `subset`) within the query cube. The subset
// must be nonempty; indices must be < sample.cells().
double intersection_volume(const CellSample& sample, std::span<const std::size_t> subset);

// S_j for j = 1..m (index j - 1): the sum of intersection volumes over all
// subsets of size j. Subsets whose intersection is already empty are pruned.
std::vector<double> intersection_sums(const CellSample& sample);

// Converts S_1..S_m into the volume covered by at least `ell` cells.
double coverage_from_sums(std::span<const double> sums, int ell);

double union_volume(const CellSample& sample);

double coverage_at_least(const CellSample& sample, int ell);

} // namespace lshmodel::mc

#include "lshmodel/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "lshmodel/errors.hpp"
#include "lshmodel/model.hpp"
#include "lshmodel/stats.hpp"

namespace lshmodel::mc {

CellSample::CellSample(std::size_t cells, std::size_t dim)
    : cells_(cells), dim_(dim), data_(cells * dim, 0.0) {}

CellSample::CellSample(const std::vector<CellOffset>& cells) {
    if (cells.empty())
        throw std::domain_error("a cell sample needs at least one cell");
    cells_ = cells.size();
    dim_ = cells.front().dim();
    if (dim_ == 0)
        throw std::domain_error("cells need at least one dimension");
    data_.reserve(cells_ * dim_);
    for (const auto& c : cells) {
        if (c.dim() != dim_)
            throw std::domain_error("all cells must share one dimensionality");
        for (double x : c.offsets) {
            if (!(x >= -0.5 && x <= 0.5))
                throw std::domain_error("cell offsets must lie in [-1/2, 1/2]");
            data_.push_back(x);
        }
    }
}

CellSample sample_cells(int m, int d, SplitMix64& rng) {
    if (m < 1 || m > kMaxCells)
        throw std::domain_error("m must be in [1, 20]");
    if (d < 1)
        throw std::domain_error("d must be >= 1");
    CellSample sample(static_cast<std::size_t>(m), static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < sample.cells(); ++i)
        for (double& x : sample.cell(i))
            x = rng.uniform01() - 0.5;
    return sample;
}

double intersection_volume(const CellSample& sample, std::span<const std::size_t> subset) {
    if (subset.empty())
        throw std::domain_error("intersection of an empty subset");
    for (std::size_t i : subset)
        if (i >= sample.cells())
            throw std::domain_error("cell index out of range");

    double volume = 1.0;
    for (std::size_t axis = 0; axis < sample.dim(); ++axis) {
        double hi = 0.5;
        double lo = -0.5;
        for (std::size_t i : subset) {
            const double x = sample.offset(i, axis);
            hi = std::min(hi, x + 0.5);
            lo = std::max(lo, x - 0.5);
        }
        volume *= std::max(hi - lo, 0.0);
    }
    return volume;
}

namespace {

// Depth-first walk over subsets in increasing index order. bounds[k] holds the
// clipped [lo, hi) box of the current subset of size k.
class SubsetWalker {
public:
    explicit SubsetWalker(const CellSample& sample)
        : sample_(sample),
          dim_(sample.dim()),
          lo_((sample.cells() + 1) * dim_, -0.5),
          hi_((sample.cells() + 1) * dim_, 0.5),
          sums_(sample.cells()) {}

    std::vector<double> run() {
        descend(0, 0);
        std::vector<double> out(sums_.size());
        std::transform(sums_.begin(), sums_.end(), out.begin(),
                       [](const CompensatedSum& s) { return s.value(); });
        return out;
    }

private:
    void descend(std::size_t first, std::size_t depth) {
        const double* lo = lo_.data() + depth * dim_;
        const double* hi = hi_.data() + depth * dim_;
        double* next_lo = lo_.data() + (depth + 1) * dim_;
        double* next_hi = hi_.data() + (depth + 1) * dim_;
        for (std::size_t i = first; i < sample_.cells(); ++i) {
            const auto cell = sample_.cell(i);
            double volume = 1.0;
            for (std::size_t axis = 0; axis < dim_; ++axis) {
                next_lo[axis] = std::max(lo[axis], cell[axis] - 0.5);
                next_hi[axis] = std::min(hi[axis], cell[axis] + 0.5);
                volume *= std::max(next_hi[axis] - next_lo[axis], 0.0);
            }
            // Supersets of an empty intersection are empty too.
            if (volume <= 0.0)
                continue;
            sums_[depth].add(volume);
            descend(i + 1, depth + 1);
        }
    }

    const CellSample& sample_;
    std::size_t dim_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<CompensatedSum> sums_;
};

} // namespace

std::vector<double> intersection_sums(const CellSample& sample) {
    if (sample.cells() == 0)
        throw std::domain_error("empty cell sample");
    if (sample.cells() > static_cast<std::size_t>(kMaxCells))
        throw CapacityError("exact coverage enumerates 2^m subsets; m must be <= 20");
    return SubsetWalker(sample).run();
}

double coverage_from_sums(std::span<const double> sums, int ell) {
    const int m = static_cast<int>(sums.size());
    if (ell < 1 || ell > m)
        throw std::domain_error("ell must be in [1, m]");
    CompensatedSum total;
    for (int j = ell; j <= m; ++j) {
        const BigInt weight = model::binomial(j - 1, ell - 1);
        const double term = weight.get_d() * sums[j - 1];
        total.add((j - ell) % 2 == 0 ? term : -term);
    }
    return std::clamp(total.value(), 0.0, 1.0);
}

double union_volume(const CellSample& sample) {
    return coverage_from_sums(intersection_sums(sample), 1);
}

double coverage_at_least(const CellSample& sample, int ell) {
    if (ell < 1 || static_cast<std::size_t>(ell) > sample.cells())
        throw std::domain_error("ell must be in [1, m]");
    return coverage_from_sums(intersection_sums(sample), ell);
}

} // namespace lshmodel::mc

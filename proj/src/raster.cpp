#include "lshmodel/raster.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lshmodel/errors.hpp"

namespace lshmodel::mc {

RasterResult raster_oracle(const CellSample& sample, int ell, std::size_t resolution) {
    const std::size_t m = sample.cells();
    const std::size_t d = sample.dim();
    if (ell < 1 || static_cast<std::size_t>(ell) > m)
        throw std::domain_error("ell must be in [1, m]");
    if (resolution == 0)
        throw std::domain_error("resolution must be positive");
    if (d == 0 || d > 3)
        throw CapacityError("raster oracle supports d <= 3");
    if (m > static_cast<std::size_t>(kMaxCells))
        throw CapacityError("raster oracle supports m <= 20");
    std::size_t points = 1;
    for (std::size_t axis = 0; axis < d; ++axis) {
        if (points > kMaxRasterPoints / resolution)
            throw CapacityError("raster grid exceeds 2^28 points");
        points *= resolution;
    }

    // masks[axis * resolution + k]: cells covering midpoint k along `axis`.
    std::vector<std::uint32_t> masks(d * resolution, 0);
    for (std::size_t axis = 0; axis < d; ++axis) {
        for (std::size_t k = 0; k < resolution; ++k) {
            const double t = -0.5 + (static_cast<double>(k) + 0.5) / static_cast<double>(resolution);
            std::uint32_t bits = 0;
            for (std::size_t i = 0; i < m; ++i) {
                const double x = sample.offset(i, axis);
                if (t >= x - 0.5 && t <= x + 0.5)
                    bits |= std::uint32_t{1} << i;
            }
            masks[axis * resolution + k] = bits;
        }
    }

    const auto need = static_cast<int>(ell);
    const auto rows = static_cast<std::int64_t>(points / resolution);
    std::uint64_t covered = 0;
#pragma omp parallel for reduction(+ : covered) schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        // row enumerates the leading axes; the last axis is the inner loop.
        std::uint32_t prefix = ~std::uint32_t{0};
        auto rest = static_cast<std::size_t>(row);
        for (std::size_t axis = d - 1; axis-- > 0;) {
            prefix &= masks[axis * resolution + rest % resolution];
            rest /= resolution;
        }
        const std::uint32_t* last = masks.data() + (d - 1) * resolution;
        std::uint64_t local = 0;
        for (std::size_t k = 0; k < resolution; ++k)
            local += std::popcount(prefix & last[k]) >= need ? 1 : 0;
        covered += local;
    }

    return {static_cast<double>(covered) / static_cast<double>(points),
            static_cast<double>(m * d) / static_cast<double>(resolution)};
}

} // namespace lshmodel::mc

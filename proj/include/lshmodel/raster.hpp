#pragma once

#include <cstddef>

#include "lshmodel/geometry.hpp"

namespace lshmodel::mc {

struct RasterResult {
    double fraction = 0.0;
    // m d / resolution. A cell has at most one face per axis strictly inside
    // the cube and each face misclassifies at most one slab of pixels.
    double error_bound = 0.0;
};

inline constexpr std::size_t kMaxRasterPoints = std::size_t{1} << 28;

// Midpoint rasterization of the query cube at `resolution` points per axis,
// counting points covered by at least `ell` cells. Requires d <= 3 and
// resolution^d <= 2^28; throws CapacityError otherwise.
RasterResult raster_oracle(const CellSample& sample, int ell, std::size_t resolution);

} // namespace lshmodel::mc

#include "lshmodel/grid_lsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lshmodel/geometry.hpp"
#include "lshmodel/rng.hpp"

namespace lshmodel::lsh {

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
    if (n == 0 || d == 0)
        throw std::domain_error("a point set needs n >= 1 and d >= 1");
    if (coords_.size() != n * d)
        throw std::domain_error("coordinate count does not match n * d");
    for (double x : coords_)
        if (!(x >= 0.0 && x < 1.0))
            throw std::domain_error("coordinates must lie in [0, 1)");
}

PointSet generate_uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0)
        throw std::domain_error("n and d must be positive");
    std::vector<double> coords(n * d);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        for (std::size_t j = 0; j < d; ++j)
            coords[static_cast<std::size_t>(i) * d + j] = rng.uniform01();
    }
    return PointSet(n, d, std::move(coords));
}

void GridConfig::validate() const {
    if (m < 1 || m > mc::kMaxCells)
        throw std::domain_error("m must be in [1, 20]");
    if (g < 2)
        throw std::domain_error("g must be >= 2");
}

GridIndex::GridIndex(const PointSet& points, const GridConfig& config)
    : config_(config), dim_(points.dim()), size_(points.size()) {
    config_.validate();
    const double side = 1.0 / config_.g;
    shifts_.resize(static_cast<std::size_t>(config_.m) * dim_);
    for (std::size_t t = 0; t < static_cast<std::size_t>(config_.m); ++t) {
        auto rng = SplitMix64::stream(config_.seed, t);
        for (std::size_t j = 0; j < dim_; ++j)
            shifts_[t * dim_ + j] = rng.uniform01() * side;
    }
    build(points);
}

GridIndex::GridIndex(const PointSet& points, const GridConfig& config,
                     std::vector<std::vector<double>> shifts)
    : config_(config), dim_(points.dim()), size_(points.size()) {
    config_.validate();
    if (shifts.size() != static_cast<std::size_t>(config_.m))
        throw std::domain_error("need one shift vector per table");
    const double side = 1.0 / config_.g;
    for (const auto& s : shifts) {
        if (s.size() != dim_)
            throw std::domain_error("shift dimensionality mismatch");
        for (double x : s) {
            if (!(x >= 0.0 && x < side))
                throw std::domain_error("shifts must lie in [0, 1/g)");
            shifts_.push_back(x);
        }
    }
    build(points);
}

void GridIndex::build(const PointSet& points) {
    // Mixed-radix keys must fit in 64 bits.
    long double cells = 1.0L;
    for (std::size_t j = 0; j < dim_; ++j)
        cells *= config_.g;
    if (cells > static_cast<long double>(std::numeric_limits<CellKey>::max()))
        throw std::domain_error("g^d exceeds the 64-bit cell key space");

    tables_.assign(static_cast<std::size_t>(config_.m), {});
    for (std::size_t t = 0; t < tables_.size(); ++t) {
        auto& table = tables_[t];
        for (std::size_t i = 0; i < points.size(); ++i)
            table[cell_key(t, points.point(i))].push_back(i);
    }
}

std::vector<std::uint32_t> GridIndex::cell_coords(std::size_t table,
                                                  std::span<const double> p) const {
    const auto s = shift(table);
    const auto g = static_cast<std::uint32_t>(config_.g);
    std::vector<std::uint32_t> coords(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        const auto c = static_cast<std::uint32_t>(std::floor((p[j] + s[j]) * config_.g));
        coords[j] = c % g;
    }
    return coords;
}

CellKey GridIndex::cell_key(std::size_t table, std::span<const double> p) const {
    const auto s = shift(table);
    const auto g = static_cast<CellKey>(config_.g);
    CellKey key = 0;
    for (std::size_t j = dim_; j-- > 0;) {
        const auto c = static_cast<CellKey>(std::floor((p[j] + s[j]) * config_.g));
        key = key * g + c % g;
    }
    return key;
}

std::span<const std::size_t> GridIndex::bucket(std::size_t table, CellKey key) const {
    const auto& t = tables_[table];
    const auto it = t.find(key);
    if (it == t.end())
        return {};
    return it->second;
}

std::vector<std::size_t> query_candidates(const GridIndex& index, std::span<const double> q,
                                          int ell) {
    if (ell < 1 || static_cast<std::size_t>(ell) > index.tables())
        throw std::domain_error("ell must be in [1, m]");
    if (q.size() != index.dim())
        throw std::domain_error("query dimensionality mismatch");

    // Buckets are sorted by construction; merge them pairwise.
    std::vector<std::size_t> hits;
    std::vector<std::size_t> merged;
    for (std::size_t t = 0; t < index.tables(); ++t) {
        const auto b = index.bucket(t, index.cell_key(t, q));
        merged.resize(hits.size() + b.size());
        std::merge(hits.begin(), hits.end(), b.begin(), b.end(), merged.begin());
        hits.swap(merged);
    }

    std::vector<std::size_t> out;
    const auto need = static_cast<std::size_t>(ell);
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i])
            ++j;
        if (j - i >= need)
            out.push_back(hits[i]);
        i = j;
    }
    return out;
}

std::vector<std::size_t> range_query_bruteforce(const PointSet& points, std::span<const double> q,
                                                double radius) {
    if (!(radius > 0.0 && radius < 0.5))
        throw std::domain_error("radius must be in (0, 1/2)");
    if (q.size() != points.dim())
        throw std::domain_error("query dimensionality mismatch");

    // Branch-free scan: ids are written unconditionally and the cursor only
    // advances for hits.
    std::vector<std::size_t> out(points.size());
    std::size_t count = 0;
    const std::size_t d = q.size();
    const double* coords = points.coords().data();
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool inside = true;
        for (std::size_t j = 0; j < d; ++j) {
            double delta = coords[i * d + j] - q[j];
            delta -= delta >= 0.5 ? 1.0 : 0.0;
            delta += delta < -0.5 ? 1.0 : 0.0;
            inside &= (delta >= -radius) & (delta < radius);
        }
        out[count] = i;
        count += inside ? 1 : 0;
    }
    out.resize(count);
    return out;
}

} // namespace lshmodel::lsh

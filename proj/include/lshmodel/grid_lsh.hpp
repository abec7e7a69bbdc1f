#pragma once

// Multi-table shifted-grid LSH over the unit torus [0, 1)^d.
//
// Table t partitions the torus into g^d half-open cubes of side 1/g, shifted
// by a uniform vector in [0, 1/g)^d. A point's bucket in table t is
//   c_j = floor((p_j + shift_tj) g) mod g   for every axis j.
// Because the shift is uniform, the bucket holding a fixed query is a unit
// cell (in units of 1/g) whose offset from the query is uniform, which is
// exactly the random-cell model in model.hpp.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lshmodel/rational.hpp"

namespace lshmodel::lsh {

// n points of dimension d, row-major, every coordinate in [0, 1).
class PointSet {
public:
    PointSet() = default;
    // Throws std::domain_error on size mismatch or coordinates outside [0, 1).
    PointSet(std::size_t n, std::size_t d, std::vector<double> coords);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * d_, d_};
    }
    std::span<const double> coords() const noexcept { return coords_; }

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> coords_;
};

// Reproducible i.i.d. uniform points; point i uses SplitMix64::stream(seed, i).
PointSet generate_uniform(std::size_t n, std::size_t d, std::uint64_t seed);

struct LoadedPoints {
    PointSet points;
    // Values outside [0, 1) that were reduced modulo 1.
    std::size_t wrapped_values = 0;
};

// Rows of comma-separated decimals with an optional single header line.
// Throws ParseError (with the 1-based line number) on ragged rows, non-numeric
// or non-finite fields, or an empty file.
LoadedPoints load_csv(const std::filesystem::path& path);
LoadedPoints parse_csv(std::string_view text);

struct GridConfig {
    int m = 1;                // tables
    int g = 4;                // cells per axis; cell side b = 1/g
    std::uint64_t seed = 0;   // shift draws

    // Throws std::domain_error unless 1 <= m <= 20 and g >= 2.
    void validate() const;
};

using CellKey = std::uint64_t;

class GridIndex {
public:
    // Shifts drawn from config.seed: table t uses SplitMix64::stream(seed, t).
    GridIndex(const PointSet& points, const GridConfig& config);
    // Explicit shifts (m vectors in [0, 1/g)^d); used to build degenerate
    // indexes in tests.
    GridIndex(const PointSet& points, const GridConfig& config,
              std::vector<std::vector<double>> shifts);

    const GridConfig& config() const noexcept { return config_; }
    std::size_t tables() const noexcept { return tables_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return size_; }

    std::span<const double> shift(std::size_t table) const noexcept {
        return {shifts_.data() + table * dim_, dim_};
    }

    std::vector<std::uint32_t> cell_coords(std::size_t table, std::span<const double> p) const;
    CellKey cell_key(std::size_t table, std::span<const double> p) const;

    // Ids in the bucket, ascending; empty when the bucket holds no points.
    std::span<const std::size_t> bucket(std::size_t table, CellKey key) const;
    std::size_t bucket_count(std::size_t table) const { return tables_[table].size(); }
    const std::unordered_map<CellKey, std::vector<std::size_t>>& table(std::size_t t) const {
        return tables_[t];
    }

private:
    void build(const PointSet& points);

    GridConfig config_;
    std::size_t dim_ = 0;
    std::size_t size_ = 0;
    std::vector<double> shifts_;
    std::vector<std::unordered_map<CellKey, std::vector<std::size_t>>> tables_;
};

inline GridIndex build_index(const PointSet& points, const GridConfig& config) {
    return GridIndex(points, config);
}

// Ids sharing q's bucket in at least `ell` tables, ascending.
std::vector<std::size_t> query_candidates(const GridIndex& index, std::span<const double> q,
                                          int ell);

// Toroidal max-metric range query: per axis the wrapped offset delta in
// [-1/2, 1/2) must satisfy -radius <= delta < radius. Ids ascending.
std::vector<std::size_t> range_query_bruteforce(const PointSet& points, std::span<const double> q,
                                                double radius);

struct RecallReport {
    double mean_recall = 0.0;
    double stderr_recall = 0.0;
    double mean_selectivity = 0.0;
    std::size_t queries = 0;
    // Queries whose true range was nonempty (the recall denominator).
    std::size_t scored_queries = 0;
    // Independent index builds (shift draws) the queries were spread over.
    std::size_t builds = 1;
    double predicted_recall = 0.0;
    Rational predicted_exact;
};

// Recall and selectivity of query_candidates(ell) against the range query of
// radius 1/(2g) (query side equals cell side), over `n_queries` uniform
// queries; query i uses SplitMix64::stream(seed, i). The prediction is
// p(m, ell, d). `workers` = 0 uses the OpenMP default.
RecallReport measure_recall(const GridIndex& index, const PointSet& points,
                            std::size_t n_queries, int ell, std::uint64_t seed, int workers = 0);

// Single-threaded reference. Bit-identical to measure_recall.
RecallReport measure_recall_serial(const GridIndex& index, const PointSet& points,
                                   std::size_t n_queries, int ell, std::uint64_t seed);

// With the shifts held fixed, the cells of different tables around a random
// query are not independent (their relative offsets are the shift
// differences), so a single index measures recall conditional on its shifts.
// p(m, ell, d) is the average over shift draws. This spreads `n_queries` over
// `builds` indexes whose shifts come from SplitMix64::stream(config.seed, b)
// and reports the mean of the per-build recalls with its between-build
// standard error. Requires 1 <= builds <= n_queries.
RecallReport measure_recall_rebuilt(const PointSet& points, const GridConfig& config,
                                    std::size_t n_queries, std::size_t builds, int ell,
                                    std::uint64_t seed, int workers = 0);

} // namespace lshmodel::lsh

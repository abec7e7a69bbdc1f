#include "lshmodel/grid_lsh.hpp"

#include <omp.h>

#include <algorithm>
#include <iterator>
#include <stdexcept>

#include "lshmodel/model.hpp"
#include "lshmodel/rng.hpp"
#include "lshmodel/stats.hpp"

namespace lshmodel::lsh {

namespace {

struct QueryOutcome {
    bool scored = false;
    double recall = 0.0;
    double selectivity = 0.0;
};

void validate(const GridIndex& index, const PointSet& points, std::size_t n_queries, int ell) {
    if (n_queries == 0)
        throw std::domain_error("n_queries must be positive");
    if (ell < 1 || static_cast<std::size_t>(ell) > index.tables())
        throw std::domain_error("ell must be in [1, m]");
    if (points.dim() != index.dim() || points.size() != index.size())
        throw std::domain_error("point set does not match the index");
}

QueryOutcome run_query(const GridIndex& index, const PointSet& points, int ell,
                       std::uint64_t seed, std::size_t i) {
    auto rng = SplitMix64::stream(seed, i);
    std::vector<double> q(points.dim());
    for (double& x : q)
        x = rng.uniform01();

    const double radius = 0.5 / index.config().g;
    const auto truth = range_query_bruteforce(points, q, radius);
    const auto candidates = query_candidates(index, q, ell);

    QueryOutcome out;
    out.selectivity = static_cast<double>(candidates.size()) / static_cast<double>(points.size());
    if (!truth.empty()) {
        std::size_t found = 0;
        auto c = candidates.begin();
        for (std::size_t id : truth) {
            while (c != candidates.end() && *c < id)
                ++c;
            if (c == candidates.end())
                break;
            found += *c == id ? 1 : 0;
        }
        out.scored = true;
        out.recall = static_cast<double>(found) / static_cast<double>(truth.size());
    }
    return out;
}

RecallReport summarize(const GridIndex& index, const std::vector<QueryOutcome>& outcomes, int ell) {
    RunningStats recall;
    RunningStats selectivity;
    for (const auto& o : outcomes) {
        selectivity.add(o.selectivity);
        if (o.scored)
            recall.add(o.recall);
    }
    RecallReport report;
    report.mean_recall = recall.mean;
    report.stderr_recall = recall.stderr_of_mean();
    report.mean_selectivity = selectivity.mean;
    report.queries = outcomes.size();
    report.scored_queries = recall.count;
    report.predicted_exact = model::p_at_least(index.config().m, ell, static_cast<int>(index.dim()));
    report.predicted_recall = to_double(report.predicted_exact);
    return report;
}

} // namespace

RecallReport measure_recall(const GridIndex& index, const PointSet& points, std::size_t n_queries,
                            int ell, std::uint64_t seed, int workers) {
    validate(index, points, n_queries, ell);
    std::vector<QueryOutcome> outcomes(n_queries);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(n_queries);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i)
        outcomes[static_cast<std::size_t>(i)] =
            run_query(index, points, ell, seed, static_cast<std::size_t>(i));
    return summarize(index, outcomes, ell);
}

RecallReport measure_recall_serial(const GridIndex& index, const PointSet& points,
                                   std::size_t n_queries, int ell, std::uint64_t seed) {
    validate(index, points, n_queries, ell);
    std::vector<QueryOutcome> outcomes;
    outcomes.reserve(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i)
        outcomes.push_back(run_query(index, points, ell, seed, i));
    return summarize(index, outcomes, ell);
}

RecallReport measure_recall_rebuilt(const PointSet& points, const GridConfig& config,
                                    std::size_t n_queries, std::size_t builds, int ell,
                                    std::uint64_t seed, int workers) {
    config.validate();
    if (builds == 0 || builds > n_queries)
        throw std::domain_error("builds must be in [1, n_queries]");
    if (builds == 1)
        return measure_recall(GridIndex(points, config), points, n_queries, ell, seed, workers);

    RunningStats recall;
    RunningStats selectivity;
    std::size_t scored = 0;
    RecallReport last;
    for (std::size_t b = 0; b < builds; ++b) {
        // Queries split as evenly as possible; build b gets the b-th share.
        const std::size_t share = n_queries / builds + (b < n_queries % builds ? 1 : 0);
        GridConfig build_config = config;
        build_config.seed = SplitMix64::stream(config.seed, b)();
        const GridIndex index(points, build_config);
        last = measure_recall(index, points, share, ell, SplitMix64::stream(seed, b)(), workers);
        if (last.scored_queries > 0)
            recall.add(last.mean_recall);
        selectivity.add(last.mean_selectivity);
        scored += last.scored_queries;
    }

    RecallReport report = last;
    report.mean_recall = recall.mean;
    report.stderr_recall = recall.stderr_of_mean();
    report.mean_selectivity = selectivity.mean;
    report.queries = n_queries;
    report.scored_queries = scored;
    report.builds = builds;
    return report;
}

} // namespace lshmodel::lsh

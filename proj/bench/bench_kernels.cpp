// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "lshmodel/grid_lsh.hpp"
#include "lshmodel/mc.hpp"

using namespace lshmodel;

namespace {

constexpr std::uint64_t kSamples = 1 << 16;

void BM_McSerial(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mc::mc_estimate_p_serial(m, 1, 4, kSamples, 1).mean);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kSamples));
}

void BM_McParallel(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mc::mc_estimate_p(m, 1, 4, kSamples, 1).mean);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kSamples));
}

BENCHMARK(BM_McSerial)->Arg(2)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McParallel)->Arg(2)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

struct RecallFixture {
    lsh::PointSet points = lsh::generate_uniform(100'000, 4, 3);
    lsh::GridIndex index = lsh::build_index(points, {3, 4, 5});
};

const RecallFixture& fixture() {
    static const RecallFixture f;
    return f;
}

constexpr std::size_t kQueries = 200;

void BM_RecallSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            lsh::measure_recall_serial(f.index, f.points, kQueries, 1, 7).mean_recall);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kQueries));
}

void BM_RecallParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            lsh::measure_recall(f.index, f.points, kQueries, 1, 7).mean_recall);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kQueries));
}

BENCHMARK(BM_RecallSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecallParallel)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

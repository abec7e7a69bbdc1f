#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "lshmodel/errors.hpp"
#include "lshmodel/grid_lsh.hpp"
#include "lshmodel/model.hpp"
#include "lshmodel/rng.hpp"
#include "lshmodel/stats.hpp"

using namespace lshmodel;
using namespace lshmodel::lsh;

namespace {

// Per axis, some image q_j + k (k in {-1, 0, 1}) satisfies q_j + k - r <= p_j < q_j + k + r.
std::vector<std::size_t> naive_range(const PointSet& pts, std::span<const double> q, double r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < pts.dim(); ++j) {
            bool any = false;
            for (int k = -1; k <= 1; ++k) {
                const double c = q[j] + k;
                any = any || (pts.point(i)[j] >= c - r && pts.point(i)[j] < c + r);
            }
            all = all && any;
        }
        if (all)
            out.push_back(i);
    }
    return out;
}

std::vector<double> random_query(std::size_t d, std::uint64_t seed) {
    auto rng = SplitMix64(seed);
    std::vector<double> q(d);
    for (double& x : q)
        x = rng.uniform01();
    return q;
}

} // namespace

TEST_CASE("generate_uniform") {
    const auto a = generate_uniform(10, 2, 5);
    const auto b = generate_uniform(10, 2, 5);
    CHECK(std::equal(a.coords().begin(), a.coords().end(), b.coords().begin()));

    const auto big = generate_uniform(100'000, 4, 6);
    for (double x : big.coords()) {
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
    for (std::size_t j = 0; j < 4; ++j) {
        RunningStats stats;
        for (std::size_t i = 0; i < big.size(); ++i)
            stats.add(big.point(i)[j]);
        CHECK(std::fabs(stats.mean - 0.5) <= 4.0 * stats.stderr_of_mean());
    }
    CHECK_THROWS_AS(generate_uniform(0, 2, 1), std::domain_error);
}

TEST_CASE("CSV points") {
    SUBCASE("plain rows") {
        const auto r = parse_csv("0.1,0.2\n0.3,0.4");
        CHECK(r.points.size() == 2);
        CHECK(r.points.dim() == 2);
        CHECK(r.points.point(1)[0] == 0.3);
        CHECK(r.wrapped_values == 0);
    }
    SUBCASE("header, blank lines and CRLF") {
        const auto r = parse_csv("x,y\r\n0.5,0.25\r\n\r\n0.75,0\r\n");
        CHECK(r.points.size() == 2);
        CHECK(r.points.point(1)[1] == 0.0);
    }
    SUBCASE("values reduced modulo 1") {
        const auto r = parse_csv("1.25,-0.25\n0.5,1\n");
        CHECK(r.points.point(0)[0] == 0.25);
        CHECK(r.points.point(0)[1] == 0.75);
        CHECK(r.points.point(1)[1] == 0.0);
        CHECK(r.wrapped_values == 3);
    }
    SUBCASE("errors carry the line number") {
        CHECK_THROWS_AS(parse_csv(""), ParseError);
        CHECK_THROWS_AS(parse_csv("a,b\n"), ParseError);
        try {
            parse_csv("0.1,0.2\n0.3\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
        }
        try {
            parse_csv("x,y\n0.1,0.2\n0.1,zz\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row() == 3);
        }
        CHECK_THROWS_AS(parse_csv("0.1,nan\n"), ParseError);
    }
    SUBCASE("from a file") {
        const auto path = std::filesystem::temp_directory_path() / "lshmodel_points_test.csv";
        {
            std::ofstream out(path);
            out << "a,b,c\n0.1,0.2,0.3\n0.4,0.5,0.6\n";
        }
        const auto r = load_csv(path);
        CHECK(r.points.size() == 2);
        CHECK(r.points.dim() == 3);
        std::filesystem::remove(path);
        CHECK_THROWS_AS(load_csv(path), ParseError);
    }
}

TEST_CASE("build_index") {
    SUBCASE("single point") {
        const PointSet one(1, 3, {0.1, 0.5, 0.9});
        const GridIndex index(one, {4, 4, 9});
        for (std::size_t t = 0; t < index.tables(); ++t) {
            CHECK(index.bucket_count(t) == 1);
            CHECK(index.table(t).begin()->second.size() == 1);
        }
    }
    SUBCASE("half-open cells") {
        const PointSet pts(3, 1, {0.0, 0.25, 0.999});
        const GridIndex index(pts, {1, 4, 0}, {{0.0}});
        CHECK(index.cell_coords(0, pts.point(0))[0] == 0);
        CHECK(index.cell_coords(0, pts.point(1))[0] == 1);
        CHECK(index.cell_coords(0, pts.point(2))[0] == 3);
        const GridIndex shifted(pts, {1, 4, 0}, {{0.2}});
        // 0.999 + 0.2 wraps to cell 0.
        CHECK(shifted.cell_coords(0, pts.point(2))[0] == 0);
    }
    SUBCASE("every id once per table, n/g^d per cell") {
        const auto pts = generate_uniform(100'000, 4, 12);
        const GridIndex index(pts, {3, 4, 13});
        for (std::size_t t = 0; t < 3; ++t) {
            std::vector<int> seen(pts.size(), 0);
            std::size_t total = 0;
            for (const auto& [key, ids] : index.table(t)) {
                CHECK(key < 256);
                for (std::size_t id : ids) {
                    ++seen[id];
                    CHECK(index.cell_key(t, pts.point(id)) == key);
                }
                total += ids.size();
            }
            CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
            CHECK(index.bucket_count(t) == 256);
            CHECK(static_cast<double>(total) / 256.0 == doctest::Approx(390.625));
        }
    }
    SUBCASE("configuration errors") {
        const auto pts = generate_uniform(10, 2, 1);
        CHECK_THROWS_AS(GridIndex(pts, {0, 4, 0}), std::domain_error);
        CHECK_THROWS_AS(GridIndex(pts, {21, 4, 0}), std::domain_error);
        CHECK_THROWS_AS(GridIndex(pts, {1, 1, 0}), std::domain_error);
        CHECK_THROWS_AS(GridIndex(pts, {1, 4, 0}, {{0.3, 0.0}}), std::domain_error);
        CHECK_THROWS_AS(GridIndex(pts, {2, 4, 0}, {{0.0, 0.0}}), std::domain_error);
        const auto wide = generate_uniform(2, 40, 1);
        CHECK_THROWS_AS(GridIndex(wide, {1, 4, 0}), std::domain_error);
    }
}

TEST_CASE("query_candidates") {
    const auto pts = generate_uniform(5000, 3, 21);
    const GridIndex index(pts, {4, 5, 22});

    SUBCASE("an indexed point finds itself") {
        for (std::size_t i = 0; i < pts.size(); i += 97)
            for (int ell = 1; ell <= 4; ++ell) {
                const auto c = query_candidates(index, pts.point(i), ell);
                CHECK(std::binary_search(c.begin(), c.end(), i));
            }
    }
    SUBCASE("matches per-table recomputation and is nested in ell") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto q = random_query(3, s);
            std::vector<std::vector<std::size_t>> by_ell(6);
            for (int ell = 1; ell <= 4; ++ell)
                by_ell[ell] = query_candidates(index, q, ell);
            for (int ell = 1; ell <= 4; ++ell) {
                std::vector<std::size_t> expected;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    int hits = 0;
                    for (std::size_t t = 0; t < 4; ++t)
                        hits += index.cell_coords(t, pts.point(i)) == index.cell_coords(t, q);
                    if (hits >= ell)
                        expected.push_back(i);
                }
                CHECK(by_ell[ell] == expected);
                if (ell < 4)
                    CHECK(std::includes(by_ell[ell].begin(), by_ell[ell].end(), by_ell[ell + 1].begin(),
                                        by_ell[ell + 1].end()));
            }
        }
    }
    SUBCASE("identical tables make every ell equivalent") {
        const GridIndex same(pts, {3, 5, 0}, {{0.1, 0.05, 0.0}, {0.1, 0.05, 0.0}, {0.1, 0.05, 0.0}});
        const auto q = random_query(3, 99);
        CHECK(query_candidates(same, q, 3) == query_candidates(same, q, 1));
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(query_candidates(index, pts.point(0), 0), std::domain_error);
        CHECK_THROWS_AS(query_candidates(index, pts.point(0), 5), std::domain_error);
    }
}

TEST_CASE("range_query_bruteforce") {
    SUBCASE("constructed instance") {
        const PointSet pts(4, 2, {0.5, 0.5, 0.56, 0.5, 0.98, 0.02, 0.5, 0.7});
        const double q[] = {0.5, 0.5};
        CHECK(range_query_bruteforce(pts, q, 0.061) == std::vector<std::size_t>{0, 1});
        CHECK(range_query_bruteforce(pts, q, 0.059) == std::vector<std::size_t>{0});
        // Wrap-around: 0.98 is 0.04 below 0.02 on the torus.
        const double corner[] = {0.01, 0.01};
        CHECK(range_query_bruteforce(pts, corner, 0.05) == std::vector<std::size_t>{2});
    }
    SUBCASE("half-open tie rule") {
        const PointSet pts(2, 1, {0.375, 0.625});
        const double q[] = {0.5};
        CHECK(range_query_bruteforce(pts, q, 0.125) == std::vector<std::size_t>{0});
    }
    SUBCASE("agrees with the naive image check") {
        const auto pts = generate_uniform(1000, 3, 31);
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto q = random_query(3, 1000 + s);
            for (double r : {0.05, 0.125, 0.3})
                CHECK(range_query_bruteforce(pts, q, r) == naive_range(pts, q, r));
            const auto near_self = range_query_bruteforce(pts, pts.point(s), 0.01);
            CHECK(std::binary_search(near_self.begin(), near_self.end(), s));
        }
    }
    SUBCASE("domain") {
        const auto pts = generate_uniform(3, 1, 1);
        const double q[] = {0.5};
        CHECK_THROWS_AS(range_query_bruteforce(pts, q, 0.0), std::domain_error);
        CHECK_THROWS_AS(range_query_bruteforce(pts, q, 0.5), std::domain_error);
    }
}

TEST_CASE("measure_recall") {
    SUBCASE("one table, d = 1") {
        const auto pts = generate_uniform(100'000, 1, 41);
        const GridIndex index(pts, {1, 4, 42});
        const auto r = measure_recall(index, pts, 500, 1, 43);
        CHECK(r.queries == 500);
        CHECK(r.predicted_exact == make_rational(3, 4));
        CHECK(std::fabs(r.mean_recall - 0.75) <= 0.02);
        CHECK(r.mean_selectivity == doctest::Approx(0.25).epsilon(0.02));
    }
    SUBCASE("two tables, both required, d = 1") {
        const auto pts = generate_uniform(100'000, 1, 51);
        const GridIndex index(pts, {2, 4, 52});
        const auto r = measure_recall(index, pts, 500, 2, 53);
        CHECK(std::fabs(r.mean_recall - 7.0 / 12.0) <= 0.03);
    }
    SUBCASE("parallel equals serial bit for bit") {
        const auto pts = generate_uniform(20'000, 2, 61);
        const GridIndex index(pts, {3, 4, 62});
        const auto serial = measure_recall_serial(index, pts, 300, 2, 63);
        for (int workers : {1, 2, 5}) {
            const auto par = measure_recall(index, pts, 300, 2, 63, workers);
            CHECK(par.mean_recall == serial.mean_recall);
            CHECK(par.stderr_recall == serial.stderr_recall);
            CHECK(par.mean_selectivity == serial.mean_selectivity);
        }
    }
    SUBCASE("recall grows with the number of tables") {
        std::vector<RunningStats> per_m(4);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto pts = generate_uniform(20'000, 2, 700 + seed);
            for (int m = 1; m <= 3; ++m) {
                const GridIndex index(pts, {m, 4, 800 + seed});
                per_m[m].add(measure_recall(index, pts, 200, 1, 900 + seed).mean_recall);
            }
        }
        for (int m = 1; m < 3; ++m)
            CHECK(per_m[m + 1].mean >= per_m[m].mean - 2.0 * per_m[m + 1].stderr_of_mean());
    }
    SUBCASE("fixed shifts give a conditional recall, rebuilding averages it out") {
        const auto pts = generate_uniform(20'000, 1, 81);
        // Identical shifts: both tables pick the same cell, so the union is one cell.
        const GridIndex same(pts, {2, 4, 0}, {{0.1}, {0.1}});
        const auto fixed = measure_recall(same, pts, 500, 1, 82);
        CHECK(std::fabs(fixed.mean_recall - 0.75) <= 0.02);

        const auto rebuilt = measure_recall_rebuilt(pts, {2, 4, 83}, 2000, 200, 1, 84);
        CHECK(rebuilt.builds == 200);
        CHECK(rebuilt.queries == 2000);
        CHECK(std::fabs(rebuilt.mean_recall - 11.0 / 12.0) <=
              3.0 * rebuilt.stderr_recall + 0.01);
        CHECK_THROWS_AS(measure_recall_rebuilt(pts, {2, 4, 83}, 10, 11, 1, 84), std::domain_error);
        CHECK_THROWS_AS(measure_recall_rebuilt(pts, {2, 4, 83}, 10, 0, 1, 84), std::domain_error);
    }
    SUBCASE("torus translation leaves recall unchanged") {
        const std::size_t d = 2;
        const auto pts = generate_uniform(20'000, d, 71);
        const double offset[] = {0.37, 0.81};
        std::vector<double> moved(pts.coords().begin(), pts.coords().end());
        for (std::size_t i = 0; i < moved.size(); ++i) {
            moved[i] = std::fmod(moved[i] + offset[i % d], 1.0);
            if (moved[i] >= 1.0)
                moved[i] = 0.0;
        }
        const PointSet translated(pts.size(), d, moved);

        // One fresh index per batch of queries so the shifts are re-drawn.
        auto recall_stats = [&](const PointSet& p, std::uint64_t shift_seed, bool translate) {
            RunningStats per_build;
            for (std::uint64_t b = 0; b < 60; ++b) {
                const GridIndex index(p, {2, 4, shift_seed * 1000 + b});
                RunningStats stats;
                for (std::uint64_t s = 0; s < 10; ++s) {
                    auto q = random_query(d, 5000 + b * 100 + s);
                    if (translate)
                        for (std::size_t j = 0; j < d; ++j)
                            q[j] = std::fmod(q[j] + offset[j], 1.0);
                    const auto truth = range_query_bruteforce(p, q, 0.125);
                    if (truth.empty())
                        continue;
                    const auto cand = query_candidates(index, q, 1);
                    std::vector<std::size_t> both;
                    std::set_intersection(truth.begin(), truth.end(), cand.begin(), cand.end(),
                                          std::back_inserter(both));
                    stats.add(static_cast<double>(both.size()) / static_cast<double>(truth.size()));
                }
                per_build.add(stats.mean);
            }
            return per_build;
        };
        const auto base = recall_stats(pts, 72, false);
        const auto moved_stats = recall_stats(translated, 73, true);
        INFO(base.mean << " vs " << moved_stats.mean);
        const double se = std::hypot(base.stderr_of_mean(), moved_stats.stderr_of_mean());
        CHECK(std::fabs(base.mean - moved_stats.mean) <= 4.0 * se);
    }
    SUBCASE("domain") {
        const auto pts = generate_uniform(100, 2, 1);
        const GridIndex index(pts, {2, 4, 1});
        CHECK_THROWS_AS(measure_recall(index, pts, 0, 1, 1), std::domain_error);
        CHECK_THROWS_AS(measure_recall(index, pts, 10, 3, 1), std::domain_error);
        const auto other = generate_uniform(50, 2, 1);
        CHECK_THROWS_AS(measure_recall(index, other, 10, 1, 1), std::domain_error);
    }
}

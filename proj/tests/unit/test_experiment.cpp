#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "anderson_dp/experiment.hpp"
#include "anderson_dp/mdp_io.hpp"
#include "anderson_dp/report.hpp"

using namespace anderson_dp;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.garnet.num_states = 20;
    c.garnet.num_actions = 3;
    c.garnet.branching = 2;
    c.garnet.gamma = 0.9;
    c.num_mdps = 4;
    c.num_iters = 15;
    c.m_values = {0, 2, 5};
    return c;
}

ExperimentRecord rec(std::uint64_t seed, std::size_t it, double norm, double greedy) {
    return {seed, Algorithm::VI, 0, it, norm, greedy};
}

}  // namespace

TEST_CASE("planned_runs") {
    auto c = small_config();
    const auto runs = planned_runs(c);
    const std::vector<RunKey> expected = {{Algorithm::VI, 0},
                                          {Algorithm::AndersonVI, 2},
                                          {Algorithm::AndersonVI, 5},
                                          {Algorithm::RelativeVI, 0},
                                          {Algorithm::AndersonRelativeVI, 2},
                                          {Algorithm::AndersonRelativeVI, 5}};
    CHECK(runs == expected);

    c.m_values = {3};
    c.algorithms = {Algorithm::VI};
    CHECK(planned_runs(c).empty());
}

TEST_CASE("validate") {
    CHECK_NOTHROW(validate(small_config()));
    auto c = small_config();
    c.num_mdps = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.num_iters = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.m_values.clear();
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.algorithms.clear();
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.garnet.branching = 50;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.anchor_state = 20;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.lambda_rel = -1.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("smallest run") {
    auto c = small_config();
    c.num_mdps = 1;
    c.num_iters = 1;
    c.m_values = {0};
    c.algorithms = {Algorithm::VI};
    const auto result = run_experiment(c);
    CHECK(result.failures.empty());
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].iteration == 0);
    CHECK(result.records[0].norm_error == 1.0);
    CHECK(result.records[1].iteration == 1);
    CHECK(result.records[1].norm_error < 1.0);
}

TEST_CASE("record completeness and determinism") {
    const auto c = small_config();
    const auto a = run_experiment(c);
    CHECK(a.failures.empty());
    CHECK(a.records.size() == c.num_mdps * planned_runs(c).size() * (c.num_iters + 1));
    CHECK(std::is_sorted(a.records.begin(), a.records.end(), record_order));
    for (const auto& r : a.records) {
        CHECK(std::isfinite(r.norm_error));
        CHECK(r.greedy_error >= -1e-9);
    }

    auto serial = c;
    serial.threads = 1;
    CHECK(run_experiment(serial).records == a.records);
    CHECK(run_experiment(c).records == a.records);
}

TEST_CASE("unaccelerated and m = 0 accelerated runs coincide") {
    auto c = small_config();
    c.m_values = {0};
    c.algorithms = {Algorithm::VI};
    const auto vi = run_experiment(c).records;
    // the per-seed errors must not depend on which other runs share the cohort
    auto wide = small_config();
    std::vector<ExperimentRecord> vi_only;
    for (const auto& r : run_experiment(wide).records)
        if (r.algorithm == Algorithm::VI) vi_only.push_back(r);
    CHECK(vi_only == vi);
}

TEST_CASE("dumped instances reload") {
    const auto dir = std::filesystem::temp_directory_path() / "anderson_dp_test_experiment_dump";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto c = small_config();
    c.num_mdps = 2;
    c.base_seed = 7;
    c.dump_dir = dir;
    run_experiment(c);
    auto spec = c.garnet;
    spec.seed = 8;
    CHECK(load_mdp(dir / "mdp_8.txt") == generate_garnet(spec));
    std::filesystem::remove_all(dir);
}

TEST_CASE("aggregate") {
    SUBCASE("two values") {
        const auto rows = aggregate({rec(0, 0, 1.0, 0.0), rec(1, 0, 3.0, 0.0)});
        const auto row = find_aggregate(rows, Algorithm::VI, 0, 0, Metric::NormError);
        REQUIRE(row);
        CHECK(row->mean == 2.0);
        CHECK(row->std == 1.0);
        CHECK(row->count == 2);
        CHECK(find_aggregate(rows, Algorithm::VI, 0, 0, Metric::GreedyError)->mean == 0.0);
        CHECK_FALSE(find_aggregate(rows, Algorithm::VI, 0, 1, Metric::NormError));
    }

    SUBCASE("single instance has zero spread") {
        const auto rows = aggregate({rec(0, 0, 0.37, 0.2)});
        CHECK(rows.size() == 2);
        for (const auto& r : rows) CHECK(r.std == 0.0);
    }

    SUBCASE("input order is irrelevant") {
        std::vector<ExperimentRecord> recs;
        for (std::uint64_t s = 0; s < 9; ++s)
            for (std::size_t it = 0; it < 3; ++it) recs.push_back(rec(s, it, 0.1 * (s + 1) / (it + 1), 0.01 * s));
        auto reversed = recs;
        std::reverse(reversed.begin(), reversed.end());
        const auto a = aggregate(recs);
        const auto b = aggregate(reversed);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].mean == b[i].mean);
            CHECK(a[i].std == b[i].std);
        }
    }

    SUBCASE("means recomputed from the records CSV") {
        const auto result = run_experiment(small_config());
        const auto parsed = parse_records_csv(records_csv(result.records));
        CHECK(parsed == result.records);
        const auto rows = aggregate(result.records);
        for (const auto& row : rows) {
            if (row.metric != Metric::NormError) continue;
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : parsed)
                if (r.algorithm == row.algorithm && r.m == row.m && r.iteration == row.iteration) {
                    sum += r.norm_error;
                    ++n;
                }
            CHECK(n == row.count);
            CHECK(std::abs(sum / n - row.mean) <= 1e-12);
        }
    }
}

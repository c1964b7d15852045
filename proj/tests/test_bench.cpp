#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "fsnid/bench.hpp"
#include "fsnid/errors.hpp"

using namespace fsnid;

TEST_CASE("fit_line: exact line recovers slope, intercept, r^2 = 1") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {1.0, 2.0, 4.0, 8.0}) pts.emplace_back(x, 3.0 * x + 0.5);
    const LinearFit fit = fit_line(pts);
    CHECK(fit.slope == doctest::Approx(3.0));
    CHECK(fit.intercept == doctest::Approx(0.5));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_line: noisy but linear data keeps a high r^2") {
    std::vector<std::pair<double, double>> pts = {
        {8, 0.82}, {16, 1.55}, {32, 3.1}, {64, 6.4}};
    const LinearFit fit = fit_line(pts);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.slope > 0.0);
}

TEST_CASE("run_bench: validates its inputs") {
    BenchConfig cfg;
    cfg.feature_counts = {4, 8};
    CHECK_THROWS_AS(run_bench(cfg), input_error);
    cfg.feature_counts = {8, 4, 16, 32};
    CHECK_THROWS_AS(run_bench(cfg), input_error);
}

TEST_CASE("run_bench: tiny run produces sorted points and exact call counts") {
    BenchConfig cfg;
    cfg.feature_counts = {2, 3, 4, 5};
    cfg.rows = 120;
    cfg.steps = 30;
    cfg.tail_window = 10;
    cfg.batch_size = 10;
    cfg.repeats = 2;
    cfg.timing_reps = 1;
    cfg.seed = 7;
    const BenchResult result = run_bench(cfg);
    REQUIRE(result.points.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(result.points[i].feature_count == cfg.feature_counts[i]);
        CHECK(result.points[i].phi_calls == cfg.feature_counts[i]);
        CHECK(result.points[i].seconds > 0.0);
    }

    const auto j = nlohmann::json::parse(bench_to_json(result));
    CHECK(j["points"].size() == 4);
    CHECK(j["linear_fit"].contains("r_squared"));

    const std::string csv = bench_points_csv(result);
    CHECK(csv.find("feature_count,seconds,phi_calls") == 0);
}

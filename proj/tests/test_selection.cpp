#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fsnid/errors.hpp"
#include "fsnid/selection.hpp"
#include "fsnid/synthetic.hpp"

using namespace fsnid;

namespace {

PhiEstimate phi_of(std::vector<double> runs) {
    PhiEstimate phi;
    phi.runs = std::move(runs);
    double mean = 0.0;
    for (double v : phi.runs) mean += v;
    mean /= static_cast<double>(phi.runs.size());
    double sq = 0.0;
    for (double v : phi.runs) sq += (v - mean) * (v - mean);
    phi.mean = mean;
    phi.std_dev = phi.runs.size() > 1
                      ? std::sqrt(sq / static_cast<double>(phi.runs.size() - 1))
                      : 0.0;
    return phi;
}

NullModel null_of(std::vector<double> runs) {
    const PhiEstimate phi = phi_of(std::move(runs));
    NullModel null_model;
    null_model.phi_runs = phi.runs;
    null_model.mean = phi.mean;
    null_model.std_dev = phi.std_dev;
    return null_model;
}

NullModel null_with_stats(double mean, double stddev, size_t r) {
    NullModel n;
    n.phi_runs.assign(r, mean);
    n.mean = mean;
    n.std_dev = stddev;
    return n;
}

PhiEstimate phi_with_stats(double mean, double stddev, size_t r) {
    PhiEstimate p;
    p.runs.assign(r, mean);
    p.mean = mean;
    p.std_dev = stddev;
    return p;
}

SelectionConfig quick_selection(uint64_t seed) {
    SelectionConfig cfg;
    cfg.estimator.batch_size = 64;
    cfg.estimator.steps = 2500;
    cfg.estimator.tail_window = 400;
    cfg.estimator.learning_rate = 1e-3;
    cfg.estimator.seed = seed;
    cfg.estimator.jobs = 2;
    cfg.repeats = 3;
    return cfg;
}

}  // namespace

TEST_CASE("normal_quantile: standard values") {
    CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-7));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-7));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-7));
    CHECK_THROWS_AS(normal_quantile(0.0), input_error);
}

TEST_CASE("include_test: equal means are excluded with statistic zero") {
    const auto phi = phi_with_stats(0.01, 0.005, 5);
    const auto null_model = null_with_stats(0.01, 0.004, 5);
    const InclusionResult r = include_test(phi, null_model);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK_FALSE(r.included);
}

TEST_CASE("include_test: overwhelming evidence is included") {
    const auto null_model = null_with_stats(0.01, 0.02, 5);
    const double pooled_se = std::sqrt(2.0 * 0.02 * 0.02 / 5.0);
    const auto phi = phi_with_stats(0.01 + 10.0 * pooled_se, 0.02, 5);
    const InclusionResult r = include_test(phi, null_model);
    CHECK(r.included);
    CHECK(r.statistic == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("include_test: worked example, statistic near 22.9") {
    const auto phi = phi_with_stats(0.30, 0.02, 5);
    const auto null_model = null_with_stats(0.01, 0.02, 5);
    const InclusionResult r = include_test(phi, null_model);
    CHECK(r.statistic == doctest::Approx(22.9).epsilon(0.005));
    CHECK(r.included);
}

TEST_CASE("include_test: zero pooled variance with equal means flags degenerate") {
    const auto phi = phi_with_stats(0.02, 0.0, 3);
    const auto null_model = null_with_stats(0.02, 0.0, 3);
    const InclusionResult r = include_test(phi, null_model);
    CHECK(r.degenerate);
    CHECK_FALSE(r.included);

    const auto bigger = phi_with_stats(0.5, 0.0, 3);
    const InclusionResult forced = include_test(bigger, null_model);
    CHECK(forced.included);
}

TEST_CASE("include_test: requires two runs per side") {
    const auto phi = phi_with_stats(0.1, 0.0, 1);
    const auto null_model = null_with_stats(0.0, 0.0, 5);
    CHECK_THROWS_AS(include_test(phi, null_model), input_error);
}

TEST_CASE("include_test: direct computation on empirical runs") {
    const auto phi = phi_of({0.30, 0.28, 0.33, 0.29, 0.31});
    const auto null_model = null_of({0.01, 0.02, 0.00, 0.015, 0.005});
    const InclusionResult r = include_test(phi, null_model);
    const double expected =
        (phi.mean - null_model.mean) /
        std::sqrt(phi.std_dev * phi.std_dev / 5.0 + null_model.std_dev * null_model.std_dev / 5.0);
    CHECK(r.statistic == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("orders: defaults and permutations cover every feature") {
    const auto def = default_order(5);
    CHECK(def == std::vector<size_t>{0, 1, 2, 3, 4});
    const auto perm = permuted_order(5, 3);
    auto sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == def);
    CHECK(permuted_order(5, 3) == perm);  // seeded
}

TEST_CASE("build_null: deterministic and centered near zero") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::perfectly_redundant_pair;
    spec.rows = 1200;
    spec.seed = 40;
    const Dataset d = generate(spec).data;
    SelectionConfig cfg = quick_selection(11);
    cfg.estimator.steps = 600;
    cfg.estimator.tail_window = 150;

    const NullModel a = build_null(d, cfg.estimator, 3);
    const NullModel b = build_null(d, cfg.estimator, 3);
    CHECK(a.phi_runs == b.phi_runs);
    CHECK(std::abs(a.mean) <= 0.05);
    CHECK(a.phi_runs.size() == 3);

    const NullModel single = build_null(d, cfg.estimator, 1);
    CHECK(single.degenerate);
    CHECK(single.std_dev == 0.0);
}

TEST_CASE("run_fsnid: argument validation") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::irrelevant;
    spec.rows = 300;
    spec.noise_features = 2;
    spec.seed = 41;
    Dataset d = generate(spec).data;
    const SelectionConfig cfg = quick_selection(12);

    CHECK_THROWS_AS(run_fsnid(d, cfg, std::vector<size_t>{0}), input_error);
    CHECK_THROWS_AS(run_fsnid(d, cfg, std::vector<size_t>{0, 0}), input_error);

    Dataset single_class = d;
    std::fill(single_class.labels.begin(), single_class.labels.end(), 0);
    single_class.class_names = {"only"};
    CHECK_THROWS_AS(run_fsnid(single_class, cfg), input_error);
}

TEST_CASE("run_fsnid: pure noise is rejected, report structure holds") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::irrelevant;
    spec.rows = 2000;
    spec.noise_features = 3;
    spec.seed = 42;
    const Dataset d = generate(spec).data;
    const SelectionConfig cfg = quick_selection(13);
    const SelectionReport report = run_fsnid(d, cfg);

    CHECK(report.decisions.size() == 3);
    CHECK(report.phi_calls == 3);
    CHECK(report.selected.size() <= 1);  // noise occasionally sneaks past the test
    for (const auto& dec : report.decisions) {
        const bool in_selected =
            std::find(report.selected.begin(), report.selected.end(), dec.feature_index) !=
            report.selected.end();
        CHECK(in_selected == dec.included);
    }
}

TEST_CASE("run_fsnid: perfectly redundant pair keeps exactly one, either order") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::perfectly_redundant_pair;
    spec.rows = 3000;
    spec.seed = 43;
    const Dataset d = generate(spec).data;
    const SelectionConfig cfg = quick_selection(14);

    const SelectionReport forward = run_fsnid(d, cfg, {0, 1});
    CHECK(forward.selected.size() == 1);

    const SelectionReport reverse = run_fsnid(d, cfg, {1, 0});
    CHECK(reverse.selected.size() == 1);

    // the survivor carries the full oracle information
    for (const SelectionReport* rep : {&forward, &reverse}) {
        const double full = plugin_mi(d, {0, 1});
        CHECK(plugin_mi(d, rep->selected) >= full - 0.05);
    }
}

TEST_CASE("run_fsnid: xor synergy keeps the pair, drops the noise") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::xor_synergy;
    spec.rows = 3000;
    spec.noise_features = 1;
    spec.seed = 44;
    const Dataset d = generate(spec).data;
    const SelectionConfig cfg = quick_selection(1);
    const SelectionReport report = run_fsnid(d, cfg);
    CHECK(report.selected == std::vector<size_t>{0, 1});
    CHECK(report.phi_calls == 3);
}

TEST_CASE("report JSON: pinned field names and seconds masking") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::irrelevant;
    spec.rows = 400;
    spec.noise_features = 1;
    spec.seed = 45;
    const Dataset d = generate(spec).data;
    SelectionConfig cfg = quick_selection(16);
    cfg.estimator.steps = 300;
    cfg.estimator.tail_window = 100;
    const SelectionReport report = run_fsnid(d, cfg);

    const std::string json_text = report_to_json(report);
    const auto j = nlohmann::json::parse(json_text);
    REQUIRE(j.contains("selected"));
    REQUIRE(j.contains("decisions"));
    REQUIRE(j.contains("null"));
    REQUIRE(j.contains("config"));
    REQUIRE(j.contains("seconds"));
    REQUIRE(j["decisions"].is_array());
    REQUIRE(j["decisions"].size() == 1);
    for (const char* key : {"name", "phi_mean", "phi_std", "statistic", "included"}) {
        CHECK(j["decisions"][0].contains(key));
    }
    CHECK(j["null"].contains("mean"));
    CHECK(j["null"].contains("std"));

    // identical runs differ only in the seconds field
    const SelectionReport again = run_fsnid(d, cfg);
    CHECK(mask_seconds(report_to_json(report)) == mask_seconds(report_to_json(again)));
}

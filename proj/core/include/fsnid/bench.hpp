#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsnid/selection.hpp"

namespace fsnid {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct BenchPoint {
    size_t feature_count = 0;
    double seconds = 0.0;
    size_t phi_calls = 0;
    size_t selected_count = 0;
};

struct BenchResult {
    std::vector<BenchPoint> points;  // sorted by feature_count
    LinearFit fit;
};

struct BenchConfig {
    std::vector<size_t> feature_counts = {8, 16, 32, 64};
    size_t rows = 500;
    size_t batch_size = 10;    // reduced budget
    size_t steps = 100;        // reduced budget
    size_t tail_window = 50;
    size_t repeats = 3;
    double learning_rate = 1e-4;
    uint64_t seed = 0;
    bool temporal = false;
    size_t sequence_length = 10;
    size_t timing_reps = 3;    // median-of per point
};

LinearFit fit_line(const std::vector<std::pair<double, double>>& points);

// Times run_fsnid on independent binary data per feature count, single
// threaded, data generation excluded from the clock.
BenchResult run_bench(const BenchConfig& cfg);

std::string bench_to_json(const BenchResult& result, int indent = 2);
std::string bench_points_csv(const BenchResult& result);

}  // namespace fsnid

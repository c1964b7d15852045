#include "fsnid/bench.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <json.hpp>

#include "fsnid/errors.hpp"
#include "fsnid/synthetic.hpp"

namespace fsnid {

LinearFit fit_line(const std::vector<std::pair<double, double>>& points) {
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    LinearFit fit;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    const double mean_y = sy / n;
    double ss_tot = 0.0;
    for (const auto& [x, y] : points) {
        const double pred = fit.slope * x + fit.intercept;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

BenchResult run_bench(const BenchConfig& cfg) {
    if (cfg.feature_counts.size() < 4) {
        throw input_error("bench requires at least 4 feature counts");
    }
    if (!std::is_sorted(cfg.feature_counts.begin(), cfg.feature_counts.end())) {
        throw input_error("bench feature counts must be ascending");
    }

    SelectionConfig sel;
    sel.estimator.batch_size = cfg.batch_size;
    sel.estimator.steps = cfg.steps;
    sel.estimator.tail_window = std::min(cfg.tail_window, cfg.steps);
    sel.estimator.learning_rate = cfg.learning_rate;
    sel.estimator.temporal = cfg.temporal;
    sel.estimator.sequence_length = cfg.sequence_length;
    sel.estimator.jobs = 1;  // timings must be comparable
    sel.repeats = cfg.repeats;

    BenchResult result;
    for (size_t count : cfg.feature_counts) {
        SyntheticSpec spec;
        spec.kind = SyntheticKind::bench_binary;
        spec.rows = cfg.rows;
        spec.noise_features = count;
        spec.seed = mix_seed(cfg.seed, count);
        const GeneratedData data = generate(spec);

        BenchPoint point;
        point.feature_count = count;
        std::vector<double> times;
        for (size_t rep = 0; rep < std::max<size_t>(1, cfg.timing_reps); ++rep) {
            sel.estimator.seed = mix_seed(cfg.seed, count, rep);
            const auto start = std::chrono::steady_clock::now();
            const SelectionReport report = run_fsnid(data.data, sel);
            times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
            point.phi_calls = report.phi_calls;
            point.selected_count = report.selected.size();
        }
        std::sort(times.begin(), times.end());
        point.seconds = times[times.size() / 2];
        result.points.push_back(point);
    }

    std::vector<std::pair<double, double>> xy;
    for (const auto& p : result.points) {
        xy.emplace_back(static_cast<double>(p.feature_count), p.seconds);
    }
    result.fit = fit_line(xy);
    return result;
}

std::string bench_to_json(const BenchResult& result, int indent) {
    nlohmann::ordered_json j;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : result.points) {
        j["points"].push_back({{"feature_count", p.feature_count},
                               {"seconds", p.seconds},
                               {"phi_calls", p.phi_calls},
                               {"selected", p.selected_count}});
    }
    j["linear_fit"] = {{"slope", result.fit.slope},
                       {"intercept", result.fit.intercept},
                       {"r_squared", result.fit.r_squared}};
    return j.dump(indent);
}

std::string bench_points_csv(const BenchResult& result) {
    std::ostringstream out;
    out << "feature_count,seconds,phi_calls\n";
    for (const auto& p : result.points) {
        out << p.feature_count << ',' << p.seconds << ',' << p.phi_calls << '\n';
    }
    return out.str();
}

}  // namespace fsnid

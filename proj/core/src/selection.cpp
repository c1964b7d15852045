#include "fsnid/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fsnid/errors.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

namespace {
constexpr uint64_t kNullSalt = 0x4e4d5341u;  // distinct stream for the null model
}

NullModel build_null(const Dataset& d, const EstimatorConfig& cfg, size_t repeats, uint64_t salt) {
    Dataset augmented = d;
    const size_t n = d.rows();
    const size_t k = d.feature_count();
    augmented.feature_names.push_back("__null_model__");
    augmented.features = Matrix(n, k + 1);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < k; ++c) augmented.features(r, c) = d.features(r, c);
    }

    std::vector<size_t> cols(k + 1);
    std::iota(cols.begin(), cols.end(), size_t{0});

    // Fresh NM column per repeat: the null distribution has to cover the
    // draw-to-draw luck of an uninformative feature, not just estimator noise
    // around one frozen draw.
    NullModel null_model;
    null_model.phi_runs.reserve(repeats);
    for (size_t rep = 0; rep < repeats; ++rep) {
        Rng rng(mix_seed(cfg.seed, kNullSalt, salt, rep));
        for (size_t r = 0; r < n; ++r) augmented.features(r, k) = rng.normal();
        const PhiEstimate phi =
            estimate_phi(augmented, cols, k, cfg, 1, mix_seed(kNullSalt, salt, rep));
        null_model.phi_runs.push_back(phi.runs[0]);
    }

    double mean = 0.0;
    for (double v : null_model.phi_runs) mean += v;
    mean /= static_cast<double>(repeats);
    double sq = 0.0;
    for (double v : null_model.phi_runs) sq += (v - mean) * (v - mean);
    null_model.mean = mean;
    null_model.std_dev =
        repeats > 1 ? std::sqrt(sq / static_cast<double>(repeats - 1)) : 0.0;
    null_model.degenerate = repeats < 2;
    return null_model;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw input_error("normal quantile requires p in (0,1)");
    // Acklam's rational approximation, |relative error| < 1.2e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
}

InclusionResult include_test(const PhiEstimate& phi, const NullModel& null_model, double alpha) {
    if (phi.runs.size() < 2 || null_model.phi_runs.size() < 2) {
        throw input_error("include_test requires at least 2 runs on each side");
    }
    const double r_i = static_cast<double>(phi.runs.size());
    const double r_0 = static_cast<double>(null_model.phi_runs.size());
    const double se = std::sqrt(phi.std_dev * phi.std_dev / r_i +
                                null_model.std_dev * null_model.std_dev / r_0);
    const double delta = phi.mean - null_model.mean;

    InclusionResult result;
    if (se == 0.0) {
        if (delta == 0.0) {
            result.degenerate = true;
            result.statistic = 0.0;
            result.included = false;
            return result;
        }
        result.statistic = delta > 0.0 ? 1e12 : -1e12;
    } else {
        result.statistic = delta / se;
    }
    result.included = result.statistic > normal_quantile(1.0 - alpha);
    return result;
}

std::vector<size_t> default_order(size_t n_features) {
    std::vector<size_t> order(n_features);
    std::iota(order.begin(), order.end(), size_t{0});
    return order;
}

std::vector<size_t> permuted_order(size_t n_features, uint64_t seed) {
    std::vector<size_t> order = default_order(n_features);
    Rng rng(mix_seed(seed, 0x4f524452u));
    rng.shuffle(order);
    return order;
}

SelectionReport run_fsnid(const Dataset& d, const SelectionConfig& cfg,
                          const std::vector<size_t>& order) {
    if (d.feature_count() == 0) throw input_error("run_fsnid requires at least one feature");
    if (d.class_count() < 2) {
        throw input_error("run_fsnid requires at least 2 classes, got " +
                          std::to_string(d.class_count()));
    }
    if (order.size() != d.feature_count()) {
        throw input_error("visitation order must cover every feature exactly once");
    }
    {
        std::vector<size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != i) {
                throw input_error("visitation order must cover every feature exactly once");
            }
        }
    }
    if (cfg.repeats < 2) throw input_error("selection requires at least 2 repeats");

    const auto start = std::chrono::steady_clock::now();
    SelectionReport report;
    report.config = cfg;
    report.order = order;
    report.null_model = build_null(d, cfg.estimator, cfg.repeats);

    std::vector<size_t> working = default_order(d.feature_count());
    for (size_t i : order) {
        const PhiEstimate phi = estimate_phi(d, working, i, cfg.estimator, cfg.repeats, i + 1);
        report.phi_calls += 1;
        const InclusionResult test = include_test(phi, report.null_model, cfg.alpha);

        Decision decision;
        decision.feature_name = d.feature_names[i];
        decision.feature_index = i;
        decision.phi = phi;
        decision.included = test.included;
        decision.statistic = test.statistic;
        report.decisions.push_back(std::move(decision));

        if (test.included) {
            report.selected.push_back(i);
        } else {
            working.erase(std::remove(working.begin(), working.end(), i), working.end());
        }
    }
    std::sort(report.selected.begin(), report.selected.end());
    for (size_t i : report.selected) report.selected_names.push_back(d.feature_names[i]);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

SelectionReport run_fsnid(const Dataset& d, const SelectionConfig& cfg) {
    return run_fsnid(d, cfg, default_order(d.feature_count()));
}

std::string report_to_json(const SelectionReport& report, int indent) {
    nlohmann::ordered_json j;
    j["selected"] = report.selected_names;
    j["decisions"] = nlohmann::ordered_json::array();
    for (const auto& d : report.decisions) {
        nlohmann::ordered_json entry;
        entry["name"] = d.feature_name;
        entry["phi_mean"] = d.phi.mean;
        entry["phi_std"] = d.phi.std_dev;
        entry["statistic"] = d.statistic;
        entry["included"] = d.included;
        j["decisions"].push_back(std::move(entry));
    }
    j["null"] = {{"mean", report.null_model.mean}, {"std", report.null_model.std_dev}};
    const auto& est = report.config.estimator;
    j["config"] = {{"batch_size", est.batch_size},
                   {"steps", est.steps},
                   {"tail_window", est.tail_window},
                   {"learning_rate", est.learning_rate},
                   {"seed", est.seed},
                   {"temporal", est.temporal},
                   {"sequence_length", est.sequence_length},
                   {"hidden", est.hidden},
                   {"repeats", report.config.repeats},
                   {"alpha", report.config.alpha}};
    j["seconds"] = report.seconds;
    return j.dump(indent);
}

std::string mask_seconds(const std::string& report_json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(report_json);
    if (j.contains("seconds")) j["seconds"] = 0.0;
    return j.dump(2);
}

}  // namespace fsnid

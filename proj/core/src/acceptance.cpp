#include "fsnid/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fsnid/bench.hpp"
#include "fsnid/classifier.hpp"
#include "fsnid/dataset.hpp"
#include "fsnid/errors.hpp"
#include "fsnid/mi_estimator.hpp"
#include "fsnid/selection.hpp"
#include "fsnid/synthetic.hpp"

// Pinned desk-scale acceptance checks. Every tolerance below is fixed here;
// suite files only name which checks to run.

namespace fsnid {

namespace {

size_t worker_count() { return std::max(2u, std::thread::hardware_concurrency()); }

EstimatorConfig fast_estimator(uint64_t seed) {
    EstimatorConfig cfg;
    cfg.batch_size = 64;
    cfg.steps = 2500;
    cfg.tail_window = 400;
    cfg.learning_rate = 1e-3;
    cfg.seed = seed;
    cfg.jobs = worker_count();
    return cfg;
}

SelectionConfig fast_selection(uint64_t seed) {
    SelectionConfig cfg;
    cfg.estimator = fast_estimator(seed);
    cfg.repeats = 5;  // fewer repeats leave the null model fragile
    return cfg;
}

SelectionConfig temporal_selection(uint64_t seed) {
    SelectionConfig cfg;
    cfg.estimator = fast_estimator(seed);
    cfg.estimator.batch_size = 24;
    cfg.estimator.steps = 1200;
    cfg.estimator.tail_window = 300;
    cfg.estimator.temporal = true;
    cfg.estimator.sequence_length = 10;
    cfg.repeats = 5;
    return cfg;
}

GeneratedData suite_data(SyntheticKind kind, size_t rows, size_t noise, uint64_t seed) {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.rows = rows;
    spec.noise_features = noise;
    spec.seed = seed;
    return generate(spec);
}

struct Failure {
    std::ostringstream msg;
    bool any = false;
    void operator()(const std::string& line) {
        if (any) msg << "; ";
        msg << line;
        any = true;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// DV-estimator fidelity on Y = X fair binary
CheckResult check_dv_fidelity() {
    CheckResult result{"dv-estimator-fidelity", false, 0.0, ""};
    const GeneratedData g = suite_data(SyntheticKind::perfectly_redundant_pair, 4000, 0, 101);
    constexpr double kLow = 0.55, kHigh = 0.72, kSeedBudget = 120.0;

    Failure fail;
    size_t in_window = 0;
    std::ostringstream values;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        EstimatorConfig cfg = fast_estimator(seed);
        cfg.batch_size = 100;
        cfg.steps = 3000;
        cfg.tail_window = 500;
        const auto t0 = std::chrono::steady_clock::now();
        const MiEstimate est = estimate_mi(g.data, {0}, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        values << fmt(est.value) << ' ';
        if (est.value >= kLow && est.value <= kHigh) ++in_window;
        if (secs > kSeedBudget) fail("seed " + std::to_string(seed) + " exceeded 120s");
    }
    if (in_window < 4) fail("only " + std::to_string(in_window) + "/5 seeds in [0.55,0.72]");
    result.detail = "estimates: " + values.str() + "(true ln2=0.6931), " +
                    std::to_string(in_window) + "/5 in window";
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// all-noise data: nothing should survive selection
CheckResult check_irrelevance_rejection() {
    CheckResult result{"irrelevance-rejection", false, 0.0, ""};
    constexpr double kBudget = 600.0;
    const GeneratedData g = suite_data(SyntheticKind::irrelevant, 4000, 5, 102);

    const auto t0 = std::chrono::steady_clock::now();
    size_t empty_runs = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const SelectionReport rep = run_fsnid(g.data, fast_selection(seed));
        if (rep.selected.empty()) ++empty_runs;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Failure fail;
    if (empty_runs < 9) fail("only " + std::to_string(empty_runs) + "/10 runs selected 0 features");
    if (secs > kBudget) fail("took " + fmt(secs) + "s > 600s");
    result.detail = std::to_string(empty_runs) + "/10 runs empty, " + fmt(secs) + "s";
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// a perfectly correlated pair resolves to a single survivor
CheckResult check_redundancy_resolution() {
    CheckResult result{"perfect-redundancy-resolution", false, 0.0, ""};
    const GeneratedData g = suite_data(SyntheticKind::perfectly_redundant_pair, 4000, 0, 103);
    const double full_mi = plugin_mi(g.data, {0, 1});

    Failure fail;
    std::ostringstream detail;
    const std::vector<std::vector<size_t>> orders = {{0, 1}, {1, 0}};
    for (size_t o = 0; o < orders.size(); ++o) {
        size_t exactly_one = 0;
        for (uint64_t seed = 1; seed <= 10; ++seed) {
            const SelectionReport rep = run_fsnid(g.data, fast_selection(seed + 20 * o), orders[o]);
            const bool one_of_pair =
                rep.selected.size() == 1 && (rep.selected[0] == 0 || rep.selected[0] == 1);
            if (!one_of_pair) continue;
            if (plugin_mi(g.data, rep.selected) < full_mi - 0.05) {
                fail("order " + std::to_string(o) + " seed " + std::to_string(seed) +
                     ": selected set loses oracle MI");
                continue;
            }
            ++exactly_one;
        }
        detail << "order" << o << ": " << exactly_one << "/10 ";
        if (exactly_one < 9) {
            fail("order " + std::to_string(o) + ": only " + std::to_string(exactly_one) +
                 "/10 runs kept exactly one of the pair");
        }
    }
    result.detail = detail.str();
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// synergy: the xor pair is kept, noise is dropped
CheckResult check_synergy_detection() {
    CheckResult result{"synergy-detection", false, 0.0, ""};
    constexpr double kBudget = 900.0, kPhiLow = 0.5, kPhiHigh = 0.72;
    // 20k rows keep the frozen chance dependence of the binary noise columns
    // well below what the estimator can resolve
    const GeneratedData g = suite_data(SyntheticKind::xor_synergy, 20000, 3, 104);

    const auto t0 = std::chrono::steady_clock::now();
    Failure fail;
    size_t pair_runs = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const SelectionReport rep = run_fsnid(g.data, fast_selection(seed));
        if (rep.selected != std::vector<size_t>{0, 1}) continue;
        bool phis_ok = true;
        for (const auto& dec : rep.decisions) {
            if (dec.feature_index > 1) continue;
            if (dec.phi.mean < kPhiLow || dec.phi.mean > kPhiHigh) {
                phis_ok = false;
                fail("seed " + std::to_string(seed) + ": phi(" + dec.feature_name + ")=" +
                     fmt(dec.phi.mean) + " outside [0.5,0.72]");
            }
        }
        if (phis_ok) ++pair_runs;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (pair_runs < 9) {
        fail("only " + std::to_string(pair_runs) + "/10 runs selected exactly {x1,x2}");
    }
    if (secs > kBudget) fail("took " + fmt(secs) + "s > 900s");
    result.detail = std::to_string(pair_runs) + "/10 runs selected {x1,x2}, " + fmt(secs) + "s";
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// temporal advantage on parity data
CheckResult check_temporal_advantage() {
    CheckResult result{"temporal-advantage", false, 0.0, ""};
    const GeneratedData g = suite_data(SyntheticKind::parity_temporal, 3000, 0, 105);

    Failure fail;
    size_t advantage_runs = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const SelectionReport st = run_fsnid(g.data, fast_selection(seed));
        const SelectionReport tp = run_fsnid(g.data, temporal_selection(seed));
        const bool static_rejects = st.selected.empty();
        const bool temporal_selects =
            std::find(tp.selected.begin(), tp.selected.end(), size_t{0}) != tp.selected.end();
        if (static_rejects && temporal_selects) ++advantage_runs;
    }
    if (advantage_runs < 8) {
        fail("temporal advantage in only " + std::to_string(advantage_runs) + "/10 runs");
    }

    const SplitDataset s = split(g.data, 0.8);
    ClassifierConfig seq_cfg;
    seq_cfg.epochs = 300;
    seq_cfg.batch_size = 16;
    seq_cfg.seed = 17;
    seq_cfg.sequence_length = 10;
    const double seq_acc =
        evaluate_sequence(train_sequence_classifier(s.train, {0}, seq_cfg), s.test).accuracy;
    ClassifierConfig dense_cfg;
    dense_cfg.epochs = 100;
    dense_cfg.batch_size = 50;
    dense_cfg.seed = 18;
    const double dense_acc =
        evaluate(train_classifier(s.train, {0}, dense_cfg), s.test).accuracy;
    if (seq_acc < 0.9) fail("sequence classifier accuracy " + fmt(seq_acc) + " < 0.9");
    if (dense_acc > 0.6) fail("dense classifier accuracy " + fmt(dense_acc) + " > 0.6");

    result.detail = std::to_string(advantage_runs) + "/10 runs, seq acc " + fmt(seq_acc) +
                    ", dense acc " + fmt(dense_acc);
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// classification sufficiency of the selected subset
CheckResult check_classification_sufficiency() {
    CheckResult result{"classification-sufficiency", false, 0.0, ""};
    constexpr double kGap = 0.03;
    Failure fail;
    std::ostringstream detail;

    struct StaticSuite {
        SyntheticKind kind;
        size_t rows, noise;
        const char* name;
    };
    const StaticSuite suites[] = {
        {SyntheticKind::perfectly_redundant_pair, 4000, 1, "perfectly-redundant-pair"},
        {SyntheticKind::redundant_pair, 6000, 1, "redundant-pair"},
        {SyntheticKind::xor_synergy, 4000, 3, "xor-synergy"},
    };
    for (const auto& suite : suites) {
        const GeneratedData g = suite_data(suite.kind, suite.rows, suite.noise, 106);
        const SelectionReport rep = run_fsnid(g.data, fast_selection(3));
        if (rep.selected.empty()) {
            fail(std::string(suite.name) + ": empty selection");
            continue;
        }
        const SplitDataset s = split(g.data, 0.8);
        std::vector<size_t> all(g.data.feature_count());
        std::iota(all.begin(), all.end(), size_t{0});
        ClassifierConfig cfg;
        cfg.epochs = 100;
        cfg.batch_size = 50;
        cfg.seed = 7;
        const double full_acc = evaluate(train_classifier(s.train, all, cfg), s.test).accuracy;
        const double sub_acc =
            evaluate(train_classifier(s.train, rep.selected, cfg), s.test).accuracy;
        detail << suite.name << " " << fmt(full_acc) << "/" << fmt(sub_acc) << " ";
        if (std::abs(full_acc - sub_acc) > kGap) {
            fail(std::string(suite.name) + ": |" + fmt(full_acc) + " - " + fmt(sub_acc) +
                 "| > 0.03");
        }
    }

    // temporal suite, sequence classifier on the temporally selected subset
    {
        const GeneratedData g = suite_data(SyntheticKind::parity_temporal, 3000, 1, 107);
        const SelectionReport rep = run_fsnid(g.data, temporal_selection(3));
        if (rep.selected.empty()) {
            fail("parity-temporal: empty selection");
        } else {
            const SplitDataset s = split(g.data, 0.8);
            std::vector<size_t> all(g.data.feature_count());
            std::iota(all.begin(), all.end(), size_t{0});
            ClassifierConfig cfg;
            cfg.epochs = 400;
            cfg.batch_size = 8;
            cfg.seed = 9;
            cfg.sequence_length = 10;
            const double full_acc =
                evaluate_sequence(train_sequence_classifier(s.train, all, cfg), s.test).accuracy;
            const double sub_acc =
                evaluate_sequence(train_sequence_classifier(s.train, rep.selected, cfg), s.test)
                    .accuracy;
            detail << "parity-temporal " << fmt(full_acc) << "/" << fmt(sub_acc);
            if (std::abs(full_acc - sub_acc) > kGap) {
                fail("parity-temporal: |" + fmt(full_acc) + " - " + fmt(sub_acc) + "| > 0.03");
            }
        }
    }

    result.detail = detail.str();
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// linear scaling of the selection loop
CheckResult check_linear_scaling() {
    CheckResult result{"linear-scaling", false, 0.0, ""};
    constexpr double kBudget = 1200.0;
    const auto t0 = std::chrono::steady_clock::now();

    BenchConfig cfg;
    cfg.feature_counts = {8, 16, 32, 64};
    cfg.rows = 500;
    cfg.batch_size = 10;
    cfg.steps = 100;
    cfg.tail_window = 50;
    cfg.repeats = 3;
    cfg.timing_reps = 5;
    cfg.seed = 108;
    const BenchResult bench = run_bench(cfg);

    Failure fail;
    for (size_t i = 0; i < bench.points.size(); ++i) {
        if (bench.points[i].phi_calls != cfg.feature_counts[i]) {
            fail("phi call count " + std::to_string(bench.points[i].phi_calls) + " != " +
                 std::to_string(cfg.feature_counts[i]));
        }
    }
    const double ratio = bench.points[3].seconds / bench.points[2].seconds;
    if (bench.fit.r_squared < 0.95) fail("r^2 " + fmt(bench.fit.r_squared) + " < 0.95");
    if (ratio < 1.6 || ratio > 2.6) fail("seconds(64)/seconds(32) = " + fmt(ratio) +
                                         " outside [1.6,2.6]");

    // temporal variant stays linear with a larger slope
    BenchConfig tcfg = cfg;
    tcfg.temporal = true;
    tcfg.repeats = 2;
    tcfg.timing_reps = 1;
    const BenchResult tbench = run_bench(tcfg);
    if (tbench.fit.r_squared < 0.95) {
        fail("temporal r^2 " + fmt(tbench.fit.r_squared) + " < 0.95");
    }
    if (tbench.fit.slope <= bench.fit.slope) fail("temporal slope not larger");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kBudget) fail("took " + fmt(secs) + "s > 1200s");

    result.detail = "r2=" + fmt(bench.fit.r_squared) + " ratio64/32=" + fmt(ratio) +
                    " temporal r2=" + fmt(tbench.fit.r_squared) + " slopes " +
                    fmt(bench.fit.slope) + "/" + fmt(tbench.fit.slope);
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// gradient integrity via central finite differences
CheckResult check_gradient_integrity() {
    CheckResult result{"gradient-integrity", false, 0.0, ""};
    constexpr double kBudget = 60.0;
    const auto t0 = std::chrono::steady_clock::now();
    Failure fail;

    auto rel_err_ok = [](double analytic, double numeric, double tol) {
        const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        return std::abs(analytic - numeric) / scale <= tol;
    };

    Rng rng(109);
    size_t dense_bad = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const size_t in = 1 + rng.index(6);
        DenseParams p = DenseParams::init(in, rng, 10);
        std::vector<double> x(in);
        for (double& v : x) v = rng.uniform(-1.5, 1.5);
        DenseParams grad = DenseParams::zeros(in, 10);
        dense_backward(p, x, 1.0, grad);
        auto pv = p.views();
        auto gv = grad.views();
        for (size_t v = 0; v < pv.size(); ++v) {
            for (size_t k = 0; k < pv[v].size(); ++k) {
                const double saved = pv[v][k];
                pv[v][k] = saved + 1e-5;
                const double up = dense_forward(p, x);
                pv[v][k] = saved - 1e-5;
                const double down = dense_forward(p, x);
                pv[v][k] = saved;
                if (!rel_err_ok(gv[v][k], (up - down) / 2e-5, 1e-4)) ++dense_bad;
            }
        }
    }
    if (dense_bad > 0) fail(std::to_string(dense_bad) + " dense coordinates failed at 1e-4");

    size_t rec_bad = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const size_t in = 1 + rng.index(3);
        const size_t steps = rep % 2 == 0 ? 10 : 1 + rng.index(5);
        RecurrentParams p = RecurrentParams::init(in, rng, 3);
        Matrix seq(steps, in);
        for (double& v : seq.flat()) v = rng.uniform(-1.0, 1.0);
        RecurrentParams grad = RecurrentParams::zeros(in, 3);
        recurrent_backward(p, seq, 1.0, grad);
        auto pv = p.views();
        auto gv = grad.views();
        for (size_t v = 0; v < pv.size(); ++v) {
            for (size_t k = 0; k < pv[v].size(); ++k) {
                const double saved = pv[v][k];
                pv[v][k] = saved + 1e-5;
                const double up = recurrent_forward(p, seq);
                pv[v][k] = saved - 1e-5;
                const double down = recurrent_forward(p, seq);
                pv[v][k] = saved;
                if (!rel_err_ok(gv[v][k], (up - down) / 2e-5, 1e-3)) ++rec_bad;
            }
        }
    }
    if (rec_bad > 0) fail(std::to_string(rec_bad) + " recurrent coordinates failed at 1e-3");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kBudget) fail("took " + fmt(secs) + "s > 60s");
    result.detail = "20 draws per architecture, " + fmt(secs) + "s";
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// NSL-KDD-format smoke test
CheckResult check_realdata_smoke() {
    CheckResult result{"realdata-smoke", false, 0.0, ""};
    constexpr double kBudget = 3600.0;
    const auto t0 = std::chrono::steady_clock::now();

    const std::string path =
        (std::filesystem::temp_directory_path() / "fsnid_nslkdd_sample.csv").string();
    write_nslkdd_sample(path, 6000, 110);
    const Dataset raw = load_csv(path, "label", std::string("normal"));
    std::filesystem::remove(path);

    Failure fail;
    if (raw.feature_count() != 41) {
        fail("expected 41 features, got " + std::to_string(raw.feature_count()));
    }

    const NormalizeResult norm = normalize(raw);
    SelectionConfig cfg = fast_selection(5);
    cfg.estimator.batch_size = 64;
    cfg.estimator.steps = 1200;
    cfg.estimator.tail_window = 300;
    const SelectionReport rep = run_fsnid(norm.data, cfg);
    if (rep.selected.empty() || rep.selected.size() >= 41) {
        fail("selected " + std::to_string(rep.selected.size()) + " features, need 1..40");
    }

    const SplitDataset parts = split(raw, 0.8);
    const ColumnStats stats = compute_stats(parts.train);
    const Dataset train = apply_stats(parts.train, stats).data;
    const Dataset test = apply_stats(parts.test, stats).data;
    std::vector<size_t> all(train.feature_count());
    std::iota(all.begin(), all.end(), size_t{0});
    ClassifierConfig ccfg;
    ccfg.epochs = 60;
    ccfg.batch_size = 100;
    ccfg.seed = 11;
    const double full_acc = evaluate(train_classifier(train, all, ccfg), test).accuracy;
    const double sub_acc =
        rep.selected.empty()
            ? 0.0
            : evaluate(train_classifier(train, rep.selected, ccfg), test).accuracy;
    if (std::abs(full_acc - sub_acc) > 0.05) {
        fail("accuracy gap |" + fmt(full_acc) + " - " + fmt(sub_acc) + "| > 0.05");
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kBudget) fail("took " + fmt(secs) + "s > 3600s");
    result.detail = "selected " + std::to_string(rep.selected.size()) + "/41, acc full " +
                    fmt(full_acc) + " vs subset " + fmt(sub_acc) + ", " + fmt(secs) + "s";
    result.passed = !fail.any;
    if (fail.any) result.detail += " | " + fail.msg.str();
    return result;
}

// byte determinism of the seeded estimator and selection runs
CheckResult check_determinism() {
    CheckResult result{"determinism", false, 0.0, ""};
    Failure fail;

    // estimator determinism: trace + value
    {
        const GeneratedData g = suite_data(SyntheticKind::perfectly_redundant_pair, 4000, 0, 101);
        EstimatorConfig cfg = fast_estimator(1);
        cfg.batch_size = 100;
        cfg.steps = 3000;
        cfg.tail_window = 500;
        const MiEstimate a = estimate_mi(g.data, {0}, cfg);
        const MiEstimate b = estimate_mi(g.data, {0}, cfg);
        nlohmann::ordered_json ja = {{"value", a.value}, {"trace", a.trace}};
        nlohmann::ordered_json jb = {{"value", b.value}, {"trace", b.trace}};
        if (ja.dump() != jb.dump()) fail("dv-estimator bytes differ");
    }
    // representative seeded selection runs per suite
    {
        const GeneratedData g = suite_data(SyntheticKind::irrelevant, 4000, 5, 102);
        const std::string a = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        const std::string b = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        if (a != b) fail("irrelevance-rejection report bytes differ");
    }
    {
        const GeneratedData g = suite_data(SyntheticKind::perfectly_redundant_pair, 4000, 0, 103);
        const std::string a =
            mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1), {0, 1})));
        const std::string b =
            mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1), {0, 1})));
        if (a != b) fail("redundancy-resolution report bytes differ");
    }
    {
        const GeneratedData g = suite_data(SyntheticKind::xor_synergy, 4000, 3, 104);
        const std::string a = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        const std::string b = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        if (a != b) fail("synergy-detection report bytes differ");
    }
    // static and temporal selection runs on the parity data
    {
        const GeneratedData g = suite_data(SyntheticKind::parity_temporal, 3000, 0, 105);
        const std::string sa = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        const std::string sb = mask_seconds(report_to_json(run_fsnid(g.data, fast_selection(1))));
        if (sa != sb) fail("parity static report bytes differ");
        const std::string ta =
            mask_seconds(report_to_json(run_fsnid(g.data, temporal_selection(1))));
        const std::string tb =
            mask_seconds(report_to_json(run_fsnid(g.data, temporal_selection(1))));
        if (ta != tb) fail("parity temporal report bytes differ");
    }

    result.detail = "seeded estimator and selection runs re-executed and byte-compared";
    result.passed = !fail.any;
    if (fail.any) result.detail = fail.msg.str();
    return result;
}

const std::map<std::string, CheckResult (*)()>& check_registry() {
    static const std::map<std::string, CheckResult (*)()> registry = {
        {"dv-estimator-fidelity", &check_dv_fidelity},
        {"irrelevance-rejection", &check_irrelevance_rejection},
        {"perfect-redundancy-resolution", &check_redundancy_resolution},
        {"synergy-detection", &check_synergy_detection},
        {"temporal-advantage", &check_temporal_advantage},
        {"classification-sufficiency", &check_classification_sufficiency},
        {"linear-scaling", &check_linear_scaling},
        {"gradient-integrity", &check_gradient_integrity},
        {"realdata-smoke", &check_realdata_smoke},
        {"determinism", &check_determinism},
    };
    return registry;
}

std::filesystem::path suites_dir() {
    if (const char* env = std::getenv("FSNID_SUITES_DIR")) return env;
    return "suites";
}

std::vector<std::string> suite_checks(const std::string& suite) {
    const auto path = suites_dir() / (suite + ".json");
    std::ifstream in(path);
    if (!in) {
        std::string names;
        for (const auto& s : acceptance_suites()) names += (names.empty() ? "" : ", ") + s;
        throw input_error("unknown suite '" + suite + "' (no file " + path.string() +
                          "); available: " + names + ", all");
    }
    nlohmann::json j;
    in >> j;
    if (!j.contains("checks") || !j["checks"].is_array()) {
        throw input_error("suite file " + path.string() + " has no 'checks' array");
    }
    return j["checks"].get<std::vector<std::string>>();
}

}  // namespace

std::vector<std::string> acceptance_suites() {
    return {"gradient-suite", "estimator-suite", "lemma-suite",   "temporal-suite",
            "classifier-suite", "scaling-suite", "realdata-suite", "determinism-suite"};
}

SuiteResult run_acceptance(const std::string& suite,
                           const std::function<void(const CheckResult&)>& progress) {
    SuiteResult result;
    result.suite = suite;
    result.passed = true;

    std::vector<std::string> checks;
    if (suite == "all") {
        for (const auto& s : acceptance_suites()) {
            for (const auto& c : suite_checks(s)) checks.push_back(c);
        }
    } else {
        checks = suite_checks(suite);
    }

    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& name : checks) {
        const auto it = check_registry().find(name);
        if (it == check_registry().end()) {
            throw input_error("suite references unknown check '" + name + "'");
        }
        const auto c0 = std::chrono::steady_clock::now();
        CheckResult check = it->second();
        check.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
        if (!check.passed) result.passed = false;
        if (progress) progress(check);
        result.checks.push_back(std::move(check));
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string suite_result_to_json(const SuiteResult& result, int indent) {
    nlohmann::ordered_json j;
    j["suite"] = result.suite;
    j["passed"] = result.passed;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : result.checks) {
        j["checks"].push_back(
            {{"name", c.name}, {"passed", c.passed}, {"seconds", c.seconds}, {"detail", c.detail}});
    }
    j["seconds"] = result.seconds;
    return j.dump(indent);
}

}  // namespace fsnid

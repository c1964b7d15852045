#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsnid/acceptance.hpp"
#include "fsnid/bench.hpp"
#include "fsnid/classifier.hpp"
#include "fsnid/dataset.hpp"
#include "fsnid/errors.hpp"
#include "fsnid/mi_estimator.hpp"
#include "fsnid/selection.hpp"
#include "fsnid/synthetic.hpp"

namespace {

using namespace fsnid;

uint64_t default_seed() {
    if (const char* env = std::getenv("FSNID_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw input_error("cannot write output file: " + out_path);
        out << text << '\n';
    }
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= csv.size()) {
        const size_t pos = csv.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(csv.substr(start));
            break;
        }
        out.push_back(csv.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<size_t> resolve_columns(const Dataset& d, const std::vector<std::string>& names) {
    std::vector<size_t> cols;
    for (const auto& name : names) {
        bool found = false;
        for (size_t c = 0; c < d.feature_count(); ++c) {
            if (d.feature_names[c] == name) {
                cols.push_back(c);
                found = true;
                break;
            }
        }
        if (!found) {
            std::string valid;
            for (const auto& n : d.feature_names) valid += (valid.empty() ? "" : ", ") + n;
            throw input_error("unknown feature name '" + name + "'; valid names: " + valid);
        }
    }
    return cols;
}

struct CommonInput {
    std::string input;
    std::string label_col;
    std::string pin_benign;

    Dataset load() const {
        return load_csv(input, label_col,
                        pin_benign.empty() ? std::nullopt
                                           : std::optional<std::string>(pin_benign));
    }
};

void add_input_flags(CLI::App* cmd, CommonInput& in) {
    cmd->add_option("--input", in.input, "input CSV path")->required();
    cmd->add_option("--label-col", in.label_col, "label column name")->required();
    cmd->add_option("--pin-benign", in.pin_benign, "label value to pin to class 0 (benign)");
}

int run(int argc, char** argv) {
    CLI::App app{"FSNID: transfer-entropy feature selection for network intrusion detection"};
    app.require_subcommand(1);

    // ---- select ----------------------------------------------------------
    auto* select = app.add_subcommand("select", "run the sequential feature selection");
    CommonInput sel_in;
    add_input_flags(select, sel_in);
    SelectionConfig sel_cfg;
    bool permute = false;
    std::string sel_out;
    size_t sel_jobs = std::max(1u, std::thread::hardware_concurrency());
    select->add_option("--batch", sel_cfg.estimator.batch_size, "estimator batch size b")
        ->default_val(100);
    auto* steps_opt =
        select->add_option("--steps", sel_cfg.estimator.steps,
                           "training steps N per estimator (default 10000, temporal 20000)");
    select->add_option("--tail-window", sel_cfg.estimator.tail_window,
                       "steps averaged into the reported bound")
        ->default_val(200);
    select->add_option("--lr", sel_cfg.estimator.learning_rate, "estimator learning rate")
        ->default_val(1e-4);
    select->add_option("--seed", sel_cfg.estimator.seed, "random seed (env FSNID_SEED fallback)");
    select->add_flag("--temporal", sel_cfg.estimator.temporal,
                     "use the recurrent estimator over sequences");
    select->add_option("--seq-len", sel_cfg.estimator.sequence_length, "sequence length s")
        ->default_val(10);
    select->add_option("--hidden", sel_cfg.estimator.hidden, "hidden width")->default_val(50);
    select->add_option("--repeats", sel_cfg.repeats, "repeats R per Phi estimate")->default_val(5);
    select->add_option("--alpha", sel_cfg.alpha, "inclusion test significance level")
        ->default_val(0.05);
    select->add_flag("--permute-order", permute, "visit features in a seeded random order");
    select->add_option("--jobs", sel_jobs, "parallel trainings (default: hardware threads)");
    select->add_option("--out", sel_out, "write the report JSON here instead of stdout");

    // ---- classify --------------------------------------------------------
    auto* classify = app.add_subcommand("classify", "train and evaluate the downstream classifier");
    CommonInput cls_in;
    add_input_flags(classify, cls_in);
    ClassifierConfig cls_cfg;
    double cls_split = 0.8;
    std::string cls_features, cls_report, cls_out;
    bool cls_temporal = false;
    classify->add_option("--split", cls_split, "train fraction, contiguous prefix")
        ->default_val(0.8);
    classify->add_option("--features", cls_features, "comma-separated feature names to use");
    classify->add_option("--from-report", cls_report, "take the selected set from a report JSON");
    classify->add_option("--epochs", cls_cfg.epochs, "training epochs")->default_val(100);
    classify->add_option("--batch", cls_cfg.batch_size, "minibatch size")->default_val(100);
    classify->add_option("--lr", cls_cfg.learning_rate, "SGD learning rate")->default_val(0.01);
    classify->add_option("--seed", cls_cfg.seed, "random seed (env FSNID_SEED fallback)");
    classify->add_flag("--temporal", cls_temporal, "train the recurrent sequence classifier");
    classify->add_option("--seq-len", cls_cfg.sequence_length, "sequence length s")
        ->default_val(10);
    classify->add_option("--hidden", cls_cfg.hidden, "hidden width")->default_val(50);
    classify->add_option("--out", cls_out, "write the metrics JSON here instead of stdout");

    // ---- synth -----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with known structure");
    SyntheticSpec synth_spec;
    std::string synth_kind = "xor-synergy", synth_out, synth_label = "y";
    synth->add_option("--kind", synth_kind,
                      "one of: irrelevant, redundant-pair, perfectly-redundant-pair, "
                      "xor-synergy, parity-temporal, bench-binary")
        ->default_val("xor-synergy");
    synth->add_option("--rows", synth_spec.rows, "row count")->default_val(4000);
    synth->add_option("--noise-features", synth_spec.noise_features, "extra noise columns")
        ->default_val(0);
    synth->add_option("--seed", synth_spec.seed, "random seed (env FSNID_SEED fallback)");
    synth->add_option("--label-col", synth_label, "label column name in the CSV")->default_val("y");
    synth->add_option("--out", synth_out, "output CSV path")->required();

    // ---- bench -----------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "time selection as the feature count grows");
    BenchConfig bench_cfg;
    std::string bench_counts = "8,16,32,64", bench_out, bench_csv;
    bench->add_option("--counts", bench_counts, "ascending feature counts")
        ->default_val("8,16,32,64");
    bench->add_option("--rows", bench_cfg.rows, "rows of binary data")->default_val(500);
    bench->add_option("--batch", bench_cfg.batch_size, "reduced batch size b")->default_val(10);
    bench->add_option("--steps", bench_cfg.steps, "reduced training steps N")->default_val(100);
    bench->add_option("--tail-window", bench_cfg.tail_window, "bound averaging window")
        ->default_val(50);
    bench->add_option("--repeats", bench_cfg.repeats, "repeats R per Phi estimate")
        ->default_val(3);
    bench->add_option("--timing-reps", bench_cfg.timing_reps, "timing repetitions, median taken")
        ->default_val(3);
    bench->add_option("--lr", bench_cfg.learning_rate, "estimator learning rate")
        ->default_val(1e-4);
    bench->add_flag("--temporal", bench_cfg.temporal, "benchmark the recurrent variant");
    bench->add_option("--seq-len", bench_cfg.sequence_length, "sequence length s")
        ->default_val(10);
    bench->add_option("--seed", bench_cfg.seed, "random seed (env FSNID_SEED fallback)");
    bench->add_option("--out", bench_out, "write the result JSON here instead of stdout");
    bench->add_option("--csv", bench_csv, "also write the timing points as CSV");

    // ---- oracle ----------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "exact plug-in MI on discrete data");
    CommonInput ora_in;
    add_input_flags(oracle, ora_in);
    std::vector<std::string> ora_subsets;
    std::string ora_out;
    oracle->add_option("--subset", ora_subsets,
                       "comma-separated feature names (repeatable; default: all features)");
    oracle->add_option("--out", ora_out, "write the JSON here instead of stdout");

    // ---- accept ----------------------------------------------------------
    auto* accept = app.add_subcommand("accept", "run an acceptance suite");
    std::string accept_suite, accept_out;
    accept->add_option("suite", accept_suite, "suite name, or 'all'");
    accept->add_option("--out", accept_out, "write the summary JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (select->parsed()) {
        if (sel_cfg.estimator.seed == 0 && select->count("--seed") == 0) {
            sel_cfg.estimator.seed = default_seed();
        }
        if (steps_opt->count() == 0) {
            sel_cfg.estimator.steps = sel_cfg.estimator.temporal ? 20000 : 10000;
        }
        sel_cfg.estimator.jobs = sel_jobs;
        const Dataset raw = sel_in.load();
        const NormalizeResult norm = normalize(raw);
        for (const auto& name : norm.constant_columns) {
            std::cerr << "warning: constant column '" << name << "' normalized to zeros\n";
        }
        const auto order = permute
                               ? permuted_order(norm.data.feature_count(), sel_cfg.estimator.seed)
                               : default_order(norm.data.feature_count());
        const SelectionReport report = run_fsnid(norm.data, sel_cfg, order);
        emit(report_to_json(report), sel_out);
        return 0;
    }

    if (classify->parsed()) {
        if (cls_cfg.seed == 0 && classify->count("--seed") == 0) cls_cfg.seed = default_seed();
        const Dataset raw = cls_in.load();
        const SplitDataset parts = split(raw, cls_split);
        const ColumnStats stats = compute_stats(parts.train);
        const Dataset train = apply_stats(parts.train, stats).data;
        const Dataset test = apply_stats(parts.test, stats).data;

        std::vector<size_t> cols;
        if (!cls_features.empty() && !cls_report.empty()) {
            throw input_error("--features and --from-report are mutually exclusive");
        }
        if (!cls_features.empty()) {
            cols = resolve_columns(train, split_names(cls_features));
        } else if (!cls_report.empty()) {
            std::ifstream in(cls_report);
            if (!in) throw input_error("cannot read report: " + cls_report);
            nlohmann::json j;
            in >> j;
            if (!j.contains("selected")) throw input_error("report has no 'selected' field");
            cols = resolve_columns(train, j["selected"].get<std::vector<std::string>>());
            if (cols.empty()) throw input_error("report selected no features");
        } else {
            cols.resize(train.feature_count());
            std::iota(cols.begin(), cols.end(), size_t{0});
        }

        Metrics metrics;
        if (cls_temporal) {
            const TrainedSequenceClassifier model = train_sequence_classifier(train, cols, cls_cfg);
            metrics = evaluate_sequence(model, test);
        } else {
            const TrainedClassifier model = train_classifier(train, cols, cls_cfg);
            metrics = evaluate(model, test);
        }
        emit(metrics_to_json(metrics), cls_out);
        return 0;
    }

    if (synth->parsed()) {
        if (synth_spec.seed == 0 && synth->count("--seed") == 0) synth_spec.seed = default_seed();
        synth_spec.kind = parse_synthetic_kind(synth_kind);
        const GeneratedData g = generate(synth_spec);
        save_csv(g.data, synth_out, synth_label);
        std::ofstream ann(synth_out + ".annotation.json");
        if (!ann) throw input_error("cannot write annotation next to " + synth_out);
        ann << annotation_to_json(g) << '\n';
        std::cerr << "wrote " << g.data.rows() << " rows x " << g.data.feature_count()
                  << " features to " << synth_out << '\n';
        return 0;
    }

    if (bench->parsed()) {
        if (bench_cfg.seed == 0 && bench->count("--seed") == 0) bench_cfg.seed = default_seed();
        bench_cfg.feature_counts.clear();
        for (const auto& token : split_names(bench_counts)) {
            bench_cfg.feature_counts.push_back(std::stoul(token));
        }
        const BenchResult result = run_bench(bench_cfg);
        if (!bench_csv.empty()) {
            std::ofstream out(bench_csv);
            if (!out) throw input_error("cannot write CSV: " + bench_csv);
            out << bench_points_csv(result);
        }
        emit(bench_to_json(result), bench_out);
        return 0;
    }

    if (oracle->parsed()) {
        const Dataset d = ora_in.load();
        nlohmann::ordered_json j;
        j["subsets"] = nlohmann::ordered_json::array();
        if (ora_subsets.empty()) {
            std::string all;
            for (size_t c = 0; c < d.feature_count(); ++c) {
                all += (c == 0 ? "" : ",") + d.feature_names[c];
            }
            ora_subsets.push_back(all);
        }
        for (const auto& subset : ora_subsets) {
            const std::vector<size_t> cols =
                subset.empty() ? std::vector<size_t>{} : resolve_columns(d, split_names(subset));
            std::vector<std::string> names;
            for (size_t c : cols) names.push_back(d.feature_names[c]);
            j["subsets"].push_back({{"cols", names}, {"mi", plugin_mi(d, cols)}});
        }
        emit(j.dump(2), ora_out);
        return 0;
    }

    if (accept->parsed()) {
        if (accept_suite.empty()) {
            std::string suites;
            for (const auto& s : acceptance_suites()) suites += (suites.empty() ? "" : ", ") + s;
            throw input_error("missing suite name; available suites: " + suites + ", all");
        }
        const SuiteResult result = run_acceptance(accept_suite, [](const CheckResult& check) {
            std::cerr << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << " ("
                      << check.seconds << "s) " << check.detail << '\n';
        });
        emit(suite_result_to_json(result), accept_out);
        return result.passed ? 0 : 2;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fsnid::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const fsnid::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

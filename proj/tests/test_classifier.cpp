#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "fsnid/classifier.hpp"
#include "fsnid/errors.hpp"
#include "fsnid/rng.hpp"
#include "fsnid/synthetic.hpp"

using namespace fsnid;

namespace {

ClassifierConfig quick_cfg(uint64_t seed, size_t epochs = 50) {
    ClassifierConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 50;
    cfg.seed = seed;
    return cfg;
}

// two well-separated gaussian blobs
Dataset separable_toy(size_t rows, uint64_t seed) {
    Dataset d;
    d.feature_names = {"u", "v"};
    d.features = Matrix(rows, 2);
    d.labels.resize(rows);
    d.class_names = {"benign", "attack"};
    Rng rng(seed);
    for (size_t r = 0; r < rows; ++r) {
        const int y = r % 2 == 0 ? 0 : 1;
        const double cx = y == 0 ? -2.0 : 2.0;
        d.features(r, 0) = cx + 0.3 * rng.normal();
        d.features(r, 1) = -cx + 0.3 * rng.normal();
        d.labels[r] = y;
    }
    return d;
}

double train_accuracy(const TrainedClassifier& model, const Dataset& d) {
    return evaluate(model, d).accuracy;
}

}  // namespace

TEST_CASE("train_classifier: linearly separable toy reaches 0.99 train accuracy") {
    const Dataset d = separable_toy(400, 1);
    const TrainedClassifier model = train_classifier(d, {0, 1}, quick_cfg(2));
    CHECK(train_accuracy(model, d) >= 0.99);
    REQUIRE(!model.epoch_loss.empty());
    CHECK(model.epoch_loss.back() < model.epoch_loss.front());
}

TEST_CASE("train_classifier: shuffled labels stay near the majority rate") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::irrelevant;
    spec.rows = 2000;
    spec.noise_features = 2;
    spec.seed = 3;
    const Dataset full = generate(spec).data;  // labels independent of features
    const SplitDataset s = split(full, 0.8);
    const TrainedClassifier model = train_classifier(s.train, {0, 1}, quick_cfg(4));
    const Metrics m = evaluate(model, s.test);

    double majority = 0.0;
    for (int y : s.test.labels) majority += y == 0 ? 1.0 : 0.0;
    majority = std::max(majority, static_cast<double>(s.test.labels.size()) - majority) /
               static_cast<double>(s.test.labels.size());
    CHECK(std::abs(m.accuracy - majority) <= 0.05);
}

TEST_CASE("train_classifier: perfect feature reaches 0.98 test accuracy") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::perfectly_redundant_pair;  // Y = X1
    spec.rows = 2000;
    spec.seed = 5;
    const Dataset full = generate(spec).data;
    const SplitDataset s = split(full, 0.8);
    const TrainedClassifier model = train_classifier(s.train, {0}, quick_cfg(6));
    CHECK(evaluate(model, s.test).accuracy >= 0.98);
}

TEST_CASE("train_classifier: rejects degenerate input") {
    Dataset d = separable_toy(100, 7);
    CHECK_THROWS_AS(train_classifier(d, {}, quick_cfg(8)), input_error);
    std::fill(d.labels.begin(), d.labels.end(), 0);
    d.class_names = {"only"};
    CHECK_THROWS_AS(train_classifier(d, {0, 1}, quick_cfg(9)), input_error);
}

TEST_CASE("classifier_probs: softmax rows sum to one") {
    Rng rng(10);
    DenseClassifierParams p = DenseClassifierParams::init(3, 4, rng);
    std::vector<double> x = {0.2, -1.4, 2.2};
    const std::vector<double> probs = classifier_probs(p, x);
    double total = 0.0;
    for (double v : probs) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("evaluate: all-correct and all-wrong metric extremes") {
    Dataset test;
    test.feature_names = {"x"};
    test.features = Matrix(6, 1);
    test.labels = {0, 0, 0, 1, 1, 1};
    test.class_names = {"benign", "attack"};
    for (size_t r = 0; r < 6; ++r) test.features(r, 0) = r < 3 ? -4.0 : 4.0;

    // hand-built net: sign of x decides the class
    TrainedClassifier model;
    model.cols = {0};
    Rng rng(11);
    model.params = DenseClassifierParams::init(1, 2, rng, 2);
    model.params.w1 = Matrix(2, 1);
    model.params.w1(0, 0) = 1.0;   // unit 0 fires on positive x
    model.params.w1(1, 0) = -1.0;  // unit 1 fires on negative x
    model.params.b1 = {0.0, 0.0};
    model.params.w2 = Matrix(2, 2);
    model.params.w2(0, 0) = -5.0;
    model.params.w2(0, 1) = 5.0;
    model.params.w2(1, 0) = 5.0;
    model.params.w2(1, 1) = -5.0;
    model.params.b2 = {0.0, 0.0};

    const Metrics good = evaluate(model, test);
    CHECK(good.accuracy == doctest::Approx(1.0));
    CHECK(good.macro_f1 == doctest::Approx(1.0));
    REQUIRE(good.fpr.has_value());
    CHECK(*good.fpr == doctest::Approx(0.0));

    // flip the readout so every benign row is predicted attack
    model.params.w2(0, 0) = 5.0;
    model.params.w2(0, 1) = -5.0;
    model.params.w2(1, 0) = -5.0;
    model.params.w2(1, 1) = 5.0;
    const Metrics bad = evaluate(model, test);
    REQUIRE(bad.fpr.has_value());
    CHECK(*bad.fpr == doctest::Approx(1.0));
}

TEST_CASE("metrics: confusion counts give attack-class F1 of 0.75") {
    // TP:3 FP:1 FN:1 TN:5 for the attack class
    std::vector<int> truth = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    std::vector<int> predicted = {1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
    Dataset test;
    test.feature_names = {"x"};
    test.features = Matrix(10, 1);
    test.labels = truth;
    test.class_names = {"benign", "attack"};
    for (size_t r = 0; r < 10; ++r) test.features(r, 0) = predicted[r] == 1 ? 4.0 : -4.0;

    TrainedClassifier model;
    model.cols = {0};
    Rng rng(12);
    model.params = DenseClassifierParams::init(1, 2, rng, 2);
    model.params.w1(0, 0) = 1.0;
    model.params.w1(1, 0) = -1.0;
    model.params.b1 = {0.0, 0.0};
    model.params.w2(0, 0) = -5.0;
    model.params.w2(0, 1) = 5.0;
    model.params.w2(1, 0) = 5.0;
    model.params.w2(1, 1) = -5.0;
    model.params.b2 = {0.0, 0.0};

    const Metrics m = evaluate(model, test);
    // attack F1 = 2*3/(2*3+1+1) = 0.75; benign F1 = 2*5/(2*5+1+1) = 0.8333
    CHECK(m.macro_f1 == doctest::Approx((0.75 + 10.0 / 12.0) / 2.0).epsilon(1e-9));
    CHECK(m.accuracy == doctest::Approx(0.8));
}

TEST_CASE("evaluate: fpr absent without benign rows, deterministic metrics") {
    Dataset test;
    test.feature_names = {"x"};
    test.features = Matrix(4, 1);
    test.labels = {1, 1, 2, 2};
    test.class_names = {"benign", "a", "b"};
    for (size_t r = 0; r < 4; ++r) test.features(r, 0) = static_cast<double>(r);

    TrainedClassifier model;
    model.cols = {0};
    Rng rng(13);
    model.params = DenseClassifierParams::init(1, 3, rng);
    const Metrics m1 = evaluate(model, test);
    const Metrics m2 = evaluate(model, test);
    CHECK_FALSE(m1.fpr.has_value());
    CHECK(m1.accuracy == m2.accuracy);
    CHECK(m1.macro_f1 == m2.macro_f1);
}

TEST_CASE("metrics_to_json: pinned keys") {
    Metrics m;
    m.accuracy = 0.5;
    m.macro_f1 = 0.25;
    m.fpr = 0.125;
    const auto j = nlohmann::json::parse(metrics_to_json(m));
    CHECK(j["accuracy"] == 0.5);
    CHECK(j["macro_f1"] == 0.25);
    CHECK(j["fpr"] == 0.125);
    Metrics absent;
    const auto j2 = nlohmann::json::parse(metrics_to_json(absent));
    CHECK(j2["fpr"].is_null());
}

TEST_CASE("sequence classifier: s=1 tracks the dense classifier on memoryless data") {
    const Dataset d = separable_toy(600, 14);
    const SplitDataset s = split(d, 0.8);
    ClassifierConfig cfg = quick_cfg(15, 40);
    const TrainedClassifier dense = train_classifier(s.train, {0, 1}, cfg);
    cfg.sequence_length = 1;
    const TrainedSequenceClassifier seq = train_sequence_classifier(s.train, {0, 1}, cfg);
    const double dense_acc = evaluate(dense, s.test).accuracy;
    const double seq_acc = evaluate_sequence(seq, s.test).accuracy;
    CHECK(std::abs(dense_acc - seq_acc) <= 0.03);
}

TEST_CASE("sequence classifier: temporal parity beats the dense classifier") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::parity_temporal;
    spec.rows = 3000;
    spec.seed = 16;
    const Dataset full = generate(spec).data;
    const SplitDataset s = split(full, 0.8);

    ClassifierConfig cfg = quick_cfg(17, 300);
    cfg.sequence_length = 10;
    cfg.batch_size = 16;
    const TrainedSequenceClassifier seq = train_sequence_classifier(s.train, {0}, cfg);
    const double seq_acc = evaluate_sequence(seq, s.test).accuracy;

    const TrainedClassifier dense = train_classifier(s.train, {0}, quick_cfg(18, 60));
    const double dense_acc = evaluate(dense, s.test).accuracy;

    MESSAGE("sequence ", seq_acc, " dense ", dense_acc);
    CHECK(seq_acc >= 0.9);
    CHECK(dense_acc <= 0.6);
}

TEST_CASE("sequence classifier: constant windows give a constant prediction") {
    Dataset d;
    d.feature_names = {"x"};
    d.features = Matrix(40, 1);
    d.labels.assign(40, 0);
    for (size_t r = 0; r < 40; ++r) {
        d.features(r, 0) = 1.0;
        d.labels[r] = static_cast<int>(r % 2);
    }
    d.class_names = {"benign", "attack"};
    ClassifierConfig cfg = quick_cfg(19, 5);
    cfg.sequence_length = 4;
    const TrainedSequenceClassifier model = train_sequence_classifier(d, {0}, cfg);
    const Metrics m = evaluate_sequence(model, d);
    CHECK((m.accuracy == doctest::Approx(0.5).epsilon(0.06) ||
           m.accuracy == doctest::Approx(0.5135).epsilon(0.06)));
}

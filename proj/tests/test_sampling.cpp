#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fsnid/errors.hpp"
#include "fsnid/mi_estimator.hpp"
#include "fsnid/synthetic.hpp"

using namespace fsnid;

namespace {

Dataset toy_dataset(size_t rows, size_t cols) {
    Dataset d;
    for (size_t c = 0; c < cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
    d.features = Matrix(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            d.features(r, c) = static_cast<double>(r * 100 + c);  // row identity encoded
        }
    }
    d.labels.resize(rows);
    for (size_t r = 0; r < rows; ++r) d.labels[r] = static_cast<int>(r % 3);
    d.class_names = {"benign", "a", "b"};
    return d;
}

}  // namespace

TEST_CASE("sample_joint: exhaustive draw is a permutation of the rows") {
    const Dataset d = toy_dataset(20, 2);
    Rng rng(1);
    const Batch batch = sample_joint(d, {0, 1}, 20, rng);
    std::set<double> seen;
    for (size_t j = 0; j < 20; ++j) {
        const double row_id = batch.x(j, 0);
        seen.insert(row_id);
        // label belongs to the same row as the features
        CHECK(batch.y[j] == static_cast<int>(static_cast<size_t>(row_id) / 100 % 3));
    }
    CHECK(seen.size() == 20);
}

TEST_CASE("sample_joint: single column, fixed seed reproduces the batch") {
    const Dataset d = toy_dataset(50, 3);
    Rng a(9), b(9);
    const Batch ba = sample_joint(d, {2}, 10, a);
    const Batch bb = sample_joint(d, {2}, 10, b);
    CHECK(ba.x == bb.x);
    CHECK(ba.y == bb.y);
    CHECK(ba.x.cols() == 1);
}

TEST_CASE("sample_joint: batch larger than rows is rejected") {
    const Dataset d = toy_dataset(5, 1);
    Rng rng(2);
    CHECK_THROWS_AS(sample_joint(d, {0}, 6, rng), input_error);
    CHECK_THROWS_AS(sample_joint(d, {}, 2, rng), input_error);
}

namespace {

// Labels equal the row index, so a sampled label reveals exactly which row it
// came from.
Dataset row_id_dataset(size_t rows) {
    Dataset d;
    d.feature_names = {"f0"};
    d.features = Matrix(rows, 1);
    d.labels.resize(rows);
    for (size_t r = 0; r < rows; ++r) {
        d.features(r, 0) = static_cast<double>(r);
        d.labels[r] = static_cast<int>(r);
        d.class_names.push_back("c" + std::to_string(r));
    }
    return d;
}

}  // namespace

TEST_CASE("sample_marginal: every label comes from a different row") {
    const Dataset d = row_id_dataset(30);
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const Batch batch = sample_marginal(d, {0}, 10, rng);
        for (size_t j = 0; j < 10; ++j) {
            const size_t feature_row = static_cast<size_t>(batch.x(j, 0));
            CHECK(batch.y[j] != static_cast<int>(feature_row));
        }
    }
}

TEST_CASE("sample_marginal: constant target keeps identical label content") {
    Dataset d = toy_dataset(10, 1);
    d.labels.assign(10, 0);
    d.class_names = {"only"};
    Rng rng(4);
    const Batch joint = sample_joint(d, {0}, 10, rng);
    const Batch marg = sample_marginal(d, {0}, 10, rng);
    CHECK(joint.y == marg.y);
}

TEST_CASE("sample_marginal: label frequencies track the dataset within 2%") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::irrelevant;
    spec.rows = 500;
    spec.noise_features = 1;
    spec.seed = 8;
    Dataset d = generate(spec).data;
    // skew the labels so the check is not trivially symmetric
    for (size_t r = 0; r < d.rows(); ++r) d.labels[r] = (r % 4 == 0) ? 1 : 0;

    double dataset_freq = 0.0;
    for (int y : d.labels) dataset_freq += y;
    dataset_freq /= static_cast<double>(d.rows());

    Rng rng(5);
    size_t draws = 0, ones = 0;
    while (draws < 10000) {
        const Batch batch = sample_marginal(d, {0}, 100, rng);
        for (int y : batch.y) ones += static_cast<size_t>(y);
        draws += batch.y.size();
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(draws);
    CHECK(std::abs(freq - dataset_freq) < 0.02);
}

TEST_CASE("sequence_batches: windows are strictly consecutive rows") {
    const Dataset d = toy_dataset(40, 1);
    Rng rng(6);
    const SequenceBatch batch = sequence_batches(d, {0}, 8, 5, rng, SampleMode::joint);
    CHECK(batch.batch == 8);
    CHECK(batch.steps == 5);
    for (size_t j = 0; j < 8; ++j) {
        const size_t start = static_cast<size_t>(batch.x(j * 5, 0)) / 100;
        for (size_t t = 0; t < 5; ++t) {
            const size_t row = static_cast<size_t>(batch.x(j * 5 + t, 0)) / 100;
            CHECK(row == start + t);
            CHECK(batch.y[j * 5 + t] == d.labels[row]);  // joint: own-row labels
        }
    }
}

TEST_CASE("sequence_batches: marginal label window starts elsewhere") {
    const Dataset d = row_id_dataset(40);
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const SequenceBatch batch = sequence_batches(d, {0}, 6, 4, rng, SampleMode::marginal);
        for (size_t j = 0; j < 6; ++j) {
            const size_t f_start = static_cast<size_t>(batch.x(j * 4, 0));
            const size_t l_start = static_cast<size_t>(batch.y[j * 4]);
            CHECK(l_start != f_start);
            for (size_t t = 1; t < 4; ++t) {
                CHECK(batch.y[j * 4 + t] == static_cast<int>(l_start + t));
            }
        }
    }
}

TEST_CASE("sequence_batches: s=1 reduces to the static samplers") {
    const Dataset d = toy_dataset(25, 2);
    Rng rng(8);
    const SequenceBatch batch = sequence_batches(d, {0, 1}, 10, 1, rng, SampleMode::joint);
    CHECK(batch.steps == 1);
    for (size_t j = 0; j < 10; ++j) {
        const size_t row = static_cast<size_t>(batch.x(j, 0)) / 100;
        CHECK(batch.y[j] == d.labels[row]);
    }
}

TEST_CASE("sequence_batches: dataset shorter than the window is rejected") {
    const Dataset d = toy_dataset(5, 1);
    Rng rng(9);
    CHECK_THROWS_AS(sequence_batches(d, {0}, 2, 5, rng, SampleMode::joint), input_error);
}

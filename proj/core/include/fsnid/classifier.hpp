#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsnid/dataset.hpp"
#include "fsnid/nets.hpp"

namespace fsnid {

struct ClassifierConfig {
    size_t epochs = 100;
    size_t batch_size = 100;
    double learning_rate = 0.01;  // plain SGD
    uint64_t seed = 0;
    size_t hidden = kDefaultHidden;
    size_t sequence_length = 10;  // s, sequence classifier only
};

// One hidden relu layer with a C-way softmax readout.
struct DenseClassifierParams {
    size_t in_dim = 0;
    size_t hidden = kDefaultHidden;
    size_t out_dim = 0;
    Matrix w1;               // hidden x in_dim
    std::vector<double> b1;  // hidden
    Matrix w2;               // out_dim x hidden
    std::vector<double> b2;  // out_dim

    static DenseClassifierParams init(size_t in_dim, size_t out_dim, Rng& rng,
                                      size_t hidden = kDefaultHidden);
};

// LSTM cell with a C-way softmax readout of the final hidden state.
struct RecurrentClassifierParams {
    LstmCell cell;
    Matrix w_out;                // out_dim x hidden
    std::vector<double> b_out;   // out_dim
    size_t out_dim = 0;

    static RecurrentClassifierParams init(size_t in_dim, size_t out_dim, Rng& rng,
                                          size_t hidden = kDefaultHidden);
};

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::optional<double> fpr;  // absent when the test set has no benign rows
};

struct TrainedClassifier {
    DenseClassifierParams params;
    std::vector<size_t> cols;
    std::vector<double> epoch_loss;
};

struct TrainedSequenceClassifier {
    RecurrentClassifierParams params;
    std::vector<size_t> cols;
    size_t sequence_length = 0;
    std::vector<double> epoch_loss;
};

// Softmax class probabilities for one input; rows of the result sum to 1.
std::vector<double> classifier_probs(const DenseClassifierParams& p, std::span<const double> x);

TrainedClassifier train_classifier(const Dataset& train, const std::vector<size_t>& cols,
                                   const ClassifierConfig& cfg);

TrainedSequenceClassifier train_sequence_classifier(const Dataset& train,
                                                    const std::vector<size_t>& cols,
                                                    const ClassifierConfig& cfg);

Metrics evaluate(const TrainedClassifier& model, const Dataset& test);

// Windows of s consecutive rows, classified by the label of the final row.
Metrics evaluate_sequence(const TrainedSequenceClassifier& model, const Dataset& test);

std::string metrics_to_json(const Metrics& m, int indent = 2);

}  // namespace fsnid

#pragma once

#include <cstdint>
#include <vector>

#include "fsnid/dataset.hpp"
#include "fsnid/matrix.hpp"
#include "fsnid/nets.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

// Training configuration for one Donsker-Varadhan estimator.
struct EstimatorConfig {
    size_t batch_size = 100;      // b
    size_t steps = 10000;         // N
    size_t tail_window = 200;     // W, the bound is averaged over the last W steps
    double learning_rate = 1e-4;
    uint64_t seed = 0;
    bool temporal = false;
    size_t sequence_length = 10;  // s
    size_t hidden = kDefaultHidden;
    size_t jobs = 1;              // parallelism across repeats/estimator pairs

    void validate() const;
};

struct MiEstimate {
    double value = 0.0;          // max(0, mean of last tail_window trace entries), nats
    std::vector<double> trace;   // per-step DV bound, raw sign retained
};

struct PhiEstimate {
    size_t feature_index = 0;
    std::vector<double> runs;    // one clamped estimate per repeat
    double mean = 0.0;
    double std_dev = 0.0;
};

// Mini-batch with features restricted to the sampled columns.
struct Batch {
    Matrix x;             // batch_size x |cols|
    std::vector<int> y;
};

// b windows of s consecutive rows each; row (i*steps + t) of x is step t of
// window i, and y is indexed the same way.
struct SequenceBatch {
    size_t batch = 0;
    size_t steps = 0;
    Matrix x;
    std::vector<int> y;
};

enum class SampleMode { joint, marginal };

// Draws b rows uniformly without replacement; labels come from the same rows.
Batch sample_joint(const Dataset& d, const std::vector<size_t>& cols, size_t b, Rng& rng);

// Feature rows as in sample_joint; labels re-paired by a random nonzero
// cyclic shift of the row index, so every label comes from a different row.
Batch sample_marginal(const Dataset& d, const std::vector<size_t>& cols, size_t b, Rng& rng);

SequenceBatch sequence_batches(const Dataset& d, const std::vector<size_t>& cols, size_t b,
                               size_t s, Rng& rng, SampleMode mode);

// mean(T over joint) - log-mean-exp(T over marginal); labels enter the
// network one-hot, concatenated to the features.
double dv_bound(const DenseParams& p, const Batch& joint, const Batch& marginal,
                size_t class_count);

double dv_bound_seq(const RecurrentParams& p, const SequenceBatch& joint,
                    const SequenceBatch& marginal, size_t class_count);

// Trains a fresh estimator for cfg.steps steps of gradient ascent on the DV
// bound and reports the tail-window average, clamped at zero.
MiEstimate estimate_mi(const Dataset& d, const std::vector<size_t>& cols,
                       const EstimatorConfig& cfg);

// Phi for feature i within current_set: the difference of two independently
// trained estimates, over `repeats` repeats with fresh seeds. A singleton
// current_set degenerates to the MI of the set itself (empty-set MI is 0).
// `salt` separates the random streams of distinct call sites.
PhiEstimate estimate_phi(const Dataset& d, const std::vector<size_t>& current_set, size_t i,
                         const EstimatorConfig& cfg, size_t repeats, uint64_t salt = 0);

}  // namespace fsnid

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsnid/matrix.hpp"

namespace fsnid {

// Canonical in-memory tabular dataset. Rows are time-ordered samples,
// columns are features; labels are contiguous class indices with class 0
// conventionally benign.
struct Dataset {
    std::vector<std::string> feature_names;
    Matrix features;                        // rows x feature_names.size()
    std::vector<int> labels;                // one per row, in [0, class_count)
    std::vector<std::string> class_names;

    size_t rows() const { return features.rows(); }
    size_t feature_count() const { return feature_names.size(); }
    size_t class_count() const { return class_names.size(); }

    // Throws input_error when an invariant is broken.
    void validate() const;
};

struct SplitDataset {
    Dataset train;
    Dataset test;
    double split_fraction = 0.0;
};

// Per-column mean and standard deviation (population), used to apply one
// partition's statistics to another.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // 0 marks a constant column
};

struct NormalizeResult {
    Dataset data;
    std::vector<std::string> constant_columns;  // left as zeros, caller may warn
};

// Loads a UTF-8 comma-separated file with a header row. The label column is
// removed from the features and mapped to class indices in first-appearance
// order; pin_benign forces that label string to class 0.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::string>& pin_benign = std::nullopt);

void save_csv(const Dataset& d, const std::string& path, const std::string& label_column);

ColumnStats compute_stats(const Dataset& d);

// z-score with externally supplied statistics; constant columns become zeros.
NormalizeResult apply_stats(const Dataset& d, const ColumnStats& stats);

// z-score each column with the dataset's own statistics.
NormalizeResult normalize(const Dataset& d);

// Contiguous time-ordered prefix split; no shuffling.
SplitDataset split(const Dataset& d, double fraction);

}  // namespace fsnid

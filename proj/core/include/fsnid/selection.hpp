#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsnid/dataset.hpp"
#include "fsnid/mi_estimator.hpp"

namespace fsnid {

// Phi distribution of an injected standard-normal feature; the baseline an
// informative feature has to beat.
struct NullModel {
    std::vector<double> phi_runs;
    double mean = 0.0;
    double std_dev = 0.0;
    bool degenerate = false;  // single repeat, test cannot discriminate
};

struct InclusionResult {
    bool included = false;
    double statistic = 0.0;
    bool degenerate = false;  // zero pooled variance with equal means
};

struct Decision {
    std::string feature_name;
    size_t feature_index = 0;
    PhiEstimate phi;
    bool included = false;
    double statistic = 0.0;
};

struct SelectionConfig {
    EstimatorConfig estimator;
    size_t repeats = 5;     // R
    double alpha = 0.05;
};

struct SelectionReport {
    std::vector<Decision> decisions;       // visitation order, one per feature
    std::vector<size_t> selected;          // indices into feature_names
    std::vector<std::string> selected_names;
    NullModel null_model;
    SelectionConfig config;
    std::vector<size_t> order;
    double seconds = 0.0;
    size_t phi_calls = 0;
};

// Appends an i.i.d. standard-normal column, estimates its Phi against the
// full feature set, and discards the column.
NullModel build_null(const Dataset& d, const EstimatorConfig& cfg, size_t repeats, uint64_t salt = 0);

// One-sided two-sample z-test of the feature's Phi runs against the null.
InclusionResult include_test(const PhiEstimate& phi, const NullModel& null_model,
                             double alpha = 0.05);

// Upper quantile of the standard normal (Acklam's rational approximation).
double normal_quantile(double p);

std::vector<size_t> default_order(size_t n_features);
std::vector<size_t> permuted_order(size_t n_features, uint64_t seed);

// Sequential elimination over the given visitation order: features failing
// the inclusion test leave the working set before later features are scored.
SelectionReport run_fsnid(const Dataset& d, const SelectionConfig& cfg,
                          const std::vector<size_t>& order);

SelectionReport run_fsnid(const Dataset& d, const SelectionConfig& cfg);

// Pinned JSON schema: {selected, decisions, null, config, seconds}.
std::string report_to_json(const SelectionReport& report, int indent = 2);

// Byte comparison helper that ignores the timing field.
std::string mask_seconds(const std::string& report_json);

}  // namespace fsnid

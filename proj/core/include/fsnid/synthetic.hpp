#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsnid/dataset.hpp"

namespace fsnid {

enum class SyntheticKind {
    irrelevant,               // Y fair binary, independent of every column
    redundant_pair,           // Y = majority(X1, X2, hidden X3)
    perfectly_redundant_pair, // X2 = X1, Y = X1
    xor_synergy,              // Y = X1 xor X2
    parity_temporal,          // Y^t = X1^t xor X1^{t-1} xor X1^{t-2}
    bench_binary,             // all columns and Y i.i.d. fair binary
};

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string synthetic_kind_name(SyntheticKind kind);

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::irrelevant;
    size_t rows = 4000;
    size_t noise_features = 0;
    uint64_t seed = 0;
};

struct GeneratedData {
    Dataset data;
    std::vector<size_t> informative;  // ground-truth informative column indices
};

GeneratedData generate(const SyntheticSpec& spec);

// Exact empirical plug-in MI (nats) between the discretized columns and the
// labels. Columns must be discrete; the joint support is bounded so the
// contingency table stays exact.
double plugin_mi(const Dataset& d, const std::vector<size_t>& cols);

struct SubsetRanking {
    double full_set_mi = 0.0;
    std::vector<std::vector<size_t>> minimal_subsets;  // smallest subsets within epsilon of full
    std::vector<std::pair<std::vector<size_t>, double>> all_subsets;
};

// Brute-force oracle over all 2^N subsets, N <= 4.
SubsetRanking exhaustive_best_subsets(const Dataset& d, size_t max_features = 4,
                                      double epsilon = 0.01);

// Sidecar annotation written next to generated CSVs.
std::string annotation_to_json(const GeneratedData& g);

}  // namespace fsnid

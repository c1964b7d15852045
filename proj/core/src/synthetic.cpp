#include "fsnid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "fsnid/errors.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "irrelevant") return SyntheticKind::irrelevant;
    if (name == "redundant-pair") return SyntheticKind::redundant_pair;
    if (name == "perfectly-redundant-pair") return SyntheticKind::perfectly_redundant_pair;
    if (name == "xor-synergy") return SyntheticKind::xor_synergy;
    if (name == "parity-temporal") return SyntheticKind::parity_temporal;
    if (name == "bench-binary") return SyntheticKind::bench_binary;
    throw input_error("unknown synthetic kind: " + name);
}

std::string synthetic_kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::irrelevant: return "irrelevant";
        case SyntheticKind::redundant_pair: return "redundant-pair";
        case SyntheticKind::perfectly_redundant_pair: return "perfectly-redundant-pair";
        case SyntheticKind::xor_synergy: return "xor-synergy";
        case SyntheticKind::parity_temporal: return "parity-temporal";
        case SyntheticKind::bench_binary: return "bench-binary";
    }
    throw input_error("unknown synthetic kind");
}

namespace {

int coin(Rng& rng) { return rng.u01() < 0.5 ? 1 : 0; }

void add_noise_columns(GeneratedData& g, size_t count, Rng& rng) {
    if (count == 0) return;
    const size_t n = g.data.rows();
    const size_t base = g.data.feature_count();
    Matrix extended(n, base + count);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < base; ++c) extended(r, c) = g.data.features(r, c);
        for (size_t c = 0; c < count; ++c) {
            extended(r, base + c) = static_cast<double>(coin(rng));
        }
    }
    g.data.features = std::move(extended);
    for (size_t c = 0; c < count; ++c) {
        g.data.feature_names.push_back("n" + std::to_string(c + 1));
    }
}

}  // namespace

GeneratedData generate(const SyntheticSpec& spec) {
    if (spec.rows < 2) throw input_error("synthetic dataset needs at least 2 rows");
    const size_t n = spec.rows;
    Rng rng(mix_seed(spec.seed, 0x53594eu, static_cast<uint64_t>(spec.kind)));

    GeneratedData g;
    g.data.class_names = {"benign", "attack"};
    g.data.labels.resize(n);

    switch (spec.kind) {
        case SyntheticKind::irrelevant: {
            const size_t k = std::max<size_t>(1, spec.noise_features);
            g.data.feature_names.clear();
            for (size_t c = 0; c < k; ++c) g.data.feature_names.push_back("n" + std::to_string(c + 1));
            g.data.features = Matrix(n, k);
            for (size_t r = 0; r < n; ++r) {
                for (size_t c = 0; c < k; ++c) g.data.features(r, c) = static_cast<double>(coin(rng));
                g.data.labels[r] = coin(rng);
            }
            break;
        }
        case SyntheticKind::redundant_pair: {
            g.data.feature_names = {"x1", "x2"};
            g.data.features = Matrix(n, 2);
            for (size_t r = 0; r < n; ++r) {
                const int x1 = coin(rng);
                const int x2 = coin(rng);
                const int hidden = coin(rng);
                g.data.features(r, 0) = x1;
                g.data.features(r, 1) = x2;
                g.data.labels[r] = (x1 + x2 + hidden >= 2) ? 1 : 0;
            }
            g.informative = {0, 1};
            add_noise_columns(g, spec.noise_features, rng);
            break;
        }
        case SyntheticKind::perfectly_redundant_pair: {
            g.data.feature_names = {"x1", "x2"};
            g.data.features = Matrix(n, 2);
            for (size_t r = 0; r < n; ++r) {
                const int x1 = coin(rng);
                g.data.features(r, 0) = x1;
                g.data.features(r, 1) = x1;
                g.data.labels[r] = x1;
            }
            g.informative = {0, 1};
            add_noise_columns(g, spec.noise_features, rng);
            break;
        }
        case SyntheticKind::xor_synergy: {
            g.data.feature_names = {"x1", "x2"};
            g.data.features = Matrix(n, 2);
            for (size_t r = 0; r < n; ++r) {
                const int x1 = coin(rng);
                const int x2 = coin(rng);
                g.data.features(r, 0) = x1;
                g.data.features(r, 1) = x2;
                g.data.labels[r] = x1 ^ x2;
            }
            g.informative = {0, 1};
            add_noise_columns(g, spec.noise_features, rng);
            break;
        }
        case SyntheticKind::parity_temporal: {
            g.data.feature_names = {"x1"};
            g.data.features = Matrix(n, 1);
            int prev1 = 0, prev2 = 0;  // zero padding before the first row
            for (size_t r = 0; r < n; ++r) {
                const int x = coin(rng);
                g.data.features(r, 0) = x;
                g.data.labels[r] = x ^ prev1 ^ prev2;
                prev2 = prev1;
                prev1 = x;
            }
            g.informative = {0};
            add_noise_columns(g, spec.noise_features, rng);
            break;
        }
        case SyntheticKind::bench_binary: {
            const size_t k = std::max<size_t>(1, spec.noise_features);
            g.data.feature_names.clear();
            for (size_t c = 0; c < k; ++c) g.data.feature_names.push_back("x" + std::to_string(c + 1));
            g.data.features = Matrix(n, k);
            for (size_t r = 0; r < n; ++r) {
                for (size_t c = 0; c < k; ++c) g.data.features(r, c) = static_cast<double>(coin(rng));
                g.data.labels[r] = coin(rng);
            }
            break;
        }
    }
    g.data.validate();
    return g;
}

namespace {

constexpr size_t kMaxCells = 4096;

// Maps each referenced column to dense ids over its distinct values; exact
// equality, no binning, so callers must pass genuinely discrete columns.
std::vector<int> discretize_rows(const Dataset& d, const std::vector<size_t>& cols) {
    const size_t n = d.rows();
    std::vector<int> codes(n, 0);
    if (cols.empty()) return codes;
    size_t radix = 1;
    std::vector<int> column_ids(n);
    for (size_t c : cols) {
        std::map<double, int> values;
        for (size_t r = 0; r < n; ++r) {
            const double v = d.features(r, c);
            auto [it, fresh] = values.emplace(v, static_cast<int>(values.size()));
            column_ids[r] = it->second;
            (void)fresh;
        }
        if (values.size() > 16) {
            throw input_error("plugin_mi: column '" + d.feature_names[c] +
                              "' has " + std::to_string(values.size()) +
                              " distinct values; discretize upstream");
        }
        for (size_t r = 0; r < n; ++r) {
            codes[r] = codes[r] * static_cast<int>(values.size()) + column_ids[r];
        }
        radix *= values.size();
        if (radix * d.class_count() > kMaxCells) {
            throw input_error("plugin_mi: joint support exceeds " + std::to_string(kMaxCells) +
                              " cells");
        }
    }
    return codes;
}

}  // namespace

double plugin_mi(const Dataset& d, const std::vector<size_t>& cols) {
    for (size_t c : cols) {
        if (c >= d.feature_count()) throw input_error("plugin_mi: column index out of range");
    }
    if (cols.empty()) return 0.0;
    const size_t n = d.rows();
    const std::vector<int> x_codes = discretize_rows(d, cols);

    std::unordered_map<int, double> px;
    std::unordered_map<int, double> py;
    std::unordered_map<long long, double> pxy;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t r = 0; r < n; ++r) {
        const int x = x_codes[r];
        const int y = d.labels[r];
        px[x] += inv_n;
        py[y] += inv_n;
        pxy[static_cast<long long>(x) * 1000003LL + y] += inv_n;
    }
    double mi = 0.0;
    for (const auto& [key, p_joint] : pxy) {
        const int x = static_cast<int>(key / 1000003LL);
        const int y = static_cast<int>(key % 1000003LL);
        mi += p_joint * std::log(p_joint / (px[x] * py[y]));
    }
    return std::max(0.0, mi);
}

SubsetRanking exhaustive_best_subsets(const Dataset& d, size_t max_features, double epsilon) {
    const size_t k = d.feature_count();
    if (k > max_features || k > 4) {
        throw input_error("exhaustive_best_subsets supports at most " +
                          std::to_string(std::min<size_t>(max_features, 4)) + " features, got " +
                          std::to_string(k));
    }
    SubsetRanking ranking;
    const size_t n_subsets = size_t{1} << k;
    for (size_t mask = 0; mask < n_subsets; ++mask) {
        std::vector<size_t> subset;
        for (size_t c = 0; c < k; ++c) {
            if (mask & (size_t{1} << c)) subset.push_back(c);
        }
        ranking.all_subsets.emplace_back(subset, plugin_mi(d, subset));
    }
    ranking.full_set_mi = ranking.all_subsets.back().second;

    size_t best_size = k + 1;
    for (const auto& [subset, mi] : ranking.all_subsets) {
        if (mi >= ranking.full_set_mi - epsilon) best_size = std::min(best_size, subset.size());
    }
    for (const auto& [subset, mi] : ranking.all_subsets) {
        if (subset.size() == best_size && mi >= ranking.full_set_mi - epsilon) {
            ranking.minimal_subsets.push_back(subset);
        }
    }
    return ranking;
}

std::string annotation_to_json(const GeneratedData& g) {
    nlohmann::ordered_json j;
    j["informative"] = nlohmann::ordered_json::array();
    for (size_t c : g.informative) j["informative"].push_back(g.data.feature_names[c]);
    j["features"] = g.data.feature_names;
    j["classes"] = g.data.class_names;
    j["rows"] = g.data.rows();
    return j.dump(2);
}

}  // namespace fsnid

#include "fsnid/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fsnid/errors.hpp"

namespace fsnid {

void Dataset::validate() const {
    if (features.rows() < 2) {
        throw input_error("dataset must have at least 2 rows, got " + std::to_string(features.rows()));
    }
    if (features.rows() != labels.size()) {
        throw input_error("row count does not match label count");
    }
    if (features.cols() != feature_names.size()) {
        throw input_error("column count does not match feature name count");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (!seen.insert(name).second) {
            throw input_error("duplicate feature name: " + name);
        }
    }
    const int c = static_cast<int>(class_names.size());
    for (int y : labels) {
        if (y < 0 || y >= c) throw input_error("label index out of range: " + std::to_string(y));
    }
    for (double v : features.flat()) {
        if (!std::isfinite(v)) throw input_error("non-finite feature value");
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
        out.back().pop_back();
    }
    return out;
}

double parse_cell(const std::string& cell, size_t row, const std::string& col) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw input_error("non-numeric feature cell at row " + std::to_string(row) +
                          ", column '" + col + "': '" + cell + "'");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::string>& pin_benign) {
    std::ifstream in(path);
    if (!in) throw input_error("file not found: " + path);

    std::string line;
    if (!std::getline(in, line)) throw input_error("empty file: " + path);
    const std::vector<std::string> header = split_line(line);

    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
        if (!seen.insert(h).second) throw input_error("duplicate header name: " + h);
    }

    size_t label_idx = header.size();
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) label_idx = i;
    }
    if (label_idx == header.size()) {
        throw input_error("label column '" + label_column + "' not found in header");
    }

    Dataset d;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i != label_idx) d.feature_names.push_back(header[i]);
    }

    std::unordered_map<std::string, int> class_ids;
    if (pin_benign) {
        class_ids.emplace(*pin_benign, 0);
        d.class_names.push_back(*pin_benign);
    }

    std::vector<double> values;
    size_t n_rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw input_error("row " + std::to_string(n_rows + 1) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        }
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i == label_idx) continue;
            values.push_back(parse_cell(cells[i], n_rows + 1, header[i]));
        }
        const std::string& label = cells[label_idx];
        auto it = class_ids.find(label);
        if (it == class_ids.end()) {
            it = class_ids.emplace(label, static_cast<int>(d.class_names.size())).first;
            d.class_names.push_back(label);
        }
        d.labels.push_back(it->second);
        ++n_rows;
    }
    if (n_rows < 2) throw input_error("dataset must have at least 2 rows, got " + std::to_string(n_rows));

    if (pin_benign) {
        const bool found = std::any_of(d.labels.begin(), d.labels.end(), [](int y) { return y == 0; });
        if (!found) throw input_error("pinned benign label '" + *pin_benign + "' not present in data");
    }

    const size_t n_cols = d.feature_names.size();
    d.features = Matrix(n_rows, n_cols);
    std::copy(values.begin(), values.end(), d.features.flat().begin());
    d.validate();
    return d;
}

void save_csv(const Dataset& d, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    for (const auto& name : d.feature_names) out << name << ',';
    out << label_column << '\n';
    std::ostringstream row;
    for (size_t r = 0; r < d.rows(); ++r) {
        row.str("");
        row.precision(17);
        for (size_t c = 0; c < d.feature_count(); ++c) row << d.features(r, c) << ',';
        row << d.class_names[static_cast<size_t>(d.labels[r])];
        out << row.str() << '\n';
    }
}

ColumnStats compute_stats(const Dataset& d) {
    const size_t n = d.rows();
    const size_t k = d.feature_count();
    ColumnStats stats;
    stats.mean.assign(k, 0.0);
    stats.stddev.assign(k, 0.0);
    for (size_t c = 0; c < k; ++c) {
        double sum = 0.0;
        for (size_t r = 0; r < n; ++r) sum += d.features(r, c);
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (size_t r = 0; r < n; ++r) {
            const double delta = d.features(r, c) - mean;
            sq += delta * delta;
        }
        const double var = sq / static_cast<double>(n);
        stats.mean[c] = mean;
        stats.stddev[c] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return stats;
}

NormalizeResult apply_stats(const Dataset& d, const ColumnStats& stats) {
    if (stats.mean.size() != d.feature_count()) {
        throw input_error("statistics column count does not match dataset");
    }
    NormalizeResult result;
    result.data = d;
    for (size_t c = 0; c < d.feature_count(); ++c) {
        if (stats.stddev[c] == 0.0) {
            for (size_t r = 0; r < d.rows(); ++r) result.data.features(r, c) = 0.0;
            result.constant_columns.push_back(d.feature_names[c]);
        } else {
            const double inv = 1.0 / stats.stddev[c];
            for (size_t r = 0; r < d.rows(); ++r) {
                result.data.features(r, c) = (d.features(r, c) - stats.mean[c]) * inv;
            }
        }
    }
    return result;
}

NormalizeResult normalize(const Dataset& d) { return apply_stats(d, compute_stats(d)); }

SplitDataset split(const Dataset& d, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw input_error("split fraction must be in (0,1), got " + std::to_string(fraction));
    }
    const size_t n = d.rows();
    const size_t n_train = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw input_error("split fraction " + std::to_string(fraction) +
                          " yields an empty train or test partition");
    }
    auto take = [&](size_t begin, size_t end) {
        Dataset part;
        part.feature_names = d.feature_names;
        part.class_names = d.class_names;
        part.features = Matrix(end - begin, d.feature_count());
        for (size_t r = begin; r < end; ++r) {
            for (size_t c = 0; c < d.feature_count(); ++c) {
                part.features(r - begin, c) = d.features(r, c);
            }
        }
        part.labels.assign(d.labels.begin() + static_cast<long>(begin),
                           d.labels.begin() + static_cast<long>(end));
        return part;
    };
    SplitDataset s;
    s.train = take(0, n_train);
    s.test = take(n_train, n);
    s.split_fraction = fraction;
    return s;
}

}  // namespace fsnid

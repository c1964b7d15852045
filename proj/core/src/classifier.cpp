#include "fsnid/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fsnid/errors.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

DenseClassifierParams DenseClassifierParams::init(size_t in_dim, size_t out_dim, Rng& rng,
                                                  size_t hidden) {
    DenseClassifierParams p;
    p.in_dim = in_dim;
    p.hidden = hidden;
    p.out_dim = out_dim;
    p.w1 = Matrix(hidden, in_dim);
    p.b1.assign(hidden, 0.0);
    p.w2 = Matrix(out_dim, hidden);
    p.b2.assign(out_dim, 0.0);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& v : p.w1.flat()) v = rng.uniform(-bound1, bound1);
    for (double& v : p.b1) v = rng.uniform(-bound1, bound1);
    for (double& v : p.w2.flat()) v = rng.uniform(-bound2, bound2);
    for (double& v : p.b2) v = rng.uniform(-bound2, bound2);
    return p;
}

RecurrentClassifierParams RecurrentClassifierParams::init(size_t in_dim, size_t out_dim, Rng& rng,
                                                          size_t hidden) {
    RecurrentClassifierParams p;
    p.cell = LstmCell::init(in_dim, rng, hidden);
    p.out_dim = out_dim;
    p.w_out = Matrix(out_dim, hidden);
    p.b_out.assign(out_dim, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& v : p.w_out.flat()) v = rng.uniform(-bound, bound);
    for (double& v : p.b_out) v = rng.uniform(-bound, bound);
    return p;
}

namespace {

void softmax_inplace(std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v - m);
        total += v;
    }
    for (double& v : logits) v /= total;
}

void gather_row(const Dataset& d, size_t row, const std::vector<size_t>& cols,
                std::vector<double>& out) {
    out.resize(cols.size());
    for (size_t c = 0; c < cols.size(); ++c) out[c] = d.features(row, cols[c]);
}

void check_cols(const Dataset& d, const std::vector<size_t>& cols) {
    if (cols.empty()) throw input_error("classifier requires a non-empty column set");
    for (size_t c : cols) {
        if (c >= d.feature_count()) throw input_error("classifier column index out of range");
    }
}

}  // namespace

std::vector<double> classifier_probs(const DenseClassifierParams& p, std::span<const double> x) {
    if (x.size() != p.in_dim) throw input_error("classifier_probs: dimension mismatch");
    std::vector<double> act(p.hidden);
    for (size_t h = 0; h < p.hidden; ++h) {
        double z = p.b1[h];
        const auto row = p.w1.row(h);
        for (size_t i = 0; i < p.in_dim; ++i) z += row[i] * x[i];
        act[h] = z > 0.0 ? z : 0.0;
    }
    std::vector<double> logits(p.out_dim);
    for (size_t k = 0; k < p.out_dim; ++k) {
        double z = p.b2[k];
        const auto row = p.w2.row(k);
        for (size_t h = 0; h < p.hidden; ++h) z += row[h] * act[h];
        logits[k] = z;
    }
    softmax_inplace(logits);
    return logits;
}

TrainedClassifier train_classifier(const Dataset& train, const std::vector<size_t>& cols,
                                   const ClassifierConfig& cfg) {
    check_cols(train, cols);
    const size_t n_classes = train.class_count();
    if (n_classes < 2) throw input_error("classifier requires at least 2 classes");
    const size_t n = train.rows();
    const size_t in_dim = cols.size();

    Rng rng(mix_seed(cfg.seed, 0x434c46u));
    TrainedClassifier model;
    model.cols = cols;
    model.params = DenseClassifierParams::init(in_dim, n_classes, rng, cfg.hidden);
    DenseClassifierParams& p = model.params;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<double> x, act(cfg.hidden), logits(n_classes), dlogits(n_classes),
        dact(cfg.hidden);
    const double lr = cfg.learning_rate;

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (size_t start = 0; start < n; start += cfg.batch_size) {
            const size_t end = std::min(n, start + cfg.batch_size);
            const double scale = lr / static_cast<double>(end - start);
            // accumulate one minibatch SGD step
            Matrix g_w1(cfg.hidden, in_dim);
            std::vector<double> g_b1(cfg.hidden, 0.0);
            Matrix g_w2(n_classes, cfg.hidden);
            std::vector<double> g_b2(n_classes, 0.0);
            for (size_t j = start; j < end; ++j) {
                const size_t row = order[j];
                gather_row(train, row, cols, x);
                for (size_t h = 0; h < cfg.hidden; ++h) {
                    double z = p.b1[h];
                    const auto w_row = p.w1.row(h);
                    for (size_t i = 0; i < in_dim; ++i) z += w_row[i] * x[i];
                    act[h] = z > 0.0 ? z : 0.0;
                }
                for (size_t k = 0; k < n_classes; ++k) {
                    double z = p.b2[k];
                    const auto w_row = p.w2.row(k);
                    for (size_t h = 0; h < cfg.hidden; ++h) z += w_row[h] * act[h];
                    logits[k] = z;
                }
                softmax_inplace(logits);
                const int label = train.labels[row];
                loss_sum += -std::log(std::max(logits[static_cast<size_t>(label)], 1e-300));
                for (size_t k = 0; k < n_classes; ++k) {
                    dlogits[k] = logits[k] - (static_cast<int>(k) == label ? 1.0 : 0.0);
                }
                std::fill(dact.begin(), dact.end(), 0.0);
                for (size_t k = 0; k < n_classes; ++k) {
                    const double dz = dlogits[k];
                    g_b2[k] += dz;
                    auto g_row = g_w2.row(k);
                    const auto w_row = p.w2.row(k);
                    for (size_t h = 0; h < cfg.hidden; ++h) {
                        g_row[h] += dz * act[h];
                        dact[h] += dz * w_row[h];
                    }
                }
                for (size_t h = 0; h < cfg.hidden; ++h) {
                    if (act[h] <= 0.0) continue;
                    g_b1[h] += dact[h];
                    auto g_row = g_w1.row(h);
                    for (size_t i = 0; i < in_dim; ++i) g_row[i] += dact[h] * x[i];
                }
            }
            for (size_t k = 0; k < p.w1.flat().size(); ++k) p.w1.flat()[k] -= scale * g_w1.flat()[k];
            for (size_t h = 0; h < cfg.hidden; ++h) p.b1[h] -= scale * g_b1[h];
            for (size_t k = 0; k < p.w2.flat().size(); ++k) p.w2.flat()[k] -= scale * g_w2.flat()[k];
            for (size_t k = 0; k < n_classes; ++k) p.b2[k] -= scale * g_b2[k];
        }
        const double epoch_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw numeric_error("classifier diverged at epoch " + std::to_string(epoch));
        }
        model.epoch_loss.push_back(epoch_loss);
    }
    return model;
}

TrainedSequenceClassifier train_sequence_classifier(const Dataset& train,
                                                    const std::vector<size_t>& cols,
                                                    const ClassifierConfig& cfg) {
    check_cols(train, cols);
    const size_t n_classes = train.class_count();
    if (n_classes < 2) throw input_error("classifier requires at least 2 classes");
    const size_t s = cfg.sequence_length;
    if (s == 0) throw input_error("sequence length must be positive");
    if (train.rows() < s + 1) {
        throw input_error("training data too short for sequence length " + std::to_string(s));
    }
    const size_t n_windows = train.rows() - s + 1;
    const size_t in_dim = cols.size();

    Rng rng(mix_seed(cfg.seed, 0x434c52u));
    TrainedSequenceClassifier model;
    model.cols = cols;
    model.sequence_length = s;
    model.params = RecurrentClassifierParams::init(in_dim, n_classes, rng, cfg.hidden);
    RecurrentClassifierParams& p = model.params;

    std::vector<size_t> order(n_windows);
    std::iota(order.begin(), order.end(), size_t{0});
    Matrix seq(s, in_dim);
    LstmTrace trace;
    std::vector<double> logits(n_classes), dlogits(n_classes), dh(cfg.hidden);

    auto fill_window = [&](size_t start) {
        for (size_t t = 0; t < s; ++t) {
            for (size_t c = 0; c < in_dim; ++c) seq(t, c) = train.features(start + t, cols[c]);
        }
    };

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (size_t start = 0; start < n_windows; start += cfg.batch_size) {
            const size_t end = std::min(n_windows, start + cfg.batch_size);
            const double scale = cfg.learning_rate / static_cast<double>(end - start);
            LstmCell g_cell = LstmCell::zeros(in_dim, cfg.hidden);
            Matrix g_wout(n_classes, cfg.hidden);
            std::vector<double> g_bout(n_classes, 0.0);
            for (size_t j = start; j < end; ++j) {
                const size_t w = order[j];
                fill_window(w);
                lstm_run(p.cell, seq, trace);
                const auto h_final = trace.hidden_state.row(s - 1);
                for (size_t k = 0; k < n_classes; ++k) {
                    double z = p.b_out[k];
                    const auto w_row = p.w_out.row(k);
                    for (size_t h = 0; h < cfg.hidden; ++h) z += w_row[h] * h_final[h];
                    logits[k] = z;
                }
                softmax_inplace(logits);
                const int label = train.labels[w + s - 1];
                loss_sum += -std::log(std::max(logits[static_cast<size_t>(label)], 1e-300));
                for (size_t k = 0; k < n_classes; ++k) {
                    dlogits[k] = logits[k] - (static_cast<int>(k) == label ? 1.0 : 0.0);
                }
                std::fill(dh.begin(), dh.end(), 0.0);
                for (size_t k = 0; k < n_classes; ++k) {
                    const double dz = dlogits[k];
                    g_bout[k] += dz;
                    auto g_row = g_wout.row(k);
                    const auto w_row = p.w_out.row(k);
                    for (size_t h = 0; h < cfg.hidden; ++h) {
                        g_row[h] += dz * h_final[h];
                        dh[h] += dz * w_row[h];
                    }
                }
                lstm_bptt(p.cell, seq, trace, dh, g_cell);
            }
            auto apply = [&](Matrix& param, const Matrix& grad) {
                for (size_t k = 0; k < param.flat().size(); ++k) {
                    param.flat()[k] -= scale * grad.flat()[k];
                }
            };
            apply(p.cell.wi, g_cell.wi);
            apply(p.cell.wf, g_cell.wf);
            apply(p.cell.wo, g_cell.wo);
            apply(p.cell.wg, g_cell.wg);
            apply(p.cell.ui, g_cell.ui);
            apply(p.cell.uf, g_cell.uf);
            apply(p.cell.uo, g_cell.uo);
            apply(p.cell.ug, g_cell.ug);
            for (size_t h = 0; h < cfg.hidden; ++h) {
                p.cell.bi[h] -= scale * g_cell.bi[h];
                p.cell.bf[h] -= scale * g_cell.bf[h];
                p.cell.bo[h] -= scale * g_cell.bo[h];
                p.cell.bg[h] -= scale * g_cell.bg[h];
            }
            apply(p.w_out, g_wout);
            for (size_t k = 0; k < n_classes; ++k) p.b_out[k] -= scale * g_bout[k];
        }
        const double epoch_loss = loss_sum / static_cast<double>(n_windows);
        if (!std::isfinite(epoch_loss)) {
            throw numeric_error("sequence classifier diverged at epoch " + std::to_string(epoch));
        }
        model.epoch_loss.push_back(epoch_loss);
    }
    return model;
}

namespace {

Metrics metrics_from_confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                               size_t n_classes) {
    Metrics m;
    size_t correct = 0;
    std::vector<size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
    size_t benign_total = 0, benign_wrong = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int pr = predicted[i];
        if (t == pr) {
            ++correct;
            ++tp[static_cast<size_t>(t)];
        } else {
            ++fn[static_cast<size_t>(t)];
            ++fp[static_cast<size_t>(pr)];
        }
        if (t == 0) {
            ++benign_total;
            if (pr != 0) ++benign_wrong;
        }
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    double f1_sum = 0.0;
    size_t f1_classes = 0;
    for (size_t k = 0; k < n_classes; ++k) {
        const size_t denom = 2 * tp[k] + fp[k] + fn[k];
        if (denom == 0) continue;  // class absent from truth and predictions
        f1_sum += 2.0 * static_cast<double>(tp[k]) / static_cast<double>(denom);
        ++f1_classes;
    }
    m.macro_f1 = f1_classes > 0 ? f1_sum / static_cast<double>(f1_classes) : 0.0;

    if (benign_total > 0) {
        m.fpr = static_cast<double>(benign_wrong) / static_cast<double>(benign_total);
    }
    return m;
}

}  // namespace

Metrics evaluate(const TrainedClassifier& model, const Dataset& test) {
    check_cols(test, model.cols);
    std::vector<int> predicted(test.rows());
    std::vector<double> x;
    for (size_t r = 0; r < test.rows(); ++r) {
        gather_row(test, r, model.cols, x);
        const std::vector<double> probs = classifier_probs(model.params, x);
        predicted[r] = static_cast<int>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
    return metrics_from_confusion(test.labels, predicted, test.class_count());
}

Metrics evaluate_sequence(const TrainedSequenceClassifier& model, const Dataset& test) {
    check_cols(test, model.cols);
    const size_t s = model.sequence_length;
    if (test.rows() < s) throw input_error("test data too short for sequence length");
    const size_t n_windows = test.rows() - s + 1;
    const size_t in_dim = model.cols.size();
    const size_t n_classes = model.params.out_dim;

    Matrix seq(s, in_dim);
    LstmTrace trace;
    std::vector<double> logits(n_classes);
    std::vector<int> truth(n_windows), predicted(n_windows);
    for (size_t w = 0; w < n_windows; ++w) {
        for (size_t t = 0; t < s; ++t) {
            for (size_t c = 0; c < in_dim; ++c) {
                seq(t, c) = test.features(w + t, model.cols[c]);
            }
        }
        lstm_run(model.params.cell, seq, trace);
        const auto h_final = trace.hidden_state.row(s - 1);
        for (size_t k = 0; k < n_classes; ++k) {
            double z = model.params.b_out[k];
            const auto w_row = model.params.w_out.row(k);
            for (size_t h = 0; h < model.params.cell.hidden; ++h) z += w_row[h] * h_final[h];
            logits[k] = z;
        }
        truth[w] = test.labels[w + s - 1];
        predicted[w] = static_cast<int>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
    }
    return metrics_from_confusion(truth, predicted, test.class_count());
}

std::string metrics_to_json(const Metrics& m, int indent) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    if (m.fpr) {
        j["fpr"] = *m.fpr;
    } else {
        j["fpr"] = nullptr;
    }
    return j.dump(indent);
}

}  // namespace fsnid

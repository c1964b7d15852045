#include "fsnid/mi_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>

#include "fsnid/errors.hpp"
#include "fsnid/optimizer.hpp"
#include "fsnid/parallel.hpp"

namespace fsnid {

void EstimatorConfig::validate() const {
    if (batch_size < 2) throw input_error("estimator batch size must be >= 2");
    if (steps == 0) throw input_error("estimator steps must be positive");
    if (tail_window == 0 || tail_window > steps) {
        throw input_error("tail window must be in [1, steps]");
    }
    if (temporal && sequence_length < 2) {
        throw input_error("temporal estimation requires sequence length >= 2");
    }
    if (hidden == 0) throw input_error("hidden width must be positive");
}

namespace {

// Uniform draw of b distinct rows via a full Fisher-Yates pass.
std::vector<size_t> draw_rows(size_t n_rows, size_t b, Rng& rng) {
    std::vector<size_t> idx(n_rows);
    std::iota(idx.begin(), idx.end(), size_t{0});
    rng.shuffle(idx);
    idx.resize(b);
    return idx;
}

// Shuffle-and-gather with the one-hot label encoding written in place;
// avoids per-step allocations in the training loop.
void sample_into(const Dataset& d, const std::vector<size_t>& cols, size_t b, Rng& rng,
                 bool marginal, std::vector<size_t>& scratch, Matrix& input) {
    const size_t n = d.rows();
    scratch.resize(n);
    std::iota(scratch.begin(), scratch.end(), size_t{0});
    rng.shuffle(scratch);
    size_t offset = 0;
    if (marginal) offset = 1 + rng.index(n - 1);
    const size_t k = cols.size();
    for (size_t j = 0; j < b; ++j) {
        const size_t row = scratch[j];
        auto out = input.row(j);
        for (size_t c = 0; c < k; ++c) out[c] = d.features(row, cols[c]);
        std::fill(out.begin() + static_cast<long>(k), out.end(), 0.0);
        const size_t label_row = marginal ? (row + offset) % n : row;
        out[k + static_cast<size_t>(d.labels[label_row])] = 1.0;
    }
}

Batch gather(const Dataset& d, const std::vector<size_t>& cols,
             const std::vector<size_t>& feature_rows, const std::vector<size_t>& label_rows) {
    Batch batch;
    batch.x = Matrix(feature_rows.size(), cols.size());
    batch.y.resize(label_rows.size());
    for (size_t j = 0; j < feature_rows.size(); ++j) {
        for (size_t c = 0; c < cols.size(); ++c) {
            batch.x(j, c) = d.features(feature_rows[j], cols[c]);
        }
        batch.y[j] = d.labels[label_rows[j]];
    }
    return batch;
}

void check_sample_pre(const Dataset& d, const std::vector<size_t>& cols, size_t b) {
    if (cols.empty()) throw input_error("sampling requires a non-empty column set");
    if (b > d.rows()) {
        throw input_error("batch size " + std::to_string(b) + " exceeds row count " +
                          std::to_string(d.rows()));
    }
    for (size_t c : cols) {
        if (c >= d.feature_count()) throw input_error("column index out of range");
    }
}

}  // namespace

Batch sample_joint(const Dataset& d, const std::vector<size_t>& cols, size_t b, Rng& rng) {
    check_sample_pre(d, cols, b);
    const std::vector<size_t> rows = draw_rows(d.rows(), b, rng);
    return gather(d, cols, rows, rows);
}

Batch sample_marginal(const Dataset& d, const std::vector<size_t>& cols, size_t b, Rng& rng) {
    check_sample_pre(d, cols, b);
    if (d.rows() < 2) throw input_error("marginal sampling requires at least 2 rows");
    const std::vector<size_t> rows = draw_rows(d.rows(), b, rng);
    const size_t offset = 1 + rng.index(d.rows() - 1);
    std::vector<size_t> label_rows(rows.size());
    for (size_t j = 0; j < rows.size(); ++j) label_rows[j] = (rows[j] + offset) % d.rows();
    return gather(d, cols, rows, label_rows);
}

SequenceBatch sequence_batches(const Dataset& d, const std::vector<size_t>& cols, size_t b,
                               size_t s, Rng& rng, SampleMode mode) {
    if (cols.empty()) throw input_error("sampling requires a non-empty column set");
    if (s == 0) throw input_error("sequence length must be positive");
    if (d.rows() < s + 1) {
        throw input_error("dataset with " + std::to_string(d.rows()) +
                          " rows is too short for sequence length " + std::to_string(s));
    }
    const size_t n_starts = d.rows() - s + 1;
    if (b > n_starts) {
        throw input_error("batch size " + std::to_string(b) + " exceeds " +
                          std::to_string(n_starts) + " available windows");
    }
    const std::vector<size_t> starts = draw_rows(n_starts, b, rng);
    size_t offset = 0;
    if (mode == SampleMode::marginal) offset = 1 + rng.index(n_starts - 1);

    SequenceBatch batch;
    batch.batch = b;
    batch.steps = s;
    batch.x = Matrix(b * s, cols.size());
    batch.y.resize(b * s);
    for (size_t j = 0; j < b; ++j) {
        const size_t f_start = starts[j];
        const size_t l_start = (f_start + offset) % n_starts;
        for (size_t t = 0; t < s; ++t) {
            for (size_t c = 0; c < cols.size(); ++c) {
                batch.x(j * s + t, c) = d.features(f_start + t, cols[c]);
            }
            batch.y[j * s + t] = d.labels[l_start + t];
        }
    }
    return batch;
}

namespace {

// features ++ one-hot(label) for every sample of the batch
Matrix compose_input(const Matrix& x, const std::vector<int>& y, size_t class_count) {
    Matrix input(x.rows(), x.cols() + class_count);
    for (size_t r = 0; r < x.rows(); ++r) {
        for (size_t c = 0; c < x.cols(); ++c) input(r, c) = x(r, c);
        input(r, x.cols() + static_cast<size_t>(y[r])) = 1.0;
    }
    return input;
}

double log_mean_exp(std::span<const double> values) {
    const double m = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc / static_cast<double>(values.size()));
}

// Gradient weights of the DV bound w.r.t. the per-sample statistics:
// +1/b for joint samples, -softmax for marginal samples.
void marginal_weights(std::span<const double> t_marginal, std::vector<double>& out) {
    const double m = *std::max_element(t_marginal.begin(), t_marginal.end());
    double total = 0.0;
    out.resize(t_marginal.size());
    for (size_t j = 0; j < t_marginal.size(); ++j) {
        out[j] = std::exp(t_marginal[j] - m);
        total += out[j];
    }
    for (double& w : out) w /= total;
}

}  // namespace

double dv_bound(const DenseParams& p, const Batch& joint, const Batch& marginal,
                size_t class_count) {
    if (joint.x.rows() == 0 || marginal.x.rows() == 0) {
        throw input_error("dv_bound: empty batch");
    }
    if (joint.x.cols() != marginal.x.cols()) {
        throw input_error("dv_bound: batches differ in feature dimensionality");
    }
    const Matrix joint_in = compose_input(joint.x, joint.y, class_count);
    const Matrix marg_in = compose_input(marginal.x, marginal.y, class_count);
    double joint_mean = 0.0;
    for (size_t r = 0; r < joint_in.rows(); ++r) joint_mean += dense_forward(p, joint_in.row(r));
    joint_mean /= static_cast<double>(joint_in.rows());
    std::vector<double> t_marg(marg_in.rows());
    for (size_t r = 0; r < marg_in.rows(); ++r) t_marg[r] = dense_forward(p, marg_in.row(r));
    const double bound = joint_mean - log_mean_exp(t_marg);
    if (!std::isfinite(bound)) throw numeric_error("dv_bound: non-finite network output");
    return bound;
}

double dv_bound_seq(const RecurrentParams& p, const SequenceBatch& joint,
                    const SequenceBatch& marginal, size_t class_count) {
    if (joint.batch == 0 || marginal.batch == 0) throw input_error("dv_bound: empty batch");
    const Matrix joint_in = compose_input(joint.x, joint.y, class_count);
    const Matrix marg_in = compose_input(marginal.x, marginal.y, class_count);
    const size_t s = joint.steps;
    const size_t dim = joint_in.cols();

    auto window = [&](const Matrix& m, size_t j) {
        Matrix w(s, dim);
        for (size_t t = 0; t < s; ++t) {
            for (size_t c = 0; c < dim; ++c) w(t, c) = m(j * s + t, c);
        }
        return w;
    };

    double joint_mean = 0.0;
    for (size_t j = 0; j < joint.batch; ++j) {
        joint_mean += recurrent_forward(p, window(joint_in, j));
    }
    joint_mean /= static_cast<double>(joint.batch);
    std::vector<double> t_marg(marginal.batch);
    for (size_t j = 0; j < marginal.batch; ++j) {
        t_marg[j] = recurrent_forward(p, window(marg_in, j));
    }
    const double bound = joint_mean - log_mean_exp(t_marg);
    if (!std::isfinite(bound)) throw numeric_error("dv_bound: non-finite network output");
    return bound;
}

namespace {

double finish_estimate(MiEstimate& est, const EstimatorConfig& cfg) {
    const size_t n = est.trace.size();
    double tail = 0.0;
    for (size_t i = n - cfg.tail_window; i < n; ++i) tail += est.trace[i];
    tail /= static_cast<double>(cfg.tail_window);
    est.value = std::max(0.0, tail);
    return est.value;
}

MiEstimate estimate_mi_static(const Dataset& d, const std::vector<size_t>& cols,
                              const EstimatorConfig& cfg) {
    const size_t class_count = d.class_count();
    const size_t in_dim = cols.size() + class_count;
    Rng rng(mix_seed(cfg.seed, 0x5741u));
    DenseParams params = DenseParams::init(in_dim, rng, cfg.hidden);
    DenseParams grad = DenseParams::zeros(in_dim, cfg.hidden);
    OptimizerState opt = OptimizerState::for_params(params.param_count(), cfg.learning_rate);
    auto param_views = params.views();
    auto grad_views = grad.views();

    const size_t b = cfg.batch_size;
    if (b > d.rows()) {
        throw input_error("batch size " + std::to_string(b) + " exceeds row count " +
                          std::to_string(d.rows()));
    }
    MiEstimate est;
    est.trace.reserve(cfg.steps);
    std::vector<double> t_joint(b), t_marg(b), weights;
    Matrix z_joint(b, cfg.hidden), z_marg(b, cfg.hidden);
    Matrix joint_in(b, in_dim), marg_in(b, in_dim);
    std::vector<size_t> scratch;

    for (size_t step = 0; step < cfg.steps; ++step) {
        sample_into(d, cols, b, rng, false, scratch, joint_in);
        sample_into(d, cols, b, rng, true, scratch, marg_in);

        double joint_mean = 0.0;
        for (size_t j = 0; j < b; ++j) {
            t_joint[j] = dense_forward_cached(params, joint_in.row(j), z_joint.row(j));
            joint_mean += t_joint[j];
        }
        joint_mean /= static_cast<double>(b);
        for (size_t j = 0; j < b; ++j) {
            t_marg[j] = dense_forward_cached(params, marg_in.row(j), z_marg.row(j));
        }
        const double bound = joint_mean - log_mean_exp(t_marg);
        if (!std::isfinite(bound)) {
            throw numeric_error("estimate_mi diverged at step " + std::to_string(step));
        }
        est.trace.push_back(bound);

        // ascend: accumulate -d(bound)/d(theta) and take a descent step
        for (auto g : grad_views) std::fill(g.begin(), g.end(), 0.0);
        const double joint_w = -1.0 / static_cast<double>(b);
        for (size_t j = 0; j < b; ++j) {
            dense_backward_cached(params, joint_in.row(j), z_joint.row(j), joint_w, grad);
        }
        marginal_weights(t_marg, weights);
        for (size_t j = 0; j < b; ++j) {
            dense_backward_cached(params, marg_in.row(j), z_marg.row(j), weights[j], grad);
        }
        opt_step(opt, param_views, grad_views);
    }
    finish_estimate(est, cfg);
    return est;
}

MiEstimate estimate_mi_temporal(const Dataset& d, const std::vector<size_t>& cols,
                                const EstimatorConfig& cfg) {
    const size_t class_count = d.class_count();
    const size_t in_dim = cols.size() + class_count;
    const size_t s = cfg.sequence_length;
    Rng rng(mix_seed(cfg.seed, 0x5742u));
    RecurrentParams params = RecurrentParams::init(in_dim, rng, cfg.hidden);
    RecurrentParams grad = RecurrentParams::zeros(in_dim, cfg.hidden);
    OptimizerState opt = OptimizerState::for_params(params.param_count(), cfg.learning_rate);
    auto param_views = params.views();
    auto grad_views = grad.views();

    const size_t b = cfg.batch_size;
    MiEstimate est;
    est.trace.reserve(cfg.steps);
    std::vector<double> t_joint(b), t_marg(b), weights, dh(cfg.hidden);
    Matrix seq(s, in_dim);
    std::vector<LstmTrace> joint_traces(b), marg_traces(b);

    auto fill_window = [&](const Matrix& m, size_t j) {
        for (size_t t = 0; t < s; ++t) {
            for (size_t c = 0; c < in_dim; ++c) seq(t, c) = m(j * s + t, c);
        }
    };
    auto readout = [&](const LstmTrace& trace) {
        const auto h = trace.hidden_state.row(s - 1);
        double out = params.b_out;
        for (size_t k = 0; k < cfg.hidden; ++k) out += params.w_out[k] * h[k];
        return out;
    };
    auto backprop = [&](const Matrix& m, size_t j, const LstmTrace& trace, double upstream) {
        fill_window(m, j);
        const auto h = trace.hidden_state.row(s - 1);
        grad.b_out += upstream;
        for (size_t k = 0; k < cfg.hidden; ++k) {
            grad.w_out[k] += upstream * h[k];
            dh[k] = upstream * params.w_out[k];
        }
        lstm_bptt(params.cell, seq, trace, dh, grad.cell);
    };

    for (size_t step = 0; step < cfg.steps; ++step) {
        const SequenceBatch joint = sequence_batches(d, cols, b, s, rng, SampleMode::joint);
        const SequenceBatch marg = sequence_batches(d, cols, b, s, rng, SampleMode::marginal);
        const Matrix joint_in = compose_input(joint.x, joint.y, class_count);
        const Matrix marg_in = compose_input(marg.x, marg.y, class_count);

        double joint_mean = 0.0;
        for (size_t j = 0; j < b; ++j) {
            fill_window(joint_in, j);
            lstm_run(params.cell, seq, joint_traces[j]);
            t_joint[j] = readout(joint_traces[j]);
            joint_mean += t_joint[j];
        }
        joint_mean /= static_cast<double>(b);
        for (size_t j = 0; j < b; ++j) {
            fill_window(marg_in, j);
            lstm_run(params.cell, seq, marg_traces[j]);
            t_marg[j] = readout(marg_traces[j]);
        }
        const double bound = joint_mean - log_mean_exp(t_marg);
        if (!std::isfinite(bound)) {
            throw numeric_error("estimate_mi diverged at step " + std::to_string(step));
        }
        est.trace.push_back(bound);

        for (auto g : grad_views) std::fill(g.begin(), g.end(), 0.0);
        const double joint_w = -1.0 / static_cast<double>(b);
        for (size_t j = 0; j < b; ++j) backprop(joint_in, j, joint_traces[j], joint_w);
        marginal_weights(t_marg, weights);
        for (size_t j = 0; j < b; ++j) backprop(marg_in, j, marg_traces[j], weights[j]);
        opt_step(opt, param_views, grad_views);
    }
    finish_estimate(est, cfg);
    return est;
}

}  // namespace

MiEstimate estimate_mi(const Dataset& d, const std::vector<size_t>& cols,
                       const EstimatorConfig& cfg) {
    cfg.validate();
    if (cols.empty()) throw input_error("estimate_mi requires a non-empty column set");
    return cfg.temporal ? estimate_mi_temporal(d, cols, cfg) : estimate_mi_static(d, cols, cfg);
}

PhiEstimate estimate_phi(const Dataset& d, const std::vector<size_t>& current_set, size_t i,
                         const EstimatorConfig& cfg, size_t repeats, uint64_t salt) {
    cfg.validate();
    if (repeats == 0) throw input_error("estimate_phi requires at least one repeat");
    if (std::find(current_set.begin(), current_set.end(), i) == current_set.end()) {
        throw input_error("estimate_phi: feature " + std::to_string(i) +
                          " is not in the current set");
    }
    std::vector<size_t> reduced;
    reduced.reserve(current_set.size() - 1);
    for (size_t c : current_set) {
        if (c != i) reduced.push_back(c);
    }

    // Independent trainings; each owns a derived seed so repeats and the
    // full/reduced pair can run in parallel without sharing streams.
    std::vector<double> full_values(repeats), reduced_values(repeats, 0.0);
    std::vector<std::function<void()>> tasks;
    for (size_t r = 0; r < repeats; ++r) {
        EstimatorConfig full_cfg = cfg;
        full_cfg.seed = mix_seed(cfg.seed, salt, r, 0);
        tasks.push_back([&, full_cfg, r] {
            full_values[r] = estimate_mi(d, current_set, full_cfg).value;
        });
        if (!reduced.empty()) {
            EstimatorConfig red_cfg = cfg;
            red_cfg.seed = mix_seed(cfg.seed, salt, r, 1);
            tasks.push_back([&, red_cfg, r] {
                reduced_values[r] = estimate_mi(d, reduced, red_cfg).value;
            });
        }
    }
    run_tasks(tasks, cfg.jobs);

    // Negative differences are estimator noise around a non-negative truth.
    PhiEstimate phi;
    phi.feature_index = i;
    phi.runs.resize(repeats);
    for (size_t r = 0; r < repeats; ++r) {
        phi.runs[r] = std::max(0.0, full_values[r] - reduced_values[r]);
    }
    double mean = 0.0;
    for (double v : phi.runs) mean += v;
    mean /= static_cast<double>(repeats);
    double sq = 0.0;
    for (double v : phi.runs) sq += (v - mean) * (v - mean);
    phi.mean = mean;
    phi.std_dev = repeats > 1 ? std::sqrt(sq / static_cast<double>(repeats - 1)) : 0.0;
    return phi;
}

}  // namespace fsnid

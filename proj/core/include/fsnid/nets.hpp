#pragma once

#include <span>
#include <vector>

#include "fsnid/matrix.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

constexpr size_t kDefaultHidden = 50;

// One hidden relu layer with a scalar readout: w2 . relu(w1 x + b1) + b2.
struct DenseParams {
    size_t in_dim = 0;
    size_t hidden = kDefaultHidden;
    Matrix w1;               // hidden x in_dim
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;

    static DenseParams zeros(size_t in_dim, size_t hidden = kDefaultHidden);
    static DenseParams init(size_t in_dim, Rng& rng, size_t hidden = kDefaultHidden);

    std::vector<std::span<double>> views();
    size_t param_count() const { return hidden * in_dim + 2 * hidden + 1; }
};

double dense_forward(const DenseParams& p, std::span<const double> x);

// Forward that also writes pre-activations, so a following backward pass can
// skip re-evaluating the hidden layer.
double dense_forward_cached(const DenseParams& p, std::span<const double> x,
                            std::span<double> z_out);

// Exact gradient of dense_forward w.r.t. every parameter, scaled by upstream,
// accumulated into grad.
void dense_backward(const DenseParams& p, std::span<const double> x, double upstream,
                    DenseParams& grad);

void dense_backward_cached(const DenseParams& p, std::span<const double> x,
                           std::span<const double> z, double upstream, DenseParams& grad);

// Standard 4-gate recurrent cell (sigmoid input/forget/output gates, tanh
// candidate), hidden size 50 by default.
struct LstmCell {
    size_t in_dim = 0;
    size_t hidden = kDefaultHidden;
    Matrix wi, wf, wo, wg;   // hidden x in_dim
    Matrix ui, uf, uo, ug;   // hidden x hidden
    std::vector<double> bi, bf, bo, bg;

    static LstmCell zeros(size_t in_dim, size_t hidden = kDefaultHidden);
    static LstmCell init(size_t in_dim, Rng& rng, size_t hidden = kDefaultHidden);

    void collect_views(std::vector<std::span<double>>& out);
    size_t param_count() const { return 4 * (hidden * in_dim + hidden * hidden + hidden); }
};

// Per-step activations cached during the forward pass for backpropagation
// through time.
struct LstmTrace {
    size_t steps = 0;
    Matrix gate_i, gate_f, gate_o, gate_g;  // steps x hidden
    Matrix cell, hidden_state, tanh_cell;   // steps x hidden
};

// Runs the cell over a time-ordered sequence from zero initial state.
// seq is (steps x in_dim) row-major; returns the trace of states.
void lstm_run(const LstmCell& cell, const Matrix& seq, LstmTrace& trace);

// Backpropagates d(loss)/d(final hidden state) through the whole sequence,
// accumulating parameter gradients into grad.
void lstm_bptt(const LstmCell& cell, const Matrix& seq, const LstmTrace& trace,
               std::span<const double> d_hidden_final, LstmCell& grad);

// Recurrent scalar estimator: LSTM cell plus a dense readout (hidden -> 1)
// applied to the final hidden state.
struct RecurrentParams {
    LstmCell cell;
    std::vector<double> w_out;  // hidden
    double b_out = 0.0;

    static RecurrentParams zeros(size_t in_dim, size_t hidden = kDefaultHidden);
    static RecurrentParams init(size_t in_dim, Rng& rng, size_t hidden = kDefaultHidden);

    std::vector<std::span<double>> views();
    size_t param_count() const { return cell.param_count() + cell.hidden + 1; }
};

double recurrent_forward(const RecurrentParams& p, const Matrix& seq);

void recurrent_backward(const RecurrentParams& p, const Matrix& seq, double upstream,
                        RecurrentParams& grad);

}  // namespace fsnid

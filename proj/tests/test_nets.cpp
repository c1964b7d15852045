#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsnid/errors.hpp"
#include "fsnid/nets.hpp"
#include "fsnid/rng.hpp"

using namespace fsnid;

namespace {

// Straight-line re-evaluation of the dense formula, kept independent of the
// library path on purpose.
double dense_oracle(const DenseParams& p, const std::vector<double>& x) {
    double out = p.b2;
    for (size_t h = 0; h < p.hidden; ++h) {
        double z = p.b1[h];
        for (size_t i = 0; i < p.in_dim; ++i) z += p.w1(h, i) * x[i];
        const double a = z > 0.0 ? z : 0.0;
        out += p.w2[h] * a;
    }
    return out;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Central finite difference of f along one parameter coordinate.
template <typename F>
double central_diff(double& coord, F&& f, double h = 1e-5) {
    const double saved = coord;
    coord = saved + h;
    const double up = f();
    coord = saved - h;
    const double down = f();
    coord = saved;
    return (up - down) / (2.0 * h);
}

bool grad_close(double analytic, double numeric, double rel_tol) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / scale <= rel_tol;
}

Matrix random_seq(size_t steps, size_t dim, Rng& rng) {
    Matrix seq(steps, dim);
    for (double& v : seq.flat()) v = rng.uniform(-1.0, 1.0);
    return seq;
}

}  // namespace

TEST_CASE("dense_forward: zero parameters give zero") {
    DenseParams p = DenseParams::zeros(4);
    const std::vector<double> x = {1.0, -2.0, 0.5, 3.0};
    CHECK(dense_forward(p, x) == 0.0);
}

TEST_CASE("dense_forward: single-unit passthrough in the linear regime") {
    DenseParams p = DenseParams::zeros(3, 2);
    p.w1(0, 1) = 2.0;  // reads x[1], scaled
    p.w2[0] = 1.0;
    const std::vector<double> x = {0.0, 1.5, 0.0};
    CHECK(dense_forward(p, x) == doctest::Approx(3.0));
}

TEST_CASE("dense_forward: matches the re-evaluation oracle on random draws") {
    Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        const size_t in = 1 + rng.index(8);
        DenseParams p = DenseParams::init(in, rng);
        std::vector<double> x(in);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        CHECK(dense_forward(p, x) == doctest::Approx(dense_oracle(p, x)).epsilon(1e-12));
    }
}

TEST_CASE("dense_forward: dimension mismatch throws") {
    DenseParams p = DenseParams::zeros(3);
    const std::vector<double> x = {1.0, 2.0};
    CHECK_THROWS_AS(dense_forward(p, x), input_error);
}

TEST_CASE("dense_forward: positively homogeneous in w2 with b2=0") {
    Rng rng(7);
    DenseParams p = DenseParams::init(5, rng);
    p.b2 = 0.0;
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const double base = dense_forward(p, x);
    for (double& w : p.w2) w *= 2.0;
    CHECK(dense_forward(p, x) == doctest::Approx(2.0 * base).epsilon(1e-15));
}

TEST_CASE("dense_backward: bias gradient is the upstream, zero upstream is zero") {
    Rng rng(3);
    DenseParams p = DenseParams::init(4, rng);
    std::vector<double> x(4, 0.7);

    DenseParams grad = DenseParams::zeros(4);
    dense_backward(p, x, 2.5, grad);
    CHECK(grad.b2 == doctest::Approx(2.5));

    DenseParams zero_grad = DenseParams::zeros(4);
    dense_backward(p, x, 0.0, zero_grad);
    for (auto view : zero_grad.views()) {
        for (double v : view) CHECK(v == 0.0);
    }
}

TEST_CASE("dense_backward: 20 random finite-difference checks at 1e-4") {
    Rng rng(2024);
    for (int rep = 0; rep < 20; ++rep) {
        const size_t in = 1 + rng.index(6);
        DenseParams p = DenseParams::init(in, rng, 10);
        std::vector<double> x(in);
        for (double& v : x) v = rng.uniform(-1.5, 1.5);
        const double upstream = rng.uniform(0.5, 2.0);

        DenseParams grad = DenseParams::zeros(in, 10);
        dense_backward(p, x, upstream, grad);

        auto f = [&] { return upstream * dense_forward(p, x); };
        auto p_views = p.views();
        auto g_views = grad.views();
        for (size_t v = 0; v < p_views.size(); ++v) {
            for (size_t k = 0; k < p_views[v].size(); ++k) {
                const double numeric = central_diff(p_views[v][k], f);
                CHECK_MESSAGE(grad_close(g_views[v][k], numeric, 1e-4),
                              "view ", v, " coord ", k, " analytic ", g_views[v][k],
                              " numeric ", numeric);
            }
        }
    }
}

TEST_CASE("recurrent_forward: all-zero parameters give the readout bias") {
    RecurrentParams p = RecurrentParams::zeros(3);
    p.b_out = 0.375;
    Rng rng(1);
    const Matrix seq = random_seq(4, 3, rng);
    CHECK(recurrent_forward(p, seq) == doctest::Approx(0.375));
}

TEST_CASE("recurrent_forward: s=1 matches a hand-computed gated step") {
    // 2-dim input, hidden width 1, small fixed weights
    RecurrentParams p = RecurrentParams::zeros(2, 1);
    p.cell.wi(0, 0) = 0.3;
    p.cell.wi(0, 1) = -0.2;
    p.cell.wf(0, 0) = 0.1;
    p.cell.wo(0, 0) = 0.5;
    p.cell.wg(0, 1) = 0.4;
    p.cell.bi[0] = 0.05;
    p.cell.bf[0] = -0.1;
    p.cell.bo[0] = 0.2;
    p.cell.bg[0] = 0.15;
    p.w_out[0] = 1.5;
    p.b_out = -0.25;

    Matrix seq(1, 2);
    seq(0, 0) = 0.8;
    seq(0, 1) = -0.6;

    const double gi = sigmoid(0.3 * 0.8 + (-0.2) * (-0.6) + 0.05);
    const double go = sigmoid(0.5 * 0.8 + 0.2);
    const double gg = std::tanh(0.4 * (-0.6) + 0.15);
    const double c = gi * gg;  // zero initial cell, forget gate drops out
    const double h = go * std::tanh(c);
    const double expected = 1.5 * h - 0.25;

    CHECK(recurrent_forward(p, seq) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("recurrent_forward: duplicating the final timestep changes the output") {
    Rng rng(11);
    RecurrentParams p = RecurrentParams::init(3, rng, 8);
    const Matrix seq = random_seq(5, 3, rng);
    Matrix longer(6, 3);
    for (size_t t = 0; t < 5; ++t) {
        for (size_t c = 0; c < 3; ++c) longer(t, c) = seq(t, c);
    }
    for (size_t c = 0; c < 3; ++c) longer(5, c) = seq(4, c);
    CHECK(std::abs(recurrent_forward(p, seq) - recurrent_forward(p, longer)) > 1e-9);
}

TEST_CASE("recurrent_forward: empty sequence throws") {
    RecurrentParams p = RecurrentParams::zeros(2);
    Matrix empty(0, 2);
    CHECK_THROWS_AS(recurrent_forward(p, empty), input_error);
}

TEST_CASE("recurrent_backward: zero upstream gives zero gradient") {
    Rng rng(13);
    RecurrentParams p = RecurrentParams::init(2, rng, 4);
    const Matrix seq = random_seq(3, 2, rng);
    RecurrentParams grad = RecurrentParams::zeros(2, 4);
    recurrent_backward(p, seq, 0.0, grad);
    for (auto view : grad.views()) {
        for (double v : view) CHECK(v == 0.0);
    }
}

TEST_CASE("recurrent_backward: s=1 analytic single-step derivation") {
    RecurrentParams p = RecurrentParams::zeros(2, 1);
    p.cell.wi(0, 0) = 0.3;
    p.cell.wf(0, 1) = -0.4;
    p.cell.wo(0, 0) = 0.25;
    p.cell.wg(0, 1) = 0.6;
    p.cell.bi[0] = 0.1;
    p.cell.bo[0] = -0.05;
    p.cell.bg[0] = 0.2;
    p.w_out[0] = 2.0;
    p.b_out = 0.0;
    Matrix seq(1, 2);
    seq(0, 0) = 0.5;
    seq(0, 1) = -0.3;

    RecurrentParams grad = RecurrentParams::zeros(2, 1);
    recurrent_backward(p, seq, 1.0, grad);

    const double zi = 0.3 * 0.5 + 0.1;
    const double zo = 0.25 * 0.5 - 0.05;
    const double zg = 0.6 * (-0.3) + 0.2;
    const double gi = sigmoid(zi), go = sigmoid(zo), gg = std::tanh(zg);
    const double c = gi * gg;
    const double tc = std::tanh(c);

    // readout: d/d(w_out) = h, d/d(b_out) = 1
    CHECK(grad.w_out[0] == doctest::Approx(go * tc).epsilon(1e-12));
    CHECK(grad.b_out == doctest::Approx(1.0));
    // output gate bias: dh/dzo = tanh(c) * go(1-go), scaled by w_out
    CHECK(grad.cell.bo[0] == doctest::Approx(2.0 * tc * go * (1.0 - go)).epsilon(1e-10));
    // input gate bias: dh/dzi = go (1-tc^2) gg gi(1-gi)
    CHECK(grad.cell.bi[0] ==
          doctest::Approx(2.0 * go * (1.0 - tc * tc) * gg * gi * (1.0 - gi)).epsilon(1e-10));
    // candidate bias: dh/dzg = go (1-tc^2) gi (1-gg^2)
    CHECK(grad.cell.bg[0] ==
          doctest::Approx(2.0 * go * (1.0 - tc * tc) * gi * (1.0 - gg * gg)).epsilon(1e-10));
    // recurrent weights see h_0 = 0, so their gradient vanishes at s=1
    CHECK(grad.cell.ui(0, 0) == 0.0);
    CHECK(grad.cell.uf(0, 0) == 0.0);
}

TEST_CASE("recurrent_backward: 20 random finite-difference checks at 1e-3, s up to 10") {
    Rng rng(777);
    for (int rep = 0; rep < 20; ++rep) {
        const size_t in = 1 + rng.index(3);
        const size_t hid = 3;
        const size_t steps = rep < 10 ? 1 + rng.index(4) : 10;
        RecurrentParams p = RecurrentParams::init(in, rng, hid);
        const Matrix seq = random_seq(steps, in, rng);
        const double upstream = rng.uniform(0.5, 1.5);

        RecurrentParams grad = RecurrentParams::zeros(in, hid);
        recurrent_backward(p, seq, upstream, grad);

        auto f = [&] { return upstream * recurrent_forward(p, seq); };
        auto p_views = p.views();
        auto g_views = grad.views();
        for (size_t v = 0; v < p_views.size(); ++v) {
            for (size_t k = 0; k < p_views[v].size(); ++k) {
                const double numeric = central_diff(p_views[v][k], f);
                CHECK_MESSAGE(grad_close(g_views[v][k], numeric, 1e-3),
                              "view ", v, " coord ", k, " analytic ", g_views[v][k],
                              " numeric ", numeric);
            }
        }
    }
}

TEST_CASE("init: parameters within the fan-in bound, trajectories reproducible") {
    Rng a(5), b(5);
    DenseParams pa = DenseParams::init(9, a);
    DenseParams pb = DenseParams::init(9, b);
    CHECK(pa.w1 == pb.w1);
    CHECK(pa.b2 == pb.b2);
    const double bound = 1.0 / 3.0;
    for (double v : pa.w1.flat()) {
        CHECK(v <= bound);
        CHECK(v >= -bound);
    }
}

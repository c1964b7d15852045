#include "fsnid/nets.hpp"

#include <cmath>

#include "fsnid/errors.hpp"

namespace fsnid {

namespace {

void check_dim(size_t got, size_t want, const char* what) {
    if (got != want) {
        throw input_error(std::string(what) + ": dimension mismatch, got " + std::to_string(got) +
                          ", expected " + std::to_string(want));
    }
}

void fill_uniform(std::span<double> out, double bound, Rng& rng) {
    for (double& v : out) v = rng.uniform(-bound, bound);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Four-lane dot product; the fixed summation order keeps results
// deterministic while letting the loop vectorize.
inline double dot(const double* a, const double* b, size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

DenseParams DenseParams::zeros(size_t in_dim, size_t hidden) {
    DenseParams p;
    p.in_dim = in_dim;
    p.hidden = hidden;
    p.w1 = Matrix(hidden, in_dim);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(hidden, 0.0);
    p.b2 = 0.0;
    return p;
}

DenseParams DenseParams::init(size_t in_dim, Rng& rng, size_t hidden) {
    DenseParams p = zeros(in_dim, hidden);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    fill_uniform(p.w1.flat(), bound1, rng);
    fill_uniform(p.b1, bound1, rng);
    fill_uniform(p.w2, bound2, rng);
    p.b2 = rng.uniform(-bound2, bound2);
    return p;
}

std::vector<std::span<double>> DenseParams::views() {
    return {w1.flat(), {b1.data(), b1.size()}, {w2.data(), w2.size()}, {&b2, 1}};
}

double dense_forward(const DenseParams& p, std::span<const double> x) {
    check_dim(x.size(), p.in_dim, "dense_forward");
    double out = p.b2;
    for (size_t h = 0; h < p.hidden; ++h) {
        const double z = p.b1[h] + dot(p.w1.row(h).data(), x.data(), p.in_dim);
        if (z > 0.0) out += p.w2[h] * z;
    }
    return out;
}

double dense_forward_cached(const DenseParams& p, std::span<const double> x,
                            std::span<double> z_out) {
    check_dim(x.size(), p.in_dim, "dense_forward");
    check_dim(z_out.size(), p.hidden, "dense_forward cache");
    double out = p.b2;
    for (size_t h = 0; h < p.hidden; ++h) {
        const double z = p.b1[h] + dot(p.w1.row(h).data(), x.data(), p.in_dim);
        z_out[h] = z;
        if (z > 0.0) out += p.w2[h] * z;
    }
    return out;
}

void dense_backward_cached(const DenseParams& p, std::span<const double> x,
                           std::span<const double> z, double upstream, DenseParams& grad) {
    grad.b2 += upstream;
    for (size_t h = 0; h < p.hidden; ++h) {
        if (z[h] <= 0.0) continue;
        grad.w2[h] += upstream * z[h];
        const double dz = upstream * p.w2[h];
        grad.b1[h] += dz;
        const auto g_row = grad.w1.row(h);
        for (size_t i = 0; i < p.in_dim; ++i) g_row[i] += dz * x[i];
    }
}

void dense_backward(const DenseParams& p, std::span<const double> x, double upstream,
                    DenseParams& grad) {
    check_dim(x.size(), p.in_dim, "dense_backward");
    std::vector<double> z(p.hidden);
    dense_forward_cached(p, x, z);
    dense_backward_cached(p, x, z, upstream, grad);
}

LstmCell LstmCell::zeros(size_t in_dim, size_t hidden) {
    LstmCell c;
    c.in_dim = in_dim;
    c.hidden = hidden;
    for (Matrix* m : {&c.wi, &c.wf, &c.wo, &c.wg}) *m = Matrix(hidden, in_dim);
    for (Matrix* m : {&c.ui, &c.uf, &c.uo, &c.ug}) *m = Matrix(hidden, hidden);
    for (auto* b : {&c.bi, &c.bf, &c.bo, &c.bg}) b->assign(hidden, 0.0);
    return c;
}

LstmCell LstmCell::init(size_t in_dim, Rng& rng, size_t hidden) {
    LstmCell c = zeros(in_dim, hidden);
    const double bound_w = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double bound_u = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Matrix* m : {&c.wi, &c.wf, &c.wo, &c.wg}) fill_uniform(m->flat(), bound_w, rng);
    for (Matrix* m : {&c.ui, &c.uf, &c.uo, &c.ug}) fill_uniform(m->flat(), bound_u, rng);
    for (auto* b : {&c.bi, &c.bf, &c.bo, &c.bg}) fill_uniform(*b, bound_u, rng);
    return c;
}

void LstmCell::collect_views(std::vector<std::span<double>>& out) {
    for (Matrix* m : {&wi, &wf, &wo, &wg, &ui, &uf, &uo, &ug}) out.push_back(m->flat());
    for (auto* b : {&bi, &bf, &bo, &bg}) out.push_back({b->data(), b->size()});
}

void lstm_run(const LstmCell& cell, const Matrix& seq, LstmTrace& trace) {
    if (seq.rows() == 0) throw input_error("lstm_run: empty sequence");
    check_dim(seq.cols(), cell.in_dim, "lstm_run");
    const size_t steps = seq.rows();
    const size_t hid = cell.hidden;
    trace.steps = steps;
    for (Matrix* m : {&trace.gate_i, &trace.gate_f, &trace.gate_o, &trace.gate_g, &trace.cell,
                      &trace.hidden_state, &trace.tanh_cell}) {
        if (m->rows() != steps || m->cols() != hid) *m = Matrix(steps, hid);
    }

    std::vector<double> prev_h(hid, 0.0), prev_c(hid, 0.0);
    for (size_t t = 0; t < steps; ++t) {
        const auto x = seq.row(t);
        auto gi = trace.gate_i.row(t);
        auto gf = trace.gate_f.row(t);
        auto go = trace.gate_o.row(t);
        auto gg = trace.gate_g.row(t);
        auto ct = trace.cell.row(t);
        auto ht = trace.hidden_state.row(t);
        auto tc = trace.tanh_cell.row(t);
        for (size_t h = 0; h < hid; ++h) {
            const size_t in = cell.in_dim;
            double zi = cell.bi[h] + dot(cell.wi.row(h).data(), x.data(), in) +
                        dot(cell.ui.row(h).data(), prev_h.data(), hid);
            double zf = cell.bf[h] + dot(cell.wf.row(h).data(), x.data(), in) +
                        dot(cell.uf.row(h).data(), prev_h.data(), hid);
            double zo = cell.bo[h] + dot(cell.wo.row(h).data(), x.data(), in) +
                        dot(cell.uo.row(h).data(), prev_h.data(), hid);
            double zg = cell.bg[h] + dot(cell.wg.row(h).data(), x.data(), in) +
                        dot(cell.ug.row(h).data(), prev_h.data(), hid);
            gi[h] = sigmoid(zi);
            gf[h] = sigmoid(zf);
            go[h] = sigmoid(zo);
            gg[h] = std::tanh(zg);
            ct[h] = gf[h] * prev_c[h] + gi[h] * gg[h];
            tc[h] = std::tanh(ct[h]);
            ht[h] = go[h] * tc[h];
        }
        for (size_t h = 0; h < hid; ++h) {
            prev_h[h] = ht[h];
            prev_c[h] = ct[h];
        }
    }
}

void lstm_bptt(const LstmCell& cell, const Matrix& seq, const LstmTrace& trace,
               std::span<const double> d_hidden_final, LstmCell& grad) {
    const size_t steps = trace.steps;
    const size_t hid = cell.hidden;
    std::vector<double> dh(d_hidden_final.begin(), d_hidden_final.end());
    std::vector<double> dc(hid, 0.0);
    std::vector<double> dzi(hid), dzf(hid), dzo(hid), dzg(hid), dh_prev(hid);

    for (size_t t = steps; t-- > 0;) {
        const auto gi = trace.gate_i.row(t);
        const auto gf = trace.gate_f.row(t);
        const auto go = trace.gate_o.row(t);
        const auto gg = trace.gate_g.row(t);
        const auto tc = trace.tanh_cell.row(t);
        const auto x = seq.row(t);
        const bool first = (t == 0);
        for (size_t h = 0; h < hid; ++h) {
            const double d_out = dh[h] * tc[h];
            dc[h] += dh[h] * go[h] * (1.0 - tc[h] * tc[h]);
            const double prev_c = first ? 0.0 : trace.cell(t - 1, h);
            const double d_f = dc[h] * prev_c;
            const double d_i = dc[h] * gg[h];
            const double d_g = dc[h] * gi[h];
            dzi[h] = d_i * gi[h] * (1.0 - gi[h]);
            dzf[h] = d_f * gf[h] * (1.0 - gf[h]);
            dzo[h] = d_out * go[h] * (1.0 - go[h]);
            dzg[h] = d_g * (1.0 - gg[h] * gg[h]);
            dc[h] *= gf[h];
        }
        for (size_t h = 0; h < hid; ++h) {
            grad.bi[h] += dzi[h];
            grad.bf[h] += dzf[h];
            grad.bo[h] += dzo[h];
            grad.bg[h] += dzg[h];
            auto gwi = grad.wi.row(h);
            auto gwf = grad.wf.row(h);
            auto gwo = grad.wo.row(h);
            auto gwg = grad.wg.row(h);
            for (size_t i = 0; i < cell.in_dim; ++i) {
                const double xi = x[i];
                gwi[i] += dzi[h] * xi;
                gwf[i] += dzf[h] * xi;
                gwo[i] += dzo[h] * xi;
                gwg[i] += dzg[h] * xi;
            }
            if (!first) {
                const auto hp = trace.hidden_state.row(t - 1);
                auto gui = grad.ui.row(h);
                auto guf = grad.uf.row(h);
                auto guo = grad.uo.row(h);
                auto gug = grad.ug.row(h);
                for (size_t j = 0; j < hid; ++j) {
                    const double hj = hp[j];
                    gui[j] += dzi[h] * hj;
                    guf[j] += dzf[h] * hj;
                    guo[j] += dzo[h] * hj;
                    gug[j] += dzg[h] * hj;
                }
            }
        }
        if (!first) {
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (size_t h = 0; h < hid; ++h) {
                const auto ui_r = cell.ui.row(h);
                const auto uf_r = cell.uf.row(h);
                const auto uo_r = cell.uo.row(h);
                const auto ug_r = cell.ug.row(h);
                const double di = dzi[h], df = dzf[h], doo = dzo[h], dg = dzg[h];
                for (size_t j = 0; j < hid; ++j) {
                    dh_prev[j] += ui_r[j] * di + uf_r[j] * df + uo_r[j] * doo + ug_r[j] * dg;
                }
            }
            dh = dh_prev;
        }
    }
}

RecurrentParams RecurrentParams::zeros(size_t in_dim, size_t hidden) {
    RecurrentParams p;
    p.cell = LstmCell::zeros(in_dim, hidden);
    p.w_out.assign(hidden, 0.0);
    p.b_out = 0.0;
    return p;
}

RecurrentParams RecurrentParams::init(size_t in_dim, Rng& rng, size_t hidden) {
    RecurrentParams p;
    p.cell = LstmCell::init(in_dim, rng, hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    p.w_out.assign(hidden, 0.0);
    fill_uniform(p.w_out, bound, rng);
    p.b_out = rng.uniform(-bound, bound);
    return p;
}

std::vector<std::span<double>> RecurrentParams::views() {
    std::vector<std::span<double>> out;
    cell.collect_views(out);
    out.push_back({w_out.data(), w_out.size()});
    out.push_back({&b_out, 1});
    return out;
}

double recurrent_forward(const RecurrentParams& p, const Matrix& seq) {
    LstmTrace trace;
    lstm_run(p.cell, seq, trace);
    const auto h_final = trace.hidden_state.row(trace.steps - 1);
    double out = p.b_out;
    for (size_t h = 0; h < p.cell.hidden; ++h) out += p.w_out[h] * h_final[h];
    return out;
}

void recurrent_backward(const RecurrentParams& p, const Matrix& seq, double upstream,
                        RecurrentParams& grad) {
    LstmTrace trace;
    lstm_run(p.cell, seq, trace);
    const auto h_final = trace.hidden_state.row(trace.steps - 1);
    grad.b_out += upstream;
    std::vector<double> dh(p.cell.hidden);
    for (size_t h = 0; h < p.cell.hidden; ++h) {
        grad.w_out[h] += upstream * h_final[h];
        dh[h] = upstream * p.w_out[h];
    }
    lstm_bptt(p.cell, seq, trace, dh, grad.cell);
}

}  // namespace fsnid

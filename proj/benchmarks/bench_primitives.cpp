#include <benchmark/benchmark.h>

#include <numeric>

#include "fsnid/mi_estimator.hpp"
#include "fsnid/nets.hpp"
#include "fsnid/optimizer.hpp"
#include "fsnid/rng.hpp"
#include "fsnid/synthetic.hpp"

using namespace fsnid;

static void DenseForward(benchmark::State& state) {
    const size_t in_dim = static_cast<size_t>(state.range(0));
    Rng rng(1);
    const DenseParams p = DenseParams::init(in_dim, rng);
    std::vector<double> x(in_dim);
    for (double& v : x) v = rng.uniform(-1, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_forward(p, x));
    }
}
BENCHMARK(DenseForward)->Arg(8)->Arg(32)->Arg(64);

static void DenseBackward(benchmark::State& state) {
    const size_t in_dim = static_cast<size_t>(state.range(0));
    Rng rng(2);
    const DenseParams p = DenseParams::init(in_dim, rng);
    DenseParams grad = DenseParams::zeros(in_dim);
    std::vector<double> x(in_dim);
    for (double& v : x) v = rng.uniform(-1, 1);
    for (auto _ : state) {
        dense_backward(p, x, 0.01, grad);
        benchmark::DoNotOptimize(grad.b2);
    }
}
BENCHMARK(DenseBackward)->Arg(8)->Arg(32)->Arg(64);

static void RecurrentForward(benchmark::State& state) {
    const size_t steps = static_cast<size_t>(state.range(0));
    Rng rng(3);
    const RecurrentParams p = RecurrentParams::init(6, rng);
    Matrix seq(steps, 6);
    for (double& v : seq.flat()) v = rng.uniform(-1, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(recurrent_forward(p, seq));
    }
}
BENCHMARK(RecurrentForward)->Arg(1)->Arg(10);

static void AdamStep(benchmark::State& state) {
    const size_t in_dim = static_cast<size_t>(state.range(0));
    Rng rng(4);
    DenseParams p = DenseParams::init(in_dim, rng);
    DenseParams g = DenseParams::init(in_dim, rng);
    OptimizerState opt = OptimizerState::for_params(p.param_count(), 1e-4);
    auto pv = p.views();
    auto gv = g.views();
    for (auto _ : state) {
        opt_step(opt, pv, gv);
        benchmark::DoNotOptimize(p.b2);
    }
}
BENCHMARK(AdamStep)->Arg(8)->Arg(64);

static void JointSampling(benchmark::State& state) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::bench_binary;
    spec.rows = static_cast<size_t>(state.range(0));
    spec.noise_features = 8;
    spec.seed = 5;
    const Dataset d = generate(spec).data;
    Rng rng(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_joint(d, {0, 1, 2, 3}, 10, rng));
    }
}
BENCHMARK(JointSampling)->Arg(500)->Arg(2000);

static void PluginMi(benchmark::State& state) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::xor_synergy;
    spec.rows = 4000;
    spec.noise_features = 2;
    spec.seed = 7;
    const Dataset d = generate(spec).data;
    for (auto _ : state) {
        benchmark::DoNotOptimize(plugin_mi(d, {0, 1, 2, 3}));
    }
}
BENCHMARK(PluginMi);

BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fsnid {

// Adaptive-moment state for one parameter set. Accumulators are flat and
// sized to the concatenation of the parameter views they update.
struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    uint64_t step = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static OptimizerState for_params(size_t param_count, double learning_rate);
};

// One bias-corrected descent step. params and grads must carry identical
// shapes, matching the state's accumulator size. Throws numeric_error on a
// non-finite gradient.
void opt_step(OptimizerState& state, std::span<std::span<double>> params,
              std::span<std::span<double>> grads);

}  // namespace fsnid

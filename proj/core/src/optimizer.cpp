#include "fsnid/optimizer.hpp"

#include <cmath>
#include <string>

#include "fsnid/errors.hpp"

namespace fsnid {

OptimizerState OptimizerState::for_params(size_t param_count, double learning_rate) {
    OptimizerState s;
    s.first_moment.assign(param_count, 0.0);
    s.second_moment.assign(param_count, 0.0);
    s.learning_rate = learning_rate;
    return s;
}

void opt_step(OptimizerState& state, std::span<std::span<double>> params,
              std::span<std::span<double>> grads) {
    if (params.size() != grads.size()) {
        throw input_error("opt_step: parameter/gradient view count mismatch");
    }
    size_t total = 0;
    for (size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != grads[i].size()) {
            throw input_error("opt_step: shape mismatch in view " + std::to_string(i));
        }
        total += params[i].size();
    }
    if (total != state.first_moment.size()) {
        throw input_error("opt_step: state sized for " + std::to_string(state.first_moment.size()) +
                          " parameters, got " + std::to_string(total));
    }

    state.step += 1;
    const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const double lr_corr = state.learning_rate / corr1;
    const double inv_sqrt_corr2 = 1.0 / std::sqrt(corr2);
    const double b1 = state.beta1, b2 = state.beta2;

    size_t k = 0;
    for (size_t v = 0; v < params.size(); ++v) {
        auto p = params[v];
        auto g = grads[v];
        for (size_t i = 0; i < p.size(); ++i, ++k) {
            const double grad = g[i];
            if (!std::isfinite(grad)) {
                throw numeric_error("opt_step: non-finite gradient at coordinate " +
                                    std::to_string(k));
            }
            double& m = state.first_moment[k];
            double& s = state.second_moment[k];
            m = b1 * m + (1.0 - b1) * grad;
            s = b2 * s + (1.0 - b2) * grad * grad;
            p[i] -= lr_corr * m / (std::sqrt(s) * inv_sqrt_corr2 + state.epsilon);
        }
    }
}

}  // namespace fsnid

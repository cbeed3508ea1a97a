#include "anoseqs/netcore/optim.hpp"

#include <cmath>

namespace anoseqs::netcore {

void AdamState::validate() const {
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw Error("adam: beta1 must be in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw Error("adam: beta2 must be in (0, 1)");
    if (!(epsilon > 0.0)) throw Error("adam: epsilon must be positive");
    if (!(learning_rate > 0.0)) throw Error("adam: learning rate must be positive");
}

AdamState make_adam_state(std::span<ParamTensor* const> params, double learning_rate, double beta1, double beta2,
                          double epsilon) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    s.validate();
    for (const auto* p : params) {
        s.first_moment.emplace_back(p->size(), 0.0);
        s.second_moment.emplace_back(p->size(), 0.0);
    }
    return s;
}

void adam_step(std::span<ParamTensor* const> params, AdamState& state) {
    state.validate();
    if (params.size() != state.first_moment.size()) throw Error("adam: parameter count does not match state");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = *params[i];
        if (p.size() != state.first_moment[i].size()) throw Error("adam: shape mismatch for " + p.name);
        for (double g : p.grad)
            if (!std::isfinite(g)) throw Error("adam: non-finite gradient in " + p.name);
    }

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = *params[i];
        auto& m = state.first_moment[i];
        auto& v = state.second_moment[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double g = p.grad[j];
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            p.values[j] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

} // namespace anoseqs::netcore

#pragma once

#include "anoseqs/netcore/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace anoseqs::netcore {

struct AdamState {
    std::uint64_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;

    void validate() const;
};

/// Fresh state with zeroed moments sized to `params`.
AdamState make_adam_state(std::span<ParamTensor* const> params, double learning_rate, double beta1 = 0.9,
                          double beta2 = 0.999, double epsilon = 1e-8);

/// One bias-corrected Adam update using each tensor's `grad`.
/// Throws Error (leaving params and state untouched) on a non-finite gradient.
void adam_step(std::span<ParamTensor* const> params, AdamState& state);

} // namespace anoseqs::netcore

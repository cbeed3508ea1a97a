#pragma once

#include "anoseqs/common.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace anoseqs::netcore {

/// A named trainable tensor. Values and gradients are flat, row-major.
struct ParamTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;

    ParamTensor() = default;
    ParamTensor(std::string name, std::vector<std::size_t> shape);

    std::size_t size() const { return values.size(); }
    std::size_t rows() const { return shape.size() >= 2 ? shape[0] : 1; }
    std::size_t cols() const { return shape.size() >= 2 ? shape[1] : (shape.empty() ? 0 : shape[0]); }

    Eigen::Map<Matrix> value_matrix();
    Eigen::Map<const Matrix> value_matrix() const;
    Eigen::Map<Matrix> grad_matrix();

    void zero_grad();
    bool finite() const;
};

} // namespace anoseqs::netcore

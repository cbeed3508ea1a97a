#include "anoseqs/netcore/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace anoseqs::netcore {

ParamTensor::ParamTensor(std::string name_, std::vector<std::size_t> shape_)
    : name(std::move(name_)), shape(std::move(shape_)) {
    const std::size_t n =
        std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<std::size_t>());
    values.assign(n, 0.0);
    grad.assign(n, 0.0);
}

Eigen::Map<Matrix> ParamTensor::value_matrix() {
    return {values.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

Eigen::Map<const Matrix> ParamTensor::value_matrix() const {
    return {values.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

Eigen::Map<Matrix> ParamTensor::grad_matrix() {
    return {grad.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

void ParamTensor::zero_grad() {
    std::fill(grad.begin(), grad.end(), 0.0);
}

bool ParamTensor::finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

} // namespace anoseqs::netcore

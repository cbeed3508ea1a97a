#pragma once

#include "anoseqs/netcore/network.hpp"

#include <functional>

namespace anoseqs::netcore {

/// Central difference (f(x+eps) - f(x-eps)) / (2 eps).
double central_difference(const std::function<double(double)>& f, double x, double eps);

/// Compares backward() against central finite differences for every parameter.
///
/// The scalar loss is sum(output .* P) with a fixed pseudo-random probe P, so
/// every output element contributes. Returns the maximum over all parameter
/// entries of |analytic - numeric| / max(1, |numeric|); 0 for parameter-free
/// nets. Parameters are restored to their original values before returning.
double grad_check(Network& net, const Matrix& input, double eps, std::uint64_t probe_seed = 0x5eed);

/// Same comparison for dL/d(input); used for parameter-free layers.
double input_grad_check(Network& net, const Matrix& input, double eps, std::uint64_t probe_seed = 0x5eed);

} // namespace anoseqs::netcore

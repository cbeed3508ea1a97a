#include "anoseqs/netcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace anoseqs::netcore {

namespace {

Matrix probe_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix p(rows, cols);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = dist(rng);
    return p;
}

double probe_loss(const Network& net, const Matrix& input, const Matrix& probe) {
    return (net.infer(input).array() * probe.array()).sum();
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) throw Error("grad_check: eps must lie in (0, 1e-2]");
}

} // namespace

double central_difference(const std::function<double(double)>& f, double x, double eps) {
    return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

double grad_check(Network& net, const Matrix& input, double eps, std::uint64_t probe_seed) {
    check_eps(eps);
    net.zero_grad();
    const Matrix out = net.forward(input);
    const Matrix probe = probe_matrix(out.rows(), out.cols(), probe_seed);
    net.backward(probe);

    double worst = 0.0;
    for (ParamTensor* p : net.params()) {
        for (std::size_t j = 0; j < p->size(); ++j) {
            const double saved = p->values[j];
            p->values[j] = saved + eps;
            const double up = probe_loss(net, input, probe);
            p->values[j] = saved - eps;
            const double down = probe_loss(net, input, probe);
            p->values[j] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double err = std::abs(p->grad[j] - numeric) / std::max(1.0, std::abs(numeric));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

double input_grad_check(Network& net, const Matrix& input, double eps, std::uint64_t probe_seed) {
    check_eps(eps);
    net.zero_grad();
    const Matrix out = net.forward(input);
    const Matrix probe = probe_matrix(out.rows(), out.cols(), probe_seed);
    const Matrix dx = net.backward(probe);

    double worst = 0.0;
    Matrix x = input;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double saved = x.data()[i];
        x.data()[i] = saved + eps;
        const double up = probe_loss(net, x, probe);
        x.data()[i] = saved - eps;
        const double down = probe_loss(net, x, probe);
        x.data()[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        worst = std::max(worst, std::abs(dx.data()[i] - numeric) / std::max(1.0, std::abs(numeric)));
    }
    return worst;
}

} // namespace anoseqs::netcore

#include "iuh/kernel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace iuh {

namespace {

void require_valid(const IuhParams& p) {
    if (!(p.k > 0.0) || !(p.theta > 0.0) || !(p.lambda >= 0.0)) {
        throw std::domain_error("gamma kernel requires lambda >= 0, k > 0, theta > 0");
    }
}

}  // namespace

double gamma_response_cdf(double t, const IuhParams& params) {
    require_valid(params);
    if (t <= 0.0) return 0.0;
    return params.lambda * boost::math::gamma_p(params.k, t / params.theta);
}

DiscreteKernel gamma_kernel(const IuhParams& params, int horizon) {
    require_valid(params);
    if (horizon < 1) throw std::invalid_argument("kernel horizon must be >= 1");

    DiscreteKernel kernel;
    kernel.horizon = horizon;
    kernel.weights.resize(static_cast<std::size_t>(horizon) + 1);
    double cdf_prev = 0.0;
    for (int tau = 0; tau <= horizon; ++tau) {
        const double cdf_next =
            boost::math::gamma_p(params.k, (tau + 1) / params.theta);
        // CDF is nondecreasing; clamp tiny negative round-off.
        kernel.weights[static_cast<std::size_t>(tau)] =
            params.lambda * std::max(0.0, cdf_next - cdf_prev);
        cdf_prev = cdf_next;
    }
    return kernel;
}

DailySeries convolve(const DailySeries& rain, const DiscreteKernel& kernel) {
    if (rain.quantity != Quantity::RainfallDepth) {
        throw std::invalid_argument("convolve expects a rainfall-depth series");
    }
    DailySeries out;
    out.start = rain.start;
    out.quantity = Quantity::RunoffDepth;
    const std::size_t n = rain.values.size();
    out.values.assign(n, 0.0);
    const std::size_t lags = kernel.weights.size();
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        const std::size_t max_tau = std::min(t + 1, lags);
        for (std::size_t tau = 0; tau < max_tau; ++tau) {
            acc += rain.values[t - tau] * kernel.weights[tau];
        }
        out.values[t] = acc;
    }
    return out;
}

double idr(const IuhParams& params) {
    if (!(params.theta > 0.0) || !(params.k > 0.0)) {
        throw std::domain_error("idr requires k > 0 and theta > 0");
    }
    return (params.k - 1.0) / kIdrEvalTime - 1.0 / params.theta;
}

IuhType classify(const IuhParams& params) {
    return idr(params) > 0.0 ? IuhType::Advection : IuhType::Diffusion;
}

const char* to_string(IuhType type) {
    return type == IuhType::Advection ? "advection" : "diffusion";
}

}  // namespace iuh

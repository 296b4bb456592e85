#ifndef IUH_KERNEL_HPP
#define IUH_KERNEL_HPP

#include "iuh/types.hpp"

namespace iuh {

/// Default truncation horizon of the unit hydrograph, in daily lags.
inline constexpr int kDefaultHorizon = 14;

/// Time (days) at which the relative initial derivative of the unit
/// hydrograph is evaluated; avoids the zero denominator at t = 0.
inline constexpr double kIdrEvalTime = 0.05;

/// Rescaled-Gamma cumulative response mass up to time t (days):
/// lambda * F(t; k, theta) with F the regularized lower incomplete Gamma CDF.
double gamma_response_cdf(double t, const IuhParams& params);

/// Day-integrated unit-hydrograph kernel. weights[tau] =
/// lambda * (F(tau+1; k, theta) - F(tau; k, theta)) for tau = 0..horizon.
/// The CDF difference stays finite for k < 1 where the density diverges at 0.
/// Throws std::domain_error when lambda < 0, k <= 0 or theta <= 0;
/// std::invalid_argument when horizon < 1.
DiscreteKernel gamma_kernel(const IuhParams& params, int horizon = kDefaultHorizon);

/// Causal daily convolution of a rainfall-depth series with the kernel:
/// out[t] = sum_{tau=0}^{min(t, horizon)} rain[t - tau] * weights[tau].
/// Lags reaching before the series start contribute zero. Output has the
/// rain series' start date and length, quantity runoff-depth.
DailySeries convolve(const DailySeries& rain, const DiscreteKernel& kernel);

/// Relative initial derivative of the unit hydrograph at t = 0.05 day:
/// (k - 1) / 0.05 - 1 / theta  [1/day]. Throws std::domain_error when
/// theta or k is not positive.
double idr(const IuhParams& params);

enum class IuhType { Advection, Diffusion };

/// Advection iff idr(params) > 0; ties fall to diffusion.
IuhType classify(const IuhParams& params);

const char* to_string(IuhType type);

}  // namespace iuh

#endif

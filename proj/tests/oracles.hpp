// Test-only reference implementations, independent of the library's
// computation paths: quadrature, brute-force search/summation, and
// closed-form posteriors. Deliberately slow and simple.

#ifndef IUH_TESTS_ORACLES_HPP
#define IUH_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "iuh/inference.hpp"
#include "iuh/types.hpp"

namespace oracles {

/// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 50) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// The continuous-time response density lambda * t^{k-1} e^{-t/theta} /
/// (Gamma(k) theta^k); integrable at 0 for k > 0.
inline double response_density(double t, const iuh::IuhParams& p) {
    if (t <= 0.0) return 0.0;
    return p.lambda *
           std::exp((p.k - 1.0) * std::log(t) - t / p.theta -
                    std::lgamma(p.k) - p.k * std::log(p.theta));
}

/// Quadrature of the response density over [a, b]. Splits near zero where the
/// integrand can be singular (k < 1).
inline double response_mass(const iuh::IuhParams& p, double a, double b) {
    auto f = [&](double t) { return response_density(t, p); };
    if (a > 0.0 || p.k >= 1.0) return integrate(f, a, b, 1e-13);
    // integrate t^{k-1}-dominated head analytically-guided: substitute t = u^{1/k}
    // so the integrand becomes bounded near zero.
    auto g = [&](double u) {
        const double t = std::pow(u, 1.0 / p.k);
        return response_density(t, p) * std::pow(u, 1.0 / p.k - 1.0) / p.k;
    };
    const double split = std::min(1.0, b);
    double head = integrate(g, 0.0, std::pow(split, p.k), 1e-13);
    double tail = split < b ? integrate(f, split, b, 1e-13) : 0.0;
    return head + tail;
}

/// Direct double-loop convolution.
inline std::vector<double> brute_convolve(const std::vector<double>& rain,
                                          const std::vector<double>& weights) {
    std::vector<double> out(rain.size(), 0.0);
    for (std::size_t t = 0; t < rain.size(); ++t) {
        for (std::size_t tau = 0; tau < weights.size(); ++tau) {
            if (tau > t) break;
            out[t] += rain[t - tau] * weights[tau];
        }
    }
    return out;
}

/// Exhaustive coarse-grid minimizer (the grid_init oracle). Cell centers use
/// the same arithmetic as the library so coordinates compare exactly; the
/// independent part is the exhaustive scan itself.
inline iuh::IuhParams brute_grid_search(const iuh::EpisodeData& episode,
                                        const iuh::ParamBox& box, int g) {
    const double cell_l = box.width_lambda() / g;
    const double cell_k = box.width_k() / g;
    const double cell_t = box.width_theta() / g;
    iuh::IuhParams best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int il = 0; il < g; ++il) {
        for (int ik = 0; ik < g; ++ik) {
            for (int it = 0; it < g; ++it) {
                const iuh::IuhParams center{box.lower.lambda + (il + 0.5) * cell_l,
                                            box.lower.k + (ik + 0.5) * cell_k,
                                            box.lower.theta + (it + 0.5) * cell_t};
                const double s = iuh::sse(episode.rain, episode.runoff, center);
                if (s < best_sse) {
                    best_sse = s;
                    best = center;
                }
            }
        }
    }
    return best;
}

/// Posterior mean of a linear coefficient under a Gaussian likelihood and a
/// uniform prior on [lo, hi], by quadrature: observations y = coef * c + eps.
inline double truncated_posterior_mean(const std::vector<double>& c,
                                       const std::vector<double>& y, double sigma2,
                                       double lo, double hi) {
    double a = 0.0, b = 0.0;  // sse(coef) = a coef^2 - 2 b coef + const
    for (std::size_t i = 0; i < c.size(); ++i) {
        a += c[i] * c[i];
        b += c[i] * y[i];
    }
    const double center = b / a;
    const double var = sigma2 / a;
    auto w = [&](double x) {
        return std::exp(-(x - center) * (x - center) / (2.0 * var));
    };
    const int n = 200001;
    double norm = 0.0, first = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1.0);
        const double weight = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        norm += weight * w(x);
        first += weight * w(x) * x;
    }
    return first / norm;
}

/// Upper-tail probability of the F(1, df2) distribution by quadrature of the
/// density, for cross-checking the library's tail computation.
inline double f_upper_tail_quadrature(double f_value, double df2) {
    // x = F statistic; integrate the density from f_value outward using the
    // transformation u = 1/x to make the tail finite.
    const double d1 = 1.0, d2 = df2;
    auto density = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double log_num = 0.5 * d1 * std::log(d1 * x) + 0.5 * d2 * std::log(d2) -
                               0.5 * (d1 + d2) * std::log(d1 * x + d2);
        const double log_beta = std::lgamma(0.5 * d1) + std::lgamma(0.5 * d2) -
                                std::lgamma(0.5 * (d1 + d2));
        return std::exp(log_num - log_beta) / x;
    };
    // tail via u-substitution x = f/u, u in (0, 1]
    auto tail_integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = f_value / u;
        return density(x) * f_value / (u * u);
    };
    return integrate(tail_integrand, 0.0, 1.0, 1e-12);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracles

#endif

#ifndef IUH_INFERENCE_HPP
#define IUH_INFERENCE_HPP

#include <cstdint>
#include <vector>

#include "iuh/kernel.hpp"
#include "iuh/types.hpp"

namespace iuh {

/// Componentwise prior/search bounds on the parameter triple.
struct ParamBox {
    IuhParams lower;
    IuhParams upper;

    /// lambda [0, 0.6], k [0, 6], theta [0, 10].
    static ParamBox defaults();

    bool contains(const IuhParams& p) const;
    double width_lambda() const { return upper.lambda - lower.lambda; }
    double width_k() const { return upper.k - lower.k; }
    double width_theta() const { return upper.theta - lower.theta; }

    /// Throws ConfigError unless lower < upper componentwise.
    void validate() const;
};

struct ChainConfig {
    std::size_t n_samples = 20000;   // total Metropolis-Hastings iterations
    std::size_t burn_in = 5000;      // discarded prefix
    double step_fraction = 0.05;     // proposal half-width as fraction of box width
    int grid_per_dim = 10;           // coarse-grid resolution per dimension
    int sigma2_iterations = 1;       // noise-variance update count
    int horizon = kDefaultHorizon;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Output of one chain (or of the full iterative fit).
struct PosteriorSummary {
    std::vector<IuhParams> samples;      // retained, post burn-in
    IuhParams mean;                      // the Bayesian parameter estimate
    IuhParams sd;                        // retained-sample standard deviation
    double sigma2 = 0.0;                 // noise variance estimate (mm/day)^2
    double acceptance_rate = 0.0;
    IuhParams init;                      // grid-search starting triple
    std::vector<double> sigma2_history;  // [initial, after chain 1, after chain 2, ...]
};

/// Sum of squared errors between observed runoff and the modeled response
/// convolve(rain, gamma_kernel(params, horizon)).
/// Throws std::invalid_argument on length mismatch.
double sse(const DailySeries& rain, const DailySeries& runoff_obs,
           const IuhParams& params, int horizon = kDefaultHorizon);

/// Metropolis-Hastings acceptance probability for the Gaussian likelihood
/// with symmetric (uniform) proposals: 0 when the proposal left the box,
/// else min(1, exp((sse_current - sse_proposal) / (2 sigma2))).
/// Throws std::domain_error when sigma2 <= 0.
double acceptance_prob(double sse_current, double sse_proposal, double sigma2,
                       bool proposal_in_box);

/// Coarse-grid likelihood search: evaluates sse at the center of each of
/// grid_per_dim^3 cells and returns the minimizing center. Ties break to the
/// lowest lexicographic (lambda, k, theta) cell index.
IuhParams grid_init(const EpisodeData& episode, const ParamBox& box,
                    int grid_per_dim = 10, int horizon = kDefaultHorizon);

/// One Metropolis-Hastings chain at fixed sigma2. Each step perturbs all
/// three components jointly, uniform in [x_i - dx_i, x_i + dx_i] with
/// dx_i = step_fraction * box width. Deterministic given cfg.rng_seed.
/// Throws std::invalid_argument when init is outside the box.
PosteriorSummary mh_chain(const EpisodeData& episode, const ParamBox& box,
                          const ChainConfig& cfg, const IuhParams& init,
                          double sigma2);

/// Full fit: grid initialization, a first chain with sigma2 set to
/// sse(init)/N, then cfg.sigma2_iterations rounds of (update sigma2 from the
/// current Bayesian mean, rerun the chain warm-started at that mean).
/// sigma2_history records the initial value and every per-chain update; the
/// final entry (== sigma2) comes from the last chain's mean.
PosteriorSummary fit_episode(const EpisodeData& episode, const ParamBox& box,
                             const ChainConfig& cfg);

/// Maximum-likelihood baseline: best of n_draws uniform draws from the box
/// under sse. Deterministic given seed.
IuhParams mle_random_search(const EpisodeData& episode, const ParamBox& box,
                            std::size_t n_draws, std::uint64_t rng_seed,
                            int horizon = kDefaultHorizon);

}  // namespace iuh

#endif

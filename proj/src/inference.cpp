#include "iuh/inference.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iuh/errors.hpp"
#include "iuh/rng.hpp"
#include "iuh/stats.hpp"

namespace iuh {

namespace {

bool params_valid(const IuhParams& p) {
    return p.lambda >= 0.0 && p.k > 0.0 && p.theta > 0.0;
}

/// Kernel build + convolution + squared error in one pass; the hot path of
/// the chain, kept allocation-free apart from the kernel weights.
double sse_impl(const DailySeries& rain, const DailySeries& runoff,
                const IuhParams& params, int horizon) {
    const DiscreteKernel kernel = gamma_kernel(params, horizon);
    const std::size_t n = rain.values.size();
    const std::size_t lags = kernel.weights.size();
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double model = 0.0;
        const std::size_t max_tau = std::min(t + 1, lags);
        for (std::size_t tau = 0; tau < max_tau; ++tau) {
            model += rain.values[t - tau] * kernel.weights[tau];
        }
        const double d = runoff.values[t] - model;
        total += d * d;
    }
    return total;
}

void summarize_samples(PosteriorSummary& summary) {
    const auto& s = summary.samples;
    const double n = static_cast<double>(s.size());
    IuhParams m{0.0, 0.0, 0.0};
    for (const auto& p : s) {
        m.lambda += p.lambda;
        m.k += p.k;
        m.theta += p.theta;
    }
    m.lambda /= n;
    m.k /= n;
    m.theta /= n;
    IuhParams v{0.0, 0.0, 0.0};
    for (const auto& p : s) {
        v.lambda += (p.lambda - m.lambda) * (p.lambda - m.lambda);
        v.k += (p.k - m.k) * (p.k - m.k);
        v.theta += (p.theta - m.theta) * (p.theta - m.theta);
    }
    const double denom = s.size() > 1 ? n - 1.0 : 1.0;
    summary.mean = m;
    summary.sd = {std::sqrt(v.lambda / denom), std::sqrt(v.k / denom),
                  std::sqrt(v.theta / denom)};
}

}  // namespace

ParamBox ParamBox::defaults() {
    return {{0.0, 0.0, 0.0}, {0.6, 6.0, 10.0}};
}

bool ParamBox::contains(const IuhParams& p) const {
    return p.lambda >= lower.lambda && p.lambda <= upper.lambda &&
           p.k >= lower.k && p.k <= upper.k &&
           p.theta >= lower.theta && p.theta <= upper.theta;
}

void ParamBox::validate() const {
    if (!(lower.lambda < upper.lambda) || !(lower.k < upper.k) ||
        !(lower.theta < upper.theta)) {
        throw ConfigError("parameter box requires lower < upper componentwise");
    }
}

void ChainConfig::validate() const {
    if (burn_in >= n_samples) throw ConfigError("burn_in must be < n_samples");
    if (!(step_fraction > 0.0) || step_fraction > 1.0) {
        throw ConfigError("step_fraction must be in (0, 1]");
    }
    if (grid_per_dim < 2) throw ConfigError("grid_per_dim must be >= 2");
    if (sigma2_iterations < 0) throw ConfigError("sigma2_iterations must be >= 0");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
}

double sse(const DailySeries& rain, const DailySeries& runoff_obs,
           const IuhParams& params, int horizon) {
    if (rain.values.size() != runoff_obs.values.size()) {
        throw std::invalid_argument("sse: rainfall and runoff lengths differ");
    }
    return sse_impl(rain, runoff_obs, params, horizon);
}

double acceptance_prob(double sse_current, double sse_proposal, double sigma2,
                       bool proposal_in_box) {
    if (!(sigma2 > 0.0)) throw std::domain_error("acceptance_prob: sigma2 must be > 0");
    if (!proposal_in_box) return 0.0;
    const double log_ratio = (sse_current - sse_proposal) / (2.0 * sigma2);
    if (log_ratio >= 0.0) return 1.0;
    return std::exp(log_ratio);
}

IuhParams grid_init(const EpisodeData& episode, const ParamBox& box,
                    int grid_per_dim, int horizon) {
    box.validate();
    if (grid_per_dim < 2) throw ConfigError("grid_per_dim must be >= 2");
    const int g = grid_per_dim;
    const double cell_l = box.width_lambda() / g;
    const double cell_k = box.width_k() / g;
    const double cell_t = box.width_theta() / g;

    IuhParams best;
    double best_sse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int il = 0; il < g; ++il) {
        for (int ik = 0; ik < g; ++ik) {
            for (int it = 0; it < g; ++it) {
                const IuhParams center{box.lower.lambda + (il + 0.5) * cell_l,
                                       box.lower.k + (ik + 0.5) * cell_k,
                                       box.lower.theta + (it + 0.5) * cell_t};
                if (!params_valid(center)) continue;
                const double s = sse_impl(episode.rain, episode.runoff, center, horizon);
                // strict < keeps the lowest lexicographic index on ties
                if (s < best_sse) {
                    best_sse = s;
                    best = center;
                    found = true;
                }
            }
        }
    }
    if (!found) throw std::domain_error("grid search found no valid cell center");
    return best;
}

PosteriorSummary mh_chain(const EpisodeData& episode, const ParamBox& box,
                          const ChainConfig& cfg, const IuhParams& init,
                          double sigma2) {
    box.validate();
    cfg.validate();
    if (!box.contains(init)) {
        throw std::invalid_argument("mh_chain: init lies outside the parameter box");
    }
    if (!(sigma2 > 0.0)) throw std::domain_error("mh_chain: sigma2 must be > 0");

    const double dx_l = cfg.step_fraction * box.width_lambda();
    const double dx_k = cfg.step_fraction * box.width_k();
    const double dx_t = cfg.step_fraction * box.width_theta();

    Rng rng(cfg.rng_seed);

    IuhParams current = init;
    double current_sse = sse_impl(episode.rain, episode.runoff, current, cfg.horizon);

    PosteriorSummary summary;
    summary.init = init;
    summary.samples.reserve(cfg.n_samples - cfg.burn_in);
    std::size_t accepted = 0;

    for (std::size_t step = 0; step < cfg.n_samples; ++step) {
        const IuhParams proposal{current.lambda + rng.uniform(-dx_l, dx_l),
                                 current.k + rng.uniform(-dx_k, dx_k),
                                 current.theta + rng.uniform(-dx_t, dx_t)};
        const double u = rng.uniform();
        // Proposals outside the box, or at the k/theta = 0 edges where the
        // Gamma density is undefined, get acceptance 0.
        if (box.contains(proposal) && params_valid(proposal)) {
            const double prop_sse =
                sse_impl(episode.rain, episode.runoff, proposal, cfg.horizon);
            if (u < acceptance_prob(current_sse, prop_sse, sigma2, true)) {
                current = proposal;
                current_sse = prop_sse;
                ++accepted;
            }
        }
        if (step >= cfg.burn_in) {
            summary.samples.push_back(current);
        }
    }

    summarize_samples(summary);
    summary.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
    summary.sigma2 = sigma2;
    return summary;
}

PosteriorSummary fit_episode(const EpisodeData& episode, const ParamBox& box,
                             const ChainConfig& cfg) {
    box.validate();
    cfg.validate();
    const std::size_t n_days = episode.runoff.values.size();
    if (n_days == 0) throw std::invalid_argument("fit_episode: empty episode");
    const double n = static_cast<double>(n_days);

    const IuhParams start = grid_init(episode, box, cfg.grid_per_dim, cfg.horizon);
    const auto update_sigma2 = [&](const IuhParams& p) {
        return std::max(sse(episode.rain, episode.runoff, p, cfg.horizon) / n,
                        DBL_MIN);
    };

    std::vector<double> history;
    double sigma2 = update_sigma2(start);
    history.push_back(sigma2);

    PosteriorSummary summary = mh_chain(episode, box, cfg, start, sigma2);
    for (int iter = 0; iter < cfg.sigma2_iterations; ++iter) {
        sigma2 = update_sigma2(summary.mean);
        history.push_back(sigma2);
        ChainConfig next = cfg;
        next.rng_seed =
            child_seed(cfg.rng_seed, 0x5eedULL, static_cast<std::uint64_t>(iter + 1));
        summary = mh_chain(episode, box, next, summary.mean, sigma2);
    }

    // Final update from the last chain's Bayesian mean; this is the reported
    // noise-variance estimate.
    const double final_sigma2 = update_sigma2(summary.mean);
    history.push_back(final_sigma2);
    summary.sigma2 = final_sigma2;
    summary.sigma2_history = std::move(history);
    summary.init = start;
    return summary;
}

IuhParams mle_random_search(const EpisodeData& episode, const ParamBox& box,
                            std::size_t n_draws, std::uint64_t rng_seed,
                            int horizon) {
    box.validate();
    if (n_draws < 1) throw std::invalid_argument("mle_random_search: n_draws must be >= 1");
    Rng rng(rng_seed);
    IuhParams best;
    double best_sse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const IuhParams draw{rng.uniform(box.lower.lambda, box.upper.lambda),
                             rng.uniform(box.lower.k, box.upper.k),
                             rng.uniform(box.lower.theta, box.upper.theta)};
        if (!params_valid(draw)) continue;  // measure-zero box edge
        const double s = sse_impl(episode.rain, episode.runoff, draw, horizon);
        if (!found || s < best_sse) {
            best_sse = s;
            best = draw;
            found = true;
        }
    }
    if (!found) throw std::domain_error("mle_random_search: no valid draw");
    return best;
}

}  // namespace iuh

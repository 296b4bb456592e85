#include "iuh/synthetic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "iuh/errors.hpp"
#include "iuh/parallel.hpp"
#include "iuh/rng.hpp"
#include "iuh/stats.hpp"

namespace iuh {

void OccurrenceModel::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_rain_given_sunny) || !prob(p_rain_given_rainy) || !prob(p_rain_initial)) {
        throw ConfigError("occurrence probabilities must lie in [0, 1]");
    }
}

IntensityPool IntensityPool::defaults() {
    // Skewed wet-day depths (mm/day); roughly exponential deciles with a
    // heavy upper tail, giving a mean wet-day intensity near 9 mm.
    return {{0.3, 0.8, 1.5, 2.3, 3.2, 4.4, 6.0, 8.2, 11.5, 17.0, 25.0, 40.0}};
}

void IntensityPool::validate() const {
    if (intensities.empty()) throw ConfigError("intensity pool must be non-empty");
    for (double v : intensities) {
        if (!(v > 0.0)) throw ConfigError("intensity pool values must be > 0");
    }
}

NoiseSpec NoiseSpec::from_snr(double target_snr) {
    if (!(target_snr > 0.0)) throw ConfigError("target SNR must be > 0");
    NoiseSpec spec;
    spec.target_snr_ = target_snr;
    return spec;
}

NoiseSpec NoiseSpec::from_sigma(double sigma) {
    if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
    NoiseSpec spec;
    spec.sigma_ = sigma;
    return spec;
}

std::vector<bool> gen_occurrence(const OccurrenceModel& model, int n_days,
                                 std::uint64_t rng_seed) {
    model.validate();
    if (n_days < 1) throw std::invalid_argument("gen_occurrence: n_days must be >= 1");
    Rng rng(rng_seed);
    std::vector<bool> wet(static_cast<std::size_t>(n_days));
    wet[0] = rng.bernoulli(model.p_rain_initial);
    for (int t = 1; t < n_days; ++t) {
        const double p =
            wet[static_cast<std::size_t>(t - 1)] ? model.p_rain_given_rainy
                                                 : model.p_rain_given_sunny;
        wet[static_cast<std::size_t>(t)] = rng.bernoulli(p);
    }
    return wet;
}

DailySeries gen_rainfall(const std::vector<bool>& occurrence,
                         const IntensityPool& pool, std::uint64_t rng_seed,
                         const Date& start) {
    pool.validate();
    Rng rng(rng_seed);
    DailySeries rain;
    rain.start = start;
    rain.quantity = Quantity::RainfallDepth;
    rain.values.reserve(occurrence.size());
    for (bool wet : occurrence) {
        rain.values.push_back(wet ? pool.intensities[rng.index(pool.intensities.size())]
                                  : 0.0);
    }
    return rain;
}

SyntheticEpisode gen_episode(const IuhParams& truth, const OccurrenceModel& occ,
                             const IntensityPool& pool, const NoiseSpec& noise,
                             int n_days, std::uint64_t rng_seed, int horizon,
                             int year) {
    const Date start{std::chrono::year{year}, std::chrono::June, std::chrono::day{1}};
    const auto wet = gen_occurrence(occ, n_days, child_seed(rng_seed, 1));
    DailySeries rain = gen_rainfall(wet, pool, child_seed(rng_seed, 2), start);
    DailySeries clean = convolve(rain, gamma_kernel(truth, horizon));

    double sigma = 0.0;
    if (noise.has_target_snr()) {
        const double signal_sd = sample_stdev(clean.values);
        if (signal_sd == 0.0) throw DataError("flat signal, SNR undefined");
        sigma = signal_sd / noise.target_snr();
    } else {
        sigma = noise.sigma();
    }

    DailySeries noisy = clean;
    Rng rng(child_seed(rng_seed, 3));
    for (double& v : noisy.values) {
        v += rng.normal(0.0, sigma);  // negative values retained
    }

    SyntheticEpisode out;
    out.episode.watershed = {"synthetic", "synthetic", 0.0, 0.0, 1.0};
    out.episode.year = year;
    out.episode.rain = std::move(rain);
    out.episode.runoff = std::move(noisy);
    out.episode.extension_days = 0;
    out.episode.truth = truth;
    out.sigma = sigma;
    out.noise_free = std::move(clean);
    return out;
}

IuhParams sample_truth(const ParamBox& box, Rng& rng, double margin_fraction) {
    const double k_lo = box.lower.k + margin_fraction * box.width_k();
    const double t_lo = box.lower.theta + margin_fraction * box.width_theta();
    return {rng.uniform(box.lower.lambda, box.upper.lambda),
            rng.uniform(k_lo, box.upper.k),
            rng.uniform(t_lo, box.upper.theta)};
}

std::vector<FitRecord> snr_sweep(const SweepSpec& spec) {
    spec.box.validate();
    spec.chain.validate();
    spec.occurrence.validate();
    spec.pool.validate();
    if (spec.reps < 1) throw ConfigError("sweep reps must be >= 1");
    if (spec.snr_grid.empty()) throw ConfigError("sweep needs a non-empty SNR grid");
    for (double s : spec.snr_grid) {
        if (!(s > 0.0)) throw ConfigError("sweep SNR values must be > 0");
    }

    const std::size_t total =
        spec.snr_grid.size() * static_cast<std::size_t>(spec.reps);
    std::vector<FitRecord> records(total);

    parallel_for(total, spec.threads, [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(spec.reps);
        const std::size_t ri = idx % static_cast<std::size_t>(spec.reps);
        const std::uint64_t seed = child_seed(spec.master_seed, si, ri);

        Rng truth_rng(child_seed(seed, 0));
        const IuhParams truth = sample_truth(spec.box, truth_rng, spec.truth_margin);
        const SyntheticEpisode synth =
            gen_episode(truth, spec.occurrence, spec.pool,
                        NoiseSpec::from_snr(spec.snr_grid[si]), spec.n_days, seed,
                        spec.chain.horizon, static_cast<int>(ri));

        ChainConfig chain = spec.chain;
        chain.rng_seed = child_seed(seed, 4);
        const PosteriorSummary posterior =
            fit_episode(synth.episode, spec.box, chain);

        FitRecord rec = make_fit_record(synth.episode, posterior, spec.box,
                                        spec.chain.horizon);
        rec.year = static_cast<int>(ri);
        rec.snr_target = spec.snr_grid[si];
        rec.noise_sigma = synth.sigma;
        rec.snr_noisy = synth.sigma > 0.0
                            ? sample_stdev(synth.episode.runoff.values) / synth.sigma
                            : std::numeric_limits<double>::infinity();
        records[idx] = std::move(rec);
    });
    return records;
}

}  // namespace iuh

#ifndef IUH_SYNTHETIC_HPP
#define IUH_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "iuh/inference.hpp"
#include "iuh/metrics.hpp"
#include "iuh/rng.hpp"
#include "iuh/types.hpp"

namespace iuh {

/// Two-state (rainy/sunny) occurrence chain. Defaults are the Fall Creek
/// summer transition probabilities and initial wet probability.
struct OccurrenceModel {
    double p_rain_given_sunny = 0.34;
    double p_rain_given_rainy = 0.49;
    double p_rain_initial = 0.49;

    void validate() const;  // all probabilities in [0, 1]
};

/// Wet-day intensities (mm/day) harvested from historical records; sampled
/// with replacement.
struct IntensityPool {
    std::vector<double> intensities;

    /// A skewed summer wet-day intensity set used when no historical pool is
    /// supplied.
    static IntensityPool defaults();

    void validate() const;  // non-empty, all > 0
};

/// Noise prescription: either a target signal-to-noise ratio (sigma derived
/// from the noise-free runoff) or an explicit sigma in mm/day. Exactly one.
class NoiseSpec {
public:
    static NoiseSpec from_snr(double target_snr);
    static NoiseSpec from_sigma(double sigma);

    bool has_target_snr() const { return target_snr_.has_value(); }
    double target_snr() const { return *target_snr_; }
    double sigma() const { return *sigma_; }

private:
    NoiseSpec() = default;
    std::optional<double> target_snr_;
    std::optional<double> sigma_;
};

/// Wet/dry day sequence: day 0 ~ Bernoulli(p_rain_initial), later days follow
/// the transition row selected by the previous day. Deterministic given seed.
std::vector<bool> gen_occurrence(const OccurrenceModel& model, int n_days,
                                 std::uint64_t rng_seed);

/// Bootstrap intensities onto an occurrence sequence: wet days draw uniformly
/// with replacement from the pool, dry days are zero.
DailySeries gen_rainfall(const std::vector<bool>& occurrence,
                         const IntensityPool& pool, std::uint64_t rng_seed,
                         const Date& start);

struct SyntheticEpisode {
    EpisodeData episode;      // noisy runoff; truth recorded
    double sigma = 0.0;       // realized noise standard deviation (mm/day)
    DailySeries noise_free;   // model response before noise injection
};

/// Full episode: occurrence + bootstrap rainfall, noise-free runoff through
/// the forward model, i.i.d. Gaussian noise at the prescribed level. With a
/// target SNR, sigma = sample stdev(noise-free runoff) / target_snr; throws
/// DataError("flat signal, SNR undefined") when that stdev is zero. Negative
/// noisy values are retained.
SyntheticEpisode gen_episode(const IuhParams& truth, const OccurrenceModel& occ,
                             const IntensityPool& pool, const NoiseSpec& noise,
                             int n_days, std::uint64_t rng_seed,
                             int horizon = kDefaultHorizon, int year = 2000);

/// Uniform truth draw from the box, excluding margin_fraction of the k and
/// theta widths at their lower edges (keeps clear of the undefined Gamma
/// boundary).
IuhParams sample_truth(const ParamBox& box, Rng& rng,
                       double margin_fraction = 0.05);

struct SweepSpec {
    ParamBox box = ParamBox::defaults();
    std::vector<double> snr_grid{2.0, 5.0, 10.0, 20.0, 50.0};
    int reps = 50;
    int n_days = 92;
    double truth_margin = 0.05;
    OccurrenceModel occurrence;
    IntensityPool pool = IntensityPool::defaults();
    ChainConfig chain;
    std::uint64_t master_seed = 0;
    int threads = 1;
};

/// The SNR sweep experiment: for every (snr, repetition) draw a truth, build
/// a synthetic episode, score both the coarse-grid initializer and the full
/// Bayesian fit against the truth. Each repetition runs under the child seed
/// of (master_seed, snr index, rep index); records come back sorted by
/// (snr index, rep) regardless of scheduling.
std::vector<FitRecord> snr_sweep(const SweepSpec& spec);

}  // namespace iuh

#endif

#ifndef IUH_METRICS_HPP
#define IUH_METRICS_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iuh/kernel.hpp"
#include "iuh/types.hpp"

namespace iuh {

struct ParamBox;
struct PosteriorSummary;

/// Componentwise |est - truth| / box width.
struct RelErrors {
    double lambda = 0.0;
    double k = 0.0;
    double theta = 0.0;
};

/// One episode's complete result; the row type of every experiment table.
struct FitRecord {
    std::string watershed;
    int year = 0;
    IuhParams bayes;
    std::optional<IuhParams> mle;
    IuhParams grid_init;
    double sigma2 = 0.0;
    double acceptance_rate = 0.0;
    std::optional<double> cc;            // missing when undefined (constant series)
    std::optional<double> nse;
    double snr_observed = 0.0;           // +inf sentinel on a perfect fit
    double runoff_coefficient = 0.0;
    double idr = 0.0;
    IuhType iuh_type = IuhType::Diffusion;
    int extension_days = 0;
    double total_rain = 0.0;             // episode depth totals (mm)
    double total_runoff = 0.0;

    // Synthetic episodes only.
    std::optional<IuhParams> truth;
    std::optional<RelErrors> rel_err_bayes;
    std::optional<RelErrors> rel_err_grid;
    std::optional<double> snr_target;    // prescribed (noise-free-signal based)
    std::optional<double> snr_noisy;     // stdev(noisy runoff) / realized sigma
    std::optional<double> noise_sigma;
};

RelErrors relative_error(const IuhParams& est, const IuhParams& truth,
                         const ParamBox& box);

/// Sample Pearson correlation; nullopt when either series is constant.
std::optional<double> cc(std::span<const double> a, std::span<const double> b);

/// Nash-Sutcliffe efficiency 1 - SSE / SS_obs; nullopt when obs is constant.
std::optional<double> nse(std::span<const double> obs,
                          std::span<const double> sim);

/// stdev(runoff) / stdev(residuals); +infinity when the residuals are
/// exactly constant (perfect fit).
double snr_observed(std::span<const double> runoff,
                    std::span<const double> residuals);

/// Total runoff depth over total rainfall depth. Throws std::domain_error
/// when total rainfall is zero.
double runoff_coefficient(std::span<const double> rain,
                          std::span<const double> runoff);

/// Coefficient of determination of y against the 1:1 line (not a fitted
/// line): 1 - sum (y-x)^2 / sum (y-mean(y))^2. nullopt when y is constant.
std::optional<double> r2_identity(std::span<const double> x,
                                  std::span<const double> y);

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double f_statistic = 0.0;
    double p_one_tailed = 1.0;  // upper tail of F(1, n-2)
    std::size_t n = 0;
};

/// Ordinary least squares of y on x with the overall-regression F test.
/// Throws std::invalid_argument when n < 3 or x is constant.
RegressionResult regress_f_test(std::span<const double> x,
                                std::span<const double> y);

/// Right-continuous empirical CDF: sorted unique (value, rank/n) pairs where
/// rank counts all observations <= value.
std::vector<std::pair<double, double>> ecdf(std::vector<double> values);

/// Builds the per-episode result row (skill metrics against the
/// Bayesian-mean model, SNR, runoff coefficient, IDR; relative errors when
/// the episode carries a generating truth).
FitRecord make_fit_record(const EpisodeData& episode,
                          const PosteriorSummary& posterior,
                          const ParamBox& box, int horizon);

}  // namespace iuh

#endif
